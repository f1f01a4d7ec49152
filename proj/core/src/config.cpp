#include <mgcn/config.hpp>

#include <json.hpp>

namespace mgcn {

using nlohmann::json;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::full: return "full";
    case Mode::om_only: return "om_only";
    case Mode::lp_only: return "lp_only";
    case Mode::softmax: return "softmax";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::full, Mode::om_only, Mode::lp_only, Mode::softmax}) {
    if (to_string(m) == text) return m;
  }
  throw InvalidArgument("mode: unknown value '" + std::string(text) + "' (expected full, om_only, lp_only or softmax)");
}

void TrainConfig::validate(Index num_classes) const {
  const auto fail = [](const std::string& field, const std::string& why) {
    throw InvalidArgument(field + ": " + why);
  };
  if (hidden_dims.empty()) fail("hidden", "at least one layer width is required");
  for (Index w : hidden_dims) {
    if (w < 1) fail("hidden", "layer widths must be >= 1");
  }
  if (uses_decision_layer(mode) && hidden_dims.back() < num_classes) {
    fail("hidden", "embedding width " + std::to_string(hidden_dims.back()) + " is below the class count " +
                       std::to_string(num_classes));
  }
  if (!(lambda >= 0.0)) fail("lambda", "must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout", "must lie in [0, 1)");
  if (!(lr > 0.0)) fail("lr", "must be > 0");
  if (!(weight_decay >= 0.0)) fail("weight_decay", "must be >= 0");
  if (refresh_interval < 1) fail("refresh", "must be >= 1");
  if (max_epochs < 0) fail("epochs", "must be >= 0");
  if (patience < 1) fail("patience", "must be >= 1");
  if (!(inner_tol > 0.0)) fail("inner_tol", "must be > 0");
  if (inner_max_iter < 1) fail("inner_max_iter", "must be >= 1");
}

std::string config_to_json(const TrainConfig& c) {
  json j;
  j["hidden"] = c.hidden_dims;
  j["lambda"] = c.lambda;
  j["dropout"] = c.dropout;
  j["lr"] = c.lr;
  j["weight_decay"] = c.weight_decay;
  j["refresh"] = c.refresh_interval;
  j["epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["inner_tol"] = c.inner_tol;
  j["inner_max_iter"] = c.inner_max_iter;
  j["mode"] = std::string(to_string(c.mode));
  j["seed"] = c.seed;
  j["normalize_features"] = c.normalize_features;
  j["random_label_init"] = c.random_label_init;
  j["labeled_only_loss"] = c.labeled_only_loss;
  return j.dump(2);
}

TrainConfig config_from_json(std::string_view json_text, TrainConfig base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");

  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "hidden") base.hidden_dims = value.get<std::vector<Index>>();
      else if (key == "lambda") base.lambda = value.get<double>();
      else if (key == "dropout") base.dropout = value.get<double>();
      else if (key == "lr") base.lr = value.get<double>();
      else if (key == "weight_decay") base.weight_decay = value.get<double>();
      else if (key == "refresh") base.refresh_interval = value.get<Index>();
      else if (key == "epochs") base.max_epochs = value.get<Index>();
      else if (key == "patience") base.patience = value.get<Index>();
      else if (key == "inner_tol") base.inner_tol = value.get<double>();
      else if (key == "inner_max_iter") base.inner_max_iter = value.get<Index>();
      else if (key == "mode") base.mode = parse_mode(value.get<std::string>());
      else if (key == "seed") base.seed = value.get<std::uint64_t>();
      else if (key == "normalize_features") base.normalize_features = value.get<bool>();
      else if (key == "random_label_init") base.random_label_init = value.get<bool>();
      else if (key == "labeled_only_loss") base.labeled_only_loss = value.get<bool>();
      else throw InvalidArgument("config: unknown key '" + key + "'");
    } catch (const json::exception&) {
      throw InvalidArgument("config: wrong type for '" + key + "'");
    }
  }
  return base;
}

}  // namespace mgcn
