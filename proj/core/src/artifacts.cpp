#include <mgcn/artifacts.hpp>

#include "byte_io.hpp"

#include <json.hpp>

namespace mgcn {

using nlohmann::json;

std::string convergence_csv(const RunResult& run) {
  std::string out = "epoch,objective,val_acc,test_acc\n";
  for (const auto& r : run.history) {
    out += std::to_string(r.epoch) + ',' + detail::format_double(r.objective) + ',' +
           detail::format_double(r.val_accuracy) + ',' + detail::format_double(r.test_accuracy) + '\n';
  }
  return out;
}

std::string embeddings_tsv(const TrainOutput& output, const Dataset& dataset) {
  const Matrix& h = output.embedding;
  std::string out = "node";
  for (Index j = 0; j < h.cols(); ++j) out += "\th" + std::to_string(j);
  out += "\tlabel\tpredicted\n";
  for (Index i = 0; i < h.rows(); ++i) {
    out += dataset.node_names.empty() ? std::to_string(i) : dataset.node_names[static_cast<std::size_t>(i)];
    for (Index j = 0; j < h.cols(); ++j) out += '\t' + detail::format_double(h(i, j));
    out += '\t' + std::to_string(dataset.labels[static_cast<std::size_t>(i)]);
    out += '\t' + std::to_string(output.predictions[static_cast<std::size_t>(i)]);
    out += '\n';
  }
  return out;
}

std::string metrics_json(std::string_view dataset_name, const TrainConfig& config, const RepeatedResult& result) {
  json per_run = json::array();
  for (const auto& r : result.runs) {
    per_run.push_back({{"seed", r.seed},
                       {"test_accuracy", r.test_accuracy},
                       {"val_accuracy", r.val_accuracy},
                       {"epochs_run", r.epochs_run},
                       {"best_epoch", r.best_epoch},
                       {"monotonicity_violations", r.monotonicity_violations},
                       {"final_objective", r.history.empty() ? 0.0 : r.history.back().objective}});
  }
  json j;
  j["dataset"] = std::string(dataset_name);
  j["config"] = json::parse(config_to_json(config));
  j["per_run"] = std::move(per_run);
  j["mean"] = result.mean;
  j["std"] = result.std;
  return j.dump(2) + "\n";
}

std::string timing_json(const RepeatedResult& result) {
  json per_run = json::array();
  for (const auto& r : result.runs) per_run.push_back(r.wall_time);
  return json{{"wall_time", result.wall_time}, {"per_run", per_run}}.dump(2) + "\n";
}

void write_metrics(const std::filesystem::path& out_dir, std::string_view dataset_name, const TrainConfig& config,
                   const RepeatedResult& result) {
  std::filesystem::create_directories(out_dir);
  detail::write_file(out_dir / "metrics.json", metrics_json(dataset_name, config, result));
  detail::write_file(out_dir / "timing.json", timing_json(result));
}

void export_artifacts(const TrainOutput& output, const Dataset& dataset, const TrainConfig& config,
                      const std::filesystem::path& out_dir) {
  RepeatedResult single;
  single.runs.push_back(output.result);
  single.mean = output.result.test_accuracy;
  single.wall_time = output.result.wall_time;
  write_metrics(out_dir, dataset.name, config, single);
  detail::write_file(out_dir / "convergence.csv", convergence_csv(output.result));
  detail::write_file(out_dir / "embeddings.tsv", embeddings_tsv(output, dataset));
  save_checkpoint(out_dir / "checkpoint.bin", make_checkpoint(output, config));
}

}  // namespace mgcn
