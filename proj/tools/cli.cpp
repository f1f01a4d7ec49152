#include "cli.hpp"

#include <mgcn/artifacts.hpp>
#include <mgcn/trainer.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mgcn::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public Error {
 public:
  using Error::Error;
};

fs::path env_path(const char* name, const char* fallback) {
  const char* value = std::getenv(name);
  return value != nullptr && *value != '\0' ? fs::path(value) : fs::path(fallback);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve_preset(const std::string& name) {
  if (fs::exists(name)) return name;
  for (const fs::path& dir : {env_path("MGCN_PRESET_DIR", MGCN_PRESET_DIR)}) {
    const fs::path candidate = dir / (name + ".json");
    if (fs::exists(candidate)) return candidate;
  }
  throw UsageError("--preset: no preset file or built-in preset named '" + name + "'");
}

// A preset is a config object; a metrics.json is accepted too and its echoed
// config is used.
TrainConfig apply_preset(const std::string& name, TrainConfig base) {
  const fs::path path = resolve_preset(name);
  json j;
  try {
    j = json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw UsageError("--preset: " + path.string() + " is not valid JSON");
  }
  if (j.is_object() && j.contains("config")) j = j["config"];
  return config_from_json(j.dump(), base);
}

struct TrainFlags {
  std::string dataset;
  std::string bundle;
  std::string preset;
  std::string out;
  std::vector<Index> hidden;
  double lambda = 0.0;
  double dropout = 0.0;
  double lr = 0.0;
  double weight_decay = 0.0;
  Index refresh = 0;
  Index epochs = 0;
  Index patience = 0;
  std::uint64_t seed = 0;
  std::string mode;
  Index runs = 10;
  Index parallel = 1;
  bool resample = false;

  CLI::Option* hidden_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* dropout_opt = nullptr;
  CLI::Option* lr_opt = nullptr;
  CLI::Option* weight_decay_opt = nullptr;
  CLI::Option* refresh_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* patience_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* mode_opt = nullptr;

  void attach(CLI::App& app, Index default_runs) {
    runs = default_runs;
    app.add_option("--dataset", dataset, "Dataset name; its bundle is read from $MGCN_DATA_ROOT/<name> (default data/)");
    app.add_option("--bundle", bundle, "Path to a dataset bundle directory (overrides --dataset lookup)");
    app.add_option("--preset", preset, "Preset name (presets/<name>.json), preset file, or a metrics.json to replay");
    app.add_option("--out", out, "Output directory (default $MGCN_OUT_ROOT/<dataset>-<mode>, root defaults to runs/)");
    hidden_opt = app.add_option("--hidden", hidden,
                                "Comma-separated layer widths; a single value sets every layer width")
                     ->delimiter(',');
    lambda_opt = app.add_option("--lambda", lambda, "Weight of the Laplacian label-smoothing term");
    dropout_opt = app.add_option("--dropout", dropout, "Dropout rate in [0, 1)");
    lr_opt = app.add_option("--lr", lr, "Adam learning rate");
    weight_decay_opt = app.add_option("--weight-decay", weight_decay, "L2 penalty on layer weights");
    refresh_opt = app.add_option("--refresh", refresh, "Epochs between closed-form decision-layer refreshes");
    epochs_opt = app.add_option("--epochs", epochs, "Maximum training epochs");
    patience_opt = app.add_option("--patience", patience, "Early-stopping patience in epochs");
    seed_opt = app.add_option("--seed", seed, "Base seed; run i uses seed + i");
    mode_opt = app.add_option("--mode", mode, "full | om_only | lp_only | softmax");
    app.add_option("--runs", runs, "Number of seeds")->capture_default_str();
    app.add_option("--parallel-runs", parallel, "Seeds trained concurrently")->capture_default_str();
    app.add_flag("--resample-splits", resample, "Draw a fresh split per seed instead of the bundle split");
  }

  /// defaults < preset < overlay < flags
  TrainConfig resolve(const std::string& overlay = {}) const {
    TrainConfig cfg;
    if (!preset.empty()) cfg = apply_preset(preset, cfg);
    if (!overlay.empty()) cfg = config_from_json(overlay, cfg);
    if (hidden_opt->count() > 0) {
      if (hidden.size() == 1) {
        std::fill(cfg.hidden_dims.begin(), cfg.hidden_dims.end(), hidden.front());
      } else {
        cfg.hidden_dims = hidden;
      }
    }
    if (lambda_opt->count() > 0) cfg.lambda = lambda;
    if (dropout_opt->count() > 0) cfg.dropout = dropout;
    if (lr_opt->count() > 0) cfg.lr = lr;
    if (weight_decay_opt->count() > 0) cfg.weight_decay = weight_decay;
    if (refresh_opt->count() > 0) cfg.refresh_interval = refresh;
    if (epochs_opt->count() > 0) cfg.max_epochs = epochs;
    if (patience_opt->count() > 0) cfg.patience = patience;
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (mode_opt->count() > 0) cfg.mode = parse_mode(mode);
    // Class-count dependent checks run once the dataset is loaded.
    cfg.validate(0);
    if (runs < 1) throw UsageError("--runs: must be >= 1");
    if (parallel < 1) throw UsageError("--parallel-runs: must be >= 1");
    return cfg;
  }

  Bundle load() const {
    if (!bundle.empty()) return load_bundle(bundle);
    if (!dataset.empty()) return load_bundle(env_path("MGCN_DATA_ROOT", "data") / dataset);
    throw UsageError("--dataset or --bundle is required");
  }

  std::string dataset_name(const Bundle& b) const { return dataset.empty() ? b.dataset.name : dataset; }

  fs::path out_dir(const std::string& name, const std::string& suffix) const {
    if (!out.empty()) return out;
    return env_path("MGCN_OUT_ROOT", "runs") / (name + "-" + suffix);
  }

  RepeatOptions repeat_options(const fs::path& dir) const {
    RepeatOptions opts;
    opts.runs = runs;
    opts.parallel = parallel;
    opts.split_policy.resample = resample;
    opts.out_dir = dir;
    return opts;
  }
};

std::string percent(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << 100.0 * v;
  return ss.str();
}

void warn_violations(const RepeatedResult& result, std::ostream& err) {
  for (const auto& r : result.runs) {
    if (r.monotonicity_violations > 0) {
      err << "warning: seed " << r.seed << ": decision-layer objective rose in " << r.monotonicity_violations
          << " step(s)\n";
    }
  }
}

int cmd_train(const TrainFlags& flags, std::ostream& out, std::ostream& err) {
  TrainConfig cfg = flags.resolve();
  Bundle bundle = flags.load();
  cfg.validate(bundle.dataset.num_classes());
  const std::string name = flags.dataset_name(bundle);
  const fs::path dir = flags.out_dir(name, std::string(to_string(cfg.mode)));

  const RepeatedResult result = run_repeated(cfg, bundle.dataset, bundle.split, flags.repeat_options(dir));
  write_metrics(dir, name, cfg, result);
  warn_violations(result, err);
  out << name << " [" << to_string(cfg.mode) << "] test accuracy " << percent(result.mean) << " +/- "
      << percent(result.std) << " over " << result.runs.size() << " run(s); artifacts in " << dir.string() << '\n';
  return kOk;
}

int cmd_ablate(const TrainFlags& flags, std::ostream& out) {
  TrainConfig cfg = flags.resolve();
  Bundle bundle = flags.load();
  cfg.validate(bundle.dataset.num_classes());
  const std::string name = flags.dataset_name(bundle);
  const fs::path dir = flags.out_dir(name, "ablation");

  const auto rows = ablation_suite(bundle.dataset, bundle.split, cfg, flags.repeat_options(dir));
  json table = json::array();
  std::string csv = "mode,mean,std\n";
  out << std::left << std::setw(10) << "mode" << "  accuracy\n";
  for (const auto& row : rows) {
    const std::string mode(to_string(row.mode));
    TrainConfig mode_cfg = cfg;
    mode_cfg.mode = row.mode;
    write_metrics(dir / mode, name, mode_cfg, row.result);
    table.push_back({{"mode", mode}, {"mean", row.result.mean}, {"std", row.result.std}});
    csv += mode + ',' + std::to_string(row.result.mean) + ',' + std::to_string(row.result.std) + '\n';
    out << std::left << std::setw(10) << mode << "  " << percent(row.result.mean) << " +/- "
        << percent(row.result.std) << '\n';
  }
  std::ofstream(dir / "ablation.json") << json{{"dataset", name}, {"rows", table}}.dump(2) << '\n';
  std::ofstream(dir / "ablation.csv") << csv;
  return kOk;
}

// Cartesian product of the grid values in key order.
std::vector<json> expand_grid(const json& grid) {
  std::vector<json> combos{json::object()};
  for (const auto& [key, values] : grid.items()) {
    if (!values.is_array() || values.empty()) throw UsageError("--grid: '" + key + "' must be a non-empty array");
    std::vector<json> next;
    for (const auto& combo : combos) {
      for (const auto& v : values) {
        json c = combo;
        c[key] = v;
        next.push_back(std::move(c));
      }
    }
    combos = std::move(next);
  }
  return combos;
}

int cmd_sweep(const TrainFlags& flags, const std::string& grid_name, std::ostream& out) {
  json grid_file;
  try {
    grid_file = json::parse(slurp(resolve_preset(grid_name)));
  } catch (const json::exception&) {
    throw UsageError("--grid: not valid JSON");
  }
  if (!grid_file.contains("grid")) throw UsageError("--grid: file has no \"grid\" object");
  const TrainConfig start = flags.resolve(grid_file.contains("base") ? grid_file["base"].dump() : std::string());

  Bundle bundle = flags.load();
  const std::string name = flags.dataset_name(bundle);
  const fs::path dir = flags.out_dir(name, "sweep");
  fs::create_directories(dir);

  std::string csv = "index,overrides,val_mean,test_mean,test_std\n";
  json results = json::array();
  double best_val = -1.0;
  std::string best;
  const auto combos = expand_grid(grid_file["grid"]);
  for (std::size_t i = 0; i < combos.size(); ++i) {
    const TrainConfig cfg = config_from_json(combos[i].dump(), start);
    cfg.validate(bundle.dataset.num_classes());
    RepeatOptions opts = flags.repeat_options(dir / ("combo_" + std::to_string(i)));
    const RepeatedResult r = run_repeated(cfg, bundle.dataset, bundle.split, opts);
    double val = 0.0;
    for (const auto& run : r.runs) val += run.val_accuracy;
    val /= static_cast<double>(r.runs.size());
    std::string overrides = combos[i].dump();
    std::string quoted = "\"";
    for (char ch : overrides) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    quoted += '"';
    csv += std::to_string(i) + ',' + quoted + ',' + std::to_string(val) + ',' + std::to_string(r.mean) + ',' +
           std::to_string(r.std) + '\n';
    results.push_back({{"overrides", combos[i]}, {"val_mean", val}, {"test_mean", r.mean}, {"test_std", r.std}});
    out << '[' << i + 1 << '/' << combos.size() << "] " << overrides << "  val " << percent(val) << "  test "
        << percent(r.mean) << '\n';
    if (val > best_val) {
      best_val = val;
      best = overrides;
    }
  }
  std::ofstream(dir / "sweep.csv") << csv;
  std::ofstream(dir / "sweep.json") << json{{"dataset", name}, {"results", results}}.dump(2) << '\n';
  out << "best by validation accuracy: " << best << " (" << percent(best_val) << ")\n";
  return kOk;
}

struct ConvertFlags {
  std::string content, cites, pubmed_nodes, pubmed_edges, name, out;
  Index synthetic_nodes = 0;
  Index synthetic_classes = 4;
  Index synthetic_features = 200;
  SplitSizes sizes{};
  std::uint64_t split_seed = 0;
};

int cmd_convert(const ConvertFlags& f, std::ostream& out) {
  const int sources = static_cast<int>(!f.content.empty() || !f.cites.empty()) +
                      static_cast<int>(!f.pubmed_nodes.empty() || !f.pubmed_edges.empty()) +
                      static_cast<int>(f.synthetic_nodes > 0);
  if (sources != 1) {
    throw UsageError("convert: give exactly one of --content/--cites, --pubmed-nodes/--pubmed-edges or --synthetic-nodes");
  }
  LoadReport report;
  if (!f.content.empty() || !f.cites.empty()) {
    if (f.content.empty() || f.cites.empty()) throw UsageError("convert: --content and --cites go together");
    report = load_citation_text(f.content, f.cites);
  } else if (!f.pubmed_nodes.empty() || !f.pubmed_edges.empty()) {
    if (f.pubmed_nodes.empty() || f.pubmed_edges.empty()) {
      throw UsageError("convert: --pubmed-nodes and --pubmed-edges go together");
    }
    report = load_pubmed_tab(f.pubmed_nodes, f.pubmed_edges);
  } else {
    SyntheticSpec spec;
    spec.nodes = f.synthetic_nodes;
    spec.classes = f.synthetic_classes;
    spec.features = f.synthetic_features;
    Rng rng(f.split_seed);
    report.dataset = make_synthetic_citation(spec, rng);
  }
  Dataset& ds = report.dataset;
  if (!f.name.empty()) ds.name = f.name;

  Rng rng(f.split_seed);
  const Split split = make_planetoid_split(ds.labels, ds.num_classes(), f.sizes, rng);
  save_bundle(ds, split, f.out);

  out << "wrote " << f.out << ": " << ds.num_nodes() << " nodes, " << ds.num_features() << " features, "
      << ds.num_classes() << " classes, " << ds.graph.edge_count() << " undirected edges";
  if (report.edge_records > 0) {
    out << " (" << report.edge_records << " edge records, " << report.dropped_edges << " dropped for unknown ids)";
  }
  out << "; split " << split.train.size() << '/' << split.val.size() << '/' << split.test.size() << '\n';
  return kOk;
}

int cmd_eval(const std::string& checkpoint, const TrainFlags& flags, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const Bundle bundle = flags.load();
  const EvalResult r = evaluate_checkpoint(ckpt, bundle.dataset, bundle.split);
  out << "val accuracy " << percent(r.val_accuracy) << ", test accuracy " << percent(r.test_accuracy) << '\n';
  return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph convolutional network with a closed-form decision layer"};
  app.require_subcommand(1, 1);

  ConvertFlags convert_flags;
  auto* convert = app.add_subcommand("convert", "Build a dataset bundle from raw files");
  convert->add_option("--content", convert_flags.content, "Cora/Citeseer .content file");
  convert->add_option("--cites", convert_flags.cites, "Cora/Citeseer .cites file");
  convert->add_option("--pubmed-nodes", convert_flags.pubmed_nodes, "Pubmed-Diabetes.NODE.paper.tab");
  convert->add_option("--pubmed-edges", convert_flags.pubmed_edges, "Pubmed-Diabetes.DIRECTED.cites.tab");
  convert->add_option("--synthetic-nodes", convert_flags.synthetic_nodes, "Generate a planted-partition graph instead");
  convert->add_option("--synthetic-classes", convert_flags.synthetic_classes)->capture_default_str();
  convert->add_option("--synthetic-features", convert_flags.synthetic_features)->capture_default_str();
  convert->add_option("--name", convert_flags.name, "Dataset name stored in the bundle");
  convert->add_option("--out", convert_flags.out, "Bundle directory")->required();
  convert->add_option("--train-per-class", convert_flags.sizes.per_class_train)->capture_default_str();
  convert->add_option("--val", convert_flags.sizes.val, "Validation nodes")->capture_default_str();
  convert->add_option("--test", convert_flags.sizes.test, "Test nodes")->capture_default_str();
  convert->add_option("--split-seed", convert_flags.split_seed)->capture_default_str();

  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "Train over repeated seeds and export artifacts");
  train_flags.attach(*train, 10);

  TrainFlags ablate_flags;
  auto* ablate = app.add_subcommand("ablate", "Compare softmax, lp_only, om_only and full under shared seeds");
  ablate_flags.attach(*ablate, 10);

  TrainFlags sweep_flags;
  std::string grid = "grid_search";
  auto* sweep = app.add_subcommand("sweep", "Enumerate a hyperparameter grid");
  sweep_flags.attach(*sweep, 1);
  sweep->add_option("--grid", grid, "Grid file or preset name")->capture_default_str();

  TrainFlags eval_flags;
  std::string checkpoint;
  auto* eval = app.add_subcommand("eval", "Score a saved checkpoint on a bundle");
  eval->add_option("--checkpoint", checkpoint, "checkpoint.bin written by train")->required();
  eval->add_option("--dataset", eval_flags.dataset, "Dataset name under $MGCN_DATA_ROOT");
  eval->add_option("--bundle", eval_flags.bundle, "Bundle directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*convert) return cmd_convert(convert_flags, out);
    if (*train) return cmd_train(train_flags, out, err);
    if (*ablate) return cmd_ablate(ablate_flags, out);
    if (*sweep) return cmd_sweep(sweep_flags, grid, out);
    if (*eval) return cmd_eval(checkpoint, eval_flags, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace mgcn::cli
