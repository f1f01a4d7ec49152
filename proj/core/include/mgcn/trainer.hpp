#pragma once

#include <mgcn/checkpoint.hpp>
#include <mgcn/config.hpp>
#include <mgcn/dataset.hpp>
#include <mgcn/decision_layer.hpp>

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace mgcn {

/// One line of convergence.csv. Epoch 0 is the state before any update.
struct EpochRecord {
  Index epoch = 0;
  double objective = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct RunResult {
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  double val_accuracy = 0.0;
  Index epochs_run = 0;
  /// Epoch whose parameters were kept by early stopping.
  Index best_epoch = 0;
  std::vector<EpochRecord> history;
  double wall_time = 0.0;
  /// Decision-layer solves whose objective rose above its starting value or
  /// between inner iterations (beyond 1e-7).
  Index monotonicity_violations = 0;

  std::vector<std::pair<Index, double>> objective_trace() const;
};

struct TrainOutput {
  RunResult result;
  GcnModel model;
  /// Final decision-layer state (labeled-first rows); absent for softmax heads.
  std::optional<DecisionSolution> decision;
  /// Inference-mode H^(m) of the kept model, rows in node order.
  Matrix embedding;
  /// Class scores per node (node order) used for the reported accuracies.
  Matrix scores;
  std::vector<int> predictions;
};

/// Algorithm loop: forward, periodic closed-form refresh of the decision
/// layer, backprop of ||H U - Y||^2 with (U, Y) held, Adam, early stopping on
/// validation accuracy. Softmax-headed modes train with cross-entropy.
TrainOutput train_once(const TrainConfig& config, const Dataset& dataset, const Split& split);

/// Fraction of `nodes` whose row argmax (ties to the lowest class) matches the label.
double evaluate_accuracy(const Matrix& scores, std::span<const int> labels, std::span<const Index> nodes);

/// Mean cross-entropy over `nodes` and its gradient w.r.t. the logits.
std::pair<double, Matrix> softmax_cross_entropy(const Matrix& logits, std::span<const int> labels,
                                                std::span<const Index> nodes);

struct SplitPolicy {
  /// Draw a fresh planetoid split per run (seed + i) instead of reusing the given one.
  bool resample = false;
  SplitSizes sizes{};
};

struct RepeatOptions {
  Index runs = 10;
  Index parallel = 1;
  SplitPolicy split_policy{};
  /// When set, every run is exported to <out_dir>/run_<i>/.
  std::optional<std::filesystem::path> out_dir;
};

struct RepeatedResult {
  double mean = 0.0;
  /// Population standard deviation.
  double std = 0.0;
  std::vector<RunResult> runs;
  double wall_time = 0.0;
};

/// Runs seeds config.seed, config.seed + 1, ... and aggregates test accuracy.
RepeatedResult run_repeated(const TrainConfig& config, const Dataset& dataset, const Split& split,
                            const RepeatOptions& options);

struct AblationRow {
  Mode mode = Mode::full;
  RepeatedResult result;
};

/// softmax, lp_only, om_only and full under the same seeds.
std::vector<AblationRow> ablation_suite(const Dataset& dataset, const Split& split, const TrainConfig& base,
                                        const RepeatOptions& options);

Checkpoint make_checkpoint(const TrainOutput& output, const TrainConfig& config);

struct EvalResult {
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::vector<int> predictions;
};

/// Recomputes predictions from a checkpoint; matches the run that wrote it.
EvalResult evaluate_checkpoint(const Checkpoint& checkpoint, const Dataset& dataset, const Split& split);

}  // namespace mgcn
