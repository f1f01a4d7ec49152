#include <mgcn/trainer.hpp>

#include <mgcn/artifacts.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace mgcn {

std::vector<std::pair<Index, double>> RunResult::objective_trace() const {
  std::vector<std::pair<Index, double>> out;
  out.reserve(history.size());
  for (const auto& r : history) out.emplace_back(r.epoch, r.objective);
  return out;
}

double evaluate_accuracy(const Matrix& scores, std::span<const int> labels, std::span<const Index> nodes) {
  if (nodes.empty()) throw InvalidArgument("evaluate_accuracy: empty index set");
  if (static_cast<Index>(labels.size()) != scores.rows()) throw InvalidArgument("evaluate_accuracy: label count mismatch");
  Index correct = 0;
  for (Index i : nodes) {
    if (i < 0 || i >= scores.rows()) throw InvalidArgument("evaluate_accuracy: node index out of range");
    Index best = 0;
    for (Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    if (best == labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

std::pair<double, Matrix> softmax_cross_entropy(const Matrix& logits, std::span<const int> labels,
                                                std::span<const Index> nodes) {
  if (nodes.empty()) throw InvalidArgument("softmax_cross_entropy: empty index set");
  Matrix grad = Matrix::Zero(logits.rows(), logits.cols());
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(nodes.size());
  for (Index i : nodes) {
    const double shift = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(i).array() - shift).exp();
    const double z = e.sum();
    const int y = labels[static_cast<std::size_t>(i)];
    loss -= (logits(i, y) - shift - std::log(z)) * scale;
    grad.row(i) = e / z * scale;
    grad(i, y) -= scale;
  }
  return {loss, grad};
}

namespace {

struct Problem {
  SparseMatrix kernel;
  SparseMatrix features;
  std::optional<LaplacianBlocks> blocks;
  Matrix y_labeled;  // rows in labeled-first order
  std::vector<Index> train;
};

Problem prepare(const TrainConfig& config, const Dataset& dataset, const Split& split) {
  dataset.validate();
  split.validate(dataset.num_nodes());
  config.validate(dataset.num_classes());
  if (split.test.empty()) throw InvalidArgument("split: empty test set");

  Problem p;
  p.kernel = normalized_kernel(dataset.graph);
  p.features = SparseMatrix::from_dense(config.normalize_features ? row_normalize(dataset.features) : dataset.features);
  p.train = split.train;
  std::sort(p.train.begin(), p.train.end());
  if (config.mode != Mode::softmax) {
    p.blocks = partition_laplacian(laplacian(dataset.graph), p.train);
    std::vector<int> classes;
    for (Index k = 0; k < p.blocks->l; ++k) classes.push_back(dataset.labels[p.blocks->order[k]]);
    p.y_labeled = one_hot(classes, dataset.num_classes());
  }
  return p;
}

std::vector<Index> layer_dims(const TrainConfig& config, const Dataset& dataset) {
  std::vector<Index> dims{dataset.num_features()};
  dims.insert(dims.end(), config.hidden_dims.begin(), config.hidden_dims.end());
  if (!uses_decision_layer(config.mode)) dims.back() = dataset.num_classes();
  return dims;
}

void check_finite(double value, Index epoch) {
  if (!std::isfinite(value)) {
    throw NumericError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
  }
}

class Trainer {
 public:
  Trainer(const TrainConfig& config, const Dataset& dataset, const Split& split)
      : config_(config), dataset_(dataset), split_(split), problem_(prepare(config, dataset, split)),
        rng_(config.seed) {
    const auto dims = layer_dims(config, dataset);
    model_ = make_model(dims, rng_);
    decision_options_.lambda = config.effective_lambda();
    decision_options_.tolerance = config.inner_tol;
    decision_options_.max_iterations = config.inner_max_iter;
    decision_options_.random_label_init = config.random_label_init;
  }

  TrainOutput run() {
    const auto start = std::chrono::steady_clock::now();
    TrainOutput out;
    RunResult& result = out.result;
    result.seed = config_.seed;

    if (uses_decision_layer(config_.mode)) {
      train_decision(out);
    } else {
      train_softmax(out);
    }

    result.val_accuracy = split_.val.empty() ? 0.0 : evaluate_accuracy(out.scores, dataset_.labels, split_.val);
    result.test_accuracy = evaluate_accuracy(out.scores, dataset_.labels, split_.test);
    out.predictions = argmax_rows(out.scores);
    out.model = model_;
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }

 private:
  Matrix embed() {
    return forward(model_, problem_.kernel, problem_.features, {config_.dropout, false}, rng_);
  }

  void add_weight_decay(std::vector<Matrix>& grads) const {
    if (config_.weight_decay == 0.0) return;
    for (std::size_t a = 0; a < model_.layers.size(); ++a) grads[2 * a] += config_.weight_decay * model_.layers[a].weight;
  }

  void record(RunResult& result, Index epoch, double objective, const Matrix& scores) const {
    check_finite(objective, epoch);
    EpochRecord r;
    r.epoch = epoch;
    r.objective = objective;
    r.val_accuracy = split_.val.empty() ? 0.0 : evaluate_accuracy(scores, dataset_.labels, split_.val);
    r.test_accuracy = evaluate_accuracy(scores, dataset_.labels, split_.test);
    result.history.push_back(r);
  }

  static void count_violations(RunResult& result, const DecisionSolution& sol) {
    result.monotonicity_violations += sol.monotonicity_violations;
    if (sol.objective > sol.objective_trace.front() + 1e-7) ++result.monotonicity_violations;
  }

  // Keeps the parameters with the best validation accuracy; returns true
  // when patience ran out.
  template <typename Snapshot>
  bool early_stop(RunResult& result, Snapshot&& snapshot) {
    const auto& last = result.history.back();
    if (split_.val.empty() || last.val_accuracy > best_val_) {
      best_val_ = last.val_accuracy;
      result.best_epoch = last.epoch;
      best_model_ = model_;
      snapshot();
      stale_ = 0;
      return false;
    }
    return ++stale_ >= config_.patience;
  }

  void train_decision(TrainOutput& out) {
    RunResult& result = out.result;
    const LaplacianBlocks& blocks = *problem_.blocks;
    const double lambda = decision_options_.lambda;

    Matrix h = blocks.to_labeled_first(embed());
    DecisionSolution sol = solve(h, problem_.y_labeled, blocks, decision_options_, rng_);
    count_violations(result, sol);
    DecisionSolution best_sol = sol;
    record(result, 0, sol.objective, blocks.to_original(sol.labels.stacked()));
    early_stop(result, [&] { best_sol = sol; });

    for (Index epoch = 1; epoch <= config_.max_epochs; ++epoch) {
      ForwardCache cache;
      const Matrix h_train =
          forward(model_, problem_.kernel, problem_.features, {config_.dropout, true}, rng_, &cache);
      const Matrix target = blocks.to_original(sol.labels.stacked());
      Matrix grad = embedding_gradient(h_train, sol.projection.projector, target);
      if (config_.labeled_only_loss) {
        for (Index i = 0; i < blocks.u; ++i) grad.row(blocks.unlabeled_node(i)).setZero();
      }
      auto grads = backward(model_, problem_.kernel, cache, grad).flatten();
      add_weight_decay(grads);
      adam_step(model_.parameters(), grads, adam_, config_.lr);
      result.epochs_run = epoch;

      h = blocks.to_labeled_first(embed());
      Matrix y_u;
      if (epoch % config_.refresh_interval == 0) {
        sol = solve(h, problem_.y_labeled, blocks, decision_options_, rng_, &sol);
        count_violations(result, sol);
        y_u = sol.labels.unlabeled;
      } else {
        y_u = update_soft_labels(h.bottomRows(blocks.u), sol.projection.projector, blocks, problem_.y_labeled, lambda,
                                 decision_options_.cg);
      }
      const double obj =
          objective(h, sol.projection.projector, problem_.y_labeled, sol.labels.unlabeled, blocks, lambda);
      record(result, epoch, obj, blocks.to_original(LabelState{problem_.y_labeled, y_u}.stacked()));
      if (early_stop(result, [&] { best_sol = sol; })) break;
    }

    model_ = best_model_;
    const Matrix embedding = embed();
    DecisionSolution final_sol =
        solve(blocks.to_labeled_first(embedding), problem_.y_labeled, blocks, decision_options_, rng_, &best_sol);
    count_violations(result, final_sol);
    out.scores = blocks.to_original(final_sol.labels.stacked());
    out.embedding = embedding;
    out.decision = std::move(final_sol);
  }

  void train_softmax(TrainOutput& out) {
    RunResult& result = out.result;
    const auto& labels = dataset_.labels;

    Matrix logits = embed();
    record(result, 0, softmax_cross_entropy(logits, labels, problem_.train).first, logits);
    early_stop(result, [] {});

    for (Index epoch = 1; epoch <= config_.max_epochs; ++epoch) {
      ForwardCache cache;
      const Matrix train_logits =
          forward(model_, problem_.kernel, problem_.features, {config_.dropout, true}, rng_, &cache);
      auto [loss, grad] = softmax_cross_entropy(train_logits, labels, problem_.train);
      check_finite(loss, epoch);
      auto grads = backward(model_, problem_.kernel, cache, grad).flatten();
      add_weight_decay(grads);
      adam_step(model_.parameters(), grads, adam_, config_.lr);
      result.epochs_run = epoch;

      logits = embed();
      record(result, epoch, softmax_cross_entropy(logits, labels, problem_.train).first, logits);
      if (early_stop(result, [] {})) break;
    }

    model_ = best_model_;
    out.embedding = embed();
    if (config_.mode == Mode::lp_only) {
      const LaplacianBlocks& blocks = *problem_.blocks;
      const Matrix y_u = harmonic_propagation(blocks, problem_.y_labeled);
      out.scores = blocks.to_original(LabelState{problem_.y_labeled, y_u}.stacked());
    } else {
      out.scores = out.embedding;
    }
  }

  const TrainConfig& config_;
  const Dataset& dataset_;
  const Split& split_;
  Problem problem_;
  Rng rng_;
  GcnModel model_;
  GcnModel best_model_;
  AdamState adam_;
  DecisionOptions decision_options_;
  double best_val_ = -1.0;
  Index stale_ = 0;
};

}  // namespace

TrainOutput train_once(const TrainConfig& config, const Dataset& dataset, const Split& split) {
  return Trainer(config, dataset, split).run();
}

RepeatedResult run_repeated(const TrainConfig& config, const Dataset& dataset, const Split& split,
                            const RepeatOptions& options) {
  if (options.runs < 1) throw InvalidArgument("runs: must be >= 1");
  if (options.parallel < 1) throw InvalidArgument("parallel-runs: must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  RepeatedResult out;
  out.runs.resize(static_cast<std::size_t>(options.runs));
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (Index i = next++; i < options.runs; i = next++) {
      try {
        TrainConfig cfg = config;
        cfg.seed = config.seed + static_cast<std::uint64_t>(i);
        Split run_split = split;
        if (options.split_policy.resample) {
          Rng split_rng(cfg.seed);
          run_split = make_planetoid_split(dataset.labels, dataset.num_classes(), options.split_policy.sizes, split_rng);
        }
        TrainOutput run = train_once(cfg, dataset, run_split);
        if (options.out_dir) {
          export_artifacts(run, dataset, cfg, *options.out_dir / ("run_" + std::to_string(i)));
        }
        out.runs[static_cast<std::size_t>(i)] = std::move(run.result);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = options.runs;
      }
    }
  };

  const Index threads = std::min(options.parallel, options.runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (Index t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  double sum = 0.0;
  for (const auto& r : out.runs) sum += r.test_accuracy;
  out.mean = sum / static_cast<double>(out.runs.size());
  double sq = 0.0;
  for (const auto& r : out.runs) sq += (r.test_accuracy - out.mean) * (r.test_accuracy - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(out.runs.size()));
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<AblationRow> ablation_suite(const Dataset& dataset, const Split& split, const TrainConfig& base,
                                        const RepeatOptions& options) {
  std::vector<AblationRow> rows;
  for (Mode mode : {Mode::softmax, Mode::lp_only, Mode::om_only, Mode::full}) {
    TrainConfig cfg = base;
    cfg.mode = mode;
    RepeatOptions opts = options;
    if (options.out_dir) opts.out_dir = *options.out_dir / std::string(to_string(mode));
    rows.push_back({mode, run_repeated(cfg, dataset, split, opts)});
  }
  return rows;
}

Checkpoint make_checkpoint(const TrainOutput& output, const TrainConfig& config) {
  Checkpoint ckpt;
  ckpt.model = output.model;
  ckpt.seed = config.seed;
  if (output.decision) ckpt.projector = output.decision->projection.projector;
  ckpt.metadata = config_to_json(config);
  return ckpt;
}

EvalResult evaluate_checkpoint(const Checkpoint& checkpoint, const Dataset& dataset, const Split& split) {
  const TrainConfig config = config_from_json(checkpoint.metadata);
  const Problem problem = prepare(config, dataset, split);
  Rng unused(config.seed);
  const Matrix h = forward(checkpoint.model, problem.kernel, problem.features, {config.dropout, false}, unused);

  Matrix scores;
  if (uses_decision_layer(config.mode)) {
    const LaplacianBlocks& blocks = *problem.blocks;
    if (checkpoint.projector.rows() != h.cols() || checkpoint.projector.cols() != dataset.num_classes()) {
      throw DataError("checkpoint: projector shape does not match the model and dataset");
    }
    const Matrix hp = blocks.to_labeled_first(h);
    const Matrix y_u = update_soft_labels(hp.bottomRows(blocks.u), checkpoint.projector, blocks, problem.y_labeled,
                                          config.effective_lambda());
    scores = blocks.to_original(LabelState{problem.y_labeled, y_u}.stacked());
  } else if (config.mode == Mode::lp_only) {
    const LaplacianBlocks& blocks = *problem.blocks;
    scores = blocks.to_original(LabelState{problem.y_labeled, harmonic_propagation(blocks, problem.y_labeled)}.stacked());
  } else {
    scores = h;
  }

  EvalResult result;
  result.val_accuracy = split.val.empty() ? 0.0 : evaluate_accuracy(scores, dataset.labels, split.val);
  result.test_accuracy = evaluate_accuracy(scores, dataset.labels, split.test);
  result.predictions = argmax_rows(scores);
  return result;
}

}  // namespace mgcn
