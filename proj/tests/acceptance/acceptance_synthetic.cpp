// Acceptance criteria that need no external data. One line per criterion.
#include "cli.hpp"
#include "oracles.hpp"
#include "report.hpp"

#include <mgcn/decision_layer.hpp>
#include <mgcn/gcn.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mgcn::acceptance {
namespace {

using testing::DenseMatrix;
using testing::gaussian;

void lemma_suite(Report& report) {
  Stopwatch clock;
  Rng rng(101);
  std::uniform_int_distribution<Index> cols_dist(1, 10);
  double worst_gap = 0.0;
  double worst_feasibility = 0.0;
  int beaten = 0;
  for (int instance = 0; instance < 200; ++instance) {
    const Index n = cols_dist(rng);
    const Index m = std::uniform_int_distribution<Index>(n, 20)(rng);
    Matrix p = gaussian(m, n, rng);
    if (instance % 4 == 0) {
      // Rank-deficient: rank r < n.
      const Index r = std::uniform_int_distribution<Index>(0, std::max<Index>(0, n - 1))(rng);
      p = r == 0 ? Matrix(Matrix::Zero(m, n)) : Matrix(gaussian(m, r, rng) * gaussian(r, n, rng));
    }
    const Matrix q = trace_max_orthogonal(p);
    worst_feasibility =
        std::max(worst_feasibility, (q.transpose() * q - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
    const double best = (q.transpose() * p).trace();
    worst_gap = std::max(worst_gap, std::abs(best - testing::nuclear_norm(p)));
    for (int k = 0; k < 1000; ++k) {
      if ((testing::random_orthonormal(m, n, rng).transpose() * p).trace() > best) ++beaten;
    }
  }
  const double secs = clock.seconds();
  report.check(1, worst_gap <= 1e-9 && worst_feasibility <= 1e-8 && beaten == 0 && secs < 10.0,
               "trace maximisation over orthonormal Q attains the nuclear norm",
               "200 instances, max |Tr(Q^T P) - ||P||_*| = " + fmt(worst_gap) + ", max |Q^T Q - I| = " +
                   fmt(worst_feasibility) + ", random Q beating optimum: " + std::to_string(beaten) + "/200000, " +
                   fmt(secs) + " s (limit 10 s)");
}

void soft_label_oracles(Report& report) {
  Stopwatch clock;
  Rng rng(202);
  double worst_direct = 0.0;
  double worst_descent = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const Index n = std::uniform_int_distribution<Index>(5, 40)(rng);
    const Index c = std::uniform_int_distribution<Index>(2, 4)(rng);
    const Index d = c + std::uniform_int_distribution<Index>(0, 4)(rng);
    const Index l = std::uniform_int_distribution<Index>(1, n / 2)(rng);
    const auto edges = testing::random_edges(n, 0.2, rng, true);
    const Graph g = build_graph(edges, n);
    const auto labeled = testing::random_subset(n, l, rng);
    const LaplacianBlocks blocks = partition_laplacian(laplacian(g), labeled);
    std::vector<int> classes;
    std::uniform_int_distribution<int> cls(0, static_cast<int>(c) - 1);
    for (Index k = 0; k < l; ++k) classes.push_back(cls(rng));
    const Matrix y_l = one_hot(classes, c);
    const Matrix h_u = gaussian(blocks.u, d, rng);
    const Matrix u = testing::random_orthonormal(d, c, rng);
    const double lambda = std::uniform_real_distribution<double>(0.1, 4.0)(rng);

    const DenseMatrix got = update_soft_labels(h_u, u, blocks, y_l, lambda);
    const DenseMatrix adj = testing::dense_adjacency(edges, n);
    const DenseMatrix z = h_u * u;
    worst_direct = std::max(worst_direct, (got - testing::dense_soft_labels(adj, labeled, z, y_l, lambda)).cwiseAbs().maxCoeff());
    worst_descent = std::max(
        worst_descent, (got - testing::descent_soft_labels(adj, labeled, z, y_l, lambda, 20000)).cwiseAbs().maxCoeff());
  }
  const double secs = clock.seconds();
  report.check(2, worst_direct <= 1e-10 && worst_descent <= 1e-4 && secs < 30.0,
               "soft-label update equals dense solve and gradient-descent minimiser",
               "50 graphs, max |dense - ours| = " + fmt(worst_direct) + " (<= 1e-10), max |descent - ours| = " +
                   fmt(worst_descent) + " (<= 1e-4), " + fmt(secs) + " s (limit 30 s)");
}

void laplacian_identity(Report& report) {
  Rng rng(303);
  double worst = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const Index n = std::uniform_int_distribution<Index>(2, 40)(rng);
    const Index c = std::uniform_int_distribution<Index>(1, 6)(rng);
    const auto edges = testing::random_edges(n, 0.25, rng, instance % 2 == 0);
    const Matrix y = gaussian(n, c, rng);
    const double pairwise = testing::pairwise_sum(testing::dense_adjacency(edges, n), y);
    const double trace = quadratic_form(laplacian(build_graph(edges, n)), y);
    worst = std::max(worst, std::abs(pairwise - 2.0 * trace) / std::max(1.0, std::abs(pairwise)));
  }
  report.check(3, worst <= 1e-9, "pairwise smoothness sum equals 2 Tr(Y^T L Y)",
               "100 instances, max relative error " + fmt(worst) + " (<= 1e-9)");
}

double composed_loss(const GcnModel& model, const SparseMatrix& k, const SparseMatrix& x, const Matrix& u,
                     const Matrix& y) {
  Rng unused(0);
  return (forward(model, k, x, {}, unused) * u - y).squaredNorm();
}

void gradient_check(Report& report) {
  Rng rng(404);
  const SparseMatrix kernel = normalized_kernel(testing::random_graph(12, 0.3, rng, true));
  const SparseMatrix x = SparseMatrix::from_dense(gaussian(12, 6, rng));
  const std::vector<Index> dims{6, 8, 4};
  GcnModel model = make_model(dims, rng);
  for (auto& layer : model.layers) layer.bias = gaussian(1, layer.out_dim(), rng) * 0.1;
  const Matrix u = testing::random_orthonormal(4, 3, rng);
  const Matrix y = gaussian(12, 3, rng);

  ForwardCache cache;
  const Matrix h = forward(model, kernel, x, {}, rng, &cache);
  const std::vector<Matrix> grads = backward(model, kernel, cache, embedding_gradient(h, u, y)).flatten();
  const std::vector<Matrix*> params = model.parameters();
  double worst = 0.0;
  Index checked = 0;
  const double eps = 1e-5;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (Index i = 0; i < params[p]->size(); ++i) {
      double& w = params[p]->data()[i];
      const double saved = w;
      w = saved + eps;
      const double plus = composed_loss(model, kernel, x, u, y);
      w = saved - eps;
      const double minus = composed_loss(model, kernel, x, u, y);
      w = saved;
      const double fd = (plus - minus) / (2 * eps);
      const double g = grads[p].data()[i];
      worst = std::max(worst, std::abs(fd - g) / std::max(1.0, std::abs(g)));
      ++checked;
    }
  }
  report.check(4, worst <= 1e-5, "backprop through GCN and decision term matches finite differences",
               std::to_string(checked) + " parameters, 2 layers, 12 nodes, max relative error " + fmt(worst) +
                   " (<= 1e-5)");
}

void inner_loop_monotonicity(Report& report) {
  Rng rng(505);
  Index violations = 0;
  double worst_rise = 0.0;
  Index steps = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const Index n = std::uniform_int_distribution<Index>(10, 60)(rng);
    const Index c = std::uniform_int_distribution<Index>(2, 5)(rng);
    const Index d = c + std::uniform_int_distribution<Index>(0, 6)(rng);
    const Index l = std::uniform_int_distribution<Index>(c, n / 2)(rng);
    const Graph g = testing::random_graph(n, 0.15, rng, instance % 3 == 0);
    const auto labeled = testing::random_subset(n, l, rng);
    const LaplacianBlocks blocks = partition_laplacian(laplacian(g), labeled);
    std::vector<int> classes;
    for (Index k = 0; k < l; ++k) classes.push_back(static_cast<int>(k % c));
    DecisionOptions opts;
    opts.lambda = std::pow(2.0, std::uniform_int_distribution<int>(-3, 3)(rng));
    opts.random_label_init = instance % 2 == 1;
    const DecisionSolution s = solve(gaussian(n, d, rng), one_hot(classes, c), blocks, opts, rng);
    violations += s.monotonicity_violations;
    for (std::size_t t = 1; t < s.objective_trace.size(); ++t) {
      worst_rise = std::max(worst_rise, s.objective_trace[t] - s.objective_trace[t - 1]);
      ++steps;
    }
  }
  report.check(5, violations == 0, "alternating decision-layer solve never raises the objective",
               "100 instances, " + std::to_string(steps) + " inner steps, violations beyond 1e-7: " +
                   std::to_string(violations) + ", largest rise " + fmt(worst_rise));
}

double median_epoch_seconds(const GcnModel& model, const SparseMatrix& kernel, const SparseMatrix& x, Rng& rng) {
  const Matrix grad = Matrix::Constant(kernel.rows(), model.output_dim(), 1e-3);
  std::vector<double> samples;
  for (int rep = 0; rep < 15; ++rep) {
    Stopwatch clock;
    ForwardCache cache;
    forward(model, kernel, x, {.dropout = 0.5, .training = true}, rng, &cache);
    backward(model, kernel, cache, grad);
    samples.push_back(clock.seconds());
  }
  std::nth_element(samples.begin(), samples.begin() + 7, samples.end());
  return samples[7];
}

void edge_scaling(Report& report) {
  Rng rng(606);
  const Index n = 4000;
  const Index d = 300;
  std::vector<Triplet> t;
  std::uniform_int_distribution<Index> col(0, d - 1);
  for (Index i = 0; i < n; ++i) {
    for (int k = 0; k < 20; ++k) t.push_back({i, col(rng), 0.05});
  }
  const SparseMatrix x = SparseMatrix::from_triplets(n, d, t, DuplicatePolicy::max);
  const std::vector<Index> dims{d, 64, 64};
  const GcnModel model = make_model(dims, rng);

  std::vector<double> times;
  std::vector<Index> edge_counts;
  std::uniform_int_distribution<Index> node(0, n - 1);
  for (Index target : {20000, 40000, 80000}) {
    std::vector<Edge> edges;
    while (static_cast<Index>(edges.size()) < target) {
      const Index a = node(rng);
      const Index b = node(rng);
      if (a != b) edges.push_back({a, b});
    }
    const Graph g = build_graph(edges, n);
    edge_counts.push_back(g.edge_count());
    times.push_back(median_epoch_seconds(model, normalized_kernel(g), x, rng));
  }
  const double r1 = times[1] / times[0];
  const double r2 = times[2] / times[1];
  std::string detail = "n=4000, d=300; |E| = ";
  for (std::size_t i = 0; i < 3; ++i) {
    detail += std::to_string(edge_counts[i]) + " -> " + fmt(times[i] * 1e3) + " ms" + (i < 2 ? ", " : "");
  }
  detail += "; ratios " + fmt(r1) + ", " + fmt(r2) + " (<= 2.5)";
  report.check(11, r1 <= 2.5 && r2 <= 2.5, "epoch cost grows at most linearly with edge count", detail);
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mgcn");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void determinism(Report& report) {
  const auto root = testing::scratch_dir("determinism");
  const std::string bundle = (root / "bundle").string();
  bool ok = run_cli({"convert", "--synthetic-nodes", "300", "--synthetic-classes", "4", "--val", "60", "--test", "120",
                     "--train-per-class", "8", "--out", bundle}) == 0;
  for (const char* name : {"a", "b"}) {
    ok = ok && run_cli({"train", "--bundle", bundle, "--hidden", "32,16", "--epochs", "40", "--refresh", "10",
                        "--seed", "17", "--runs", "3", "--out", (root / name).string()}) == 0;
  }
  const std::string a = read_all(root / "a" / "metrics.json");
  const std::string b = read_all(root / "b" / "metrics.json");
  report.check(12, ok && !a.empty() && a == b, "identical config and seed give bit-identical metrics.json",
               "two 3-seed runs, " + std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different"));
}

}  // namespace
}  // namespace mgcn::acceptance

int main() {
  using namespace mgcn::acceptance;
  Report report;
  lemma_suite(report);
  soft_label_oracles(report);
  laplacian_identity(report);
  gradient_check(report);
  inner_loop_monotonicity(report);
  edge_scaling(report);
  determinism(report);
  std::cout << report.passes() << " passed, " << report.failures() << " failed" << std::endl;
  return report.failures() > 0 ? 1 : 0;
}
