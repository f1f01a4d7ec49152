#include <mgcn/decision_layer.hpp>
#include <mgcn/gcn.hpp>

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace mgcn;

constexpr Index kNodes = 4000;
constexpr Index kFeatures = 256;

Graph random_graph(Index n, Index edges, Rng& rng) {
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::vector<Edge> list;
  list.reserve(static_cast<std::size_t>(edges));
  while (static_cast<Index>(list.size()) < edges) {
    const Index a = pick(rng);
    const Index b = pick(rng);
    if (a != b) list.push_back({a, b});
  }
  return build_graph(list, n);
}

SparseMatrix sparse_features(Index n, Index d, Index per_row, Rng& rng) {
  std::uniform_int_distribution<Index> col(0, d - 1);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < per_row; ++k) t.push_back({i, col(rng), 1.0 / static_cast<double>(per_row)});
  }
  return SparseMatrix::from_triplets(n, d, t, DuplicatePolicy::max);
}

// One training epoch of the network: dropout forward plus backward.
void BM_EpochForwardBackward(benchmark::State& state) {
  Rng rng(7);
  const Graph g = random_graph(kNodes, state.range(0), rng);
  const SparseMatrix kernel = normalized_kernel(g);
  const SparseMatrix x = sparse_features(kNodes, kFeatures, 16, rng);
  const std::vector<Index> dims{kFeatures, 64, 64};
  const GcnModel model = make_model(dims, rng);
  const Matrix grad = Matrix::Constant(kNodes, 64, 1e-3);
  for (auto _ : state) {
    ForwardCache cache;
    Matrix h = forward(model, kernel, x, {.dropout = 0.5, .training = true}, rng, &cache);
    BackwardResult r = backward(model, kernel, cache, grad);
    benchmark::DoNotOptimize(h.data());
    benchmark::DoNotOptimize(r.layers.front().weight.data());
  }
  state.counters["edges"] = static_cast<double>(g.edge_count());
}
BENCHMARK(BM_EpochForwardBackward)->Arg(8000)->Arg(16000)->Arg(32000)->Unit(benchmark::kMillisecond);

void BM_DecisionSolve(benchmark::State& state) {
  Rng rng(11);
  const Index n = state.range(0);
  const Index c = 7;
  const Graph g = random_graph(n, 2 * n, rng);
  std::vector<Index> labeled;
  std::vector<int> classes;
  for (Index i = 0; i < n; i += 20) {
    labeled.push_back(i);
    classes.push_back(static_cast<int>((i / 20) % c));
  }
  const LaplacianBlocks blocks = partition_laplacian(laplacian(g), labeled);
  std::normal_distribution<double> normal;
  Matrix h(n, 64);
  for (Index i = 0; i < h.size(); ++i) h.data()[i] = normal(rng);
  const Matrix y_l = one_hot(classes, c);
  for (auto _ : state) {
    Rng solve_rng(3);
    DecisionSolution s = solve(h, y_l, blocks, {}, solve_rng);
    benchmark::DoNotOptimize(s.objective);
  }
}
BENCHMARK(BM_DecisionSolve)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
