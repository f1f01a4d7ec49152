#pragma once

#include <mgcn/graph.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace mgcn {

struct Dataset {
  std::string name;
  Matrix features;  // n x d
  std::vector<int> labels;
  std::vector<std::string> class_names;
  Graph graph;
  /// Original node identifiers; empty when nodes are anonymous.
  std::vector<std::string> node_names;

  Index num_nodes() const noexcept { return features.rows(); }
  Index num_features() const noexcept { return features.cols(); }
  Index num_classes() const noexcept { return static_cast<Index>(class_names.size()); }

  /// Throws DataError unless features are finite, labels lie in [0, c) and
  /// every class occurs.
  void validate() const;
};

struct Split {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;

  void validate(Index n) const;
  friend bool operator==(const Split&, const Split&) = default;
};

/// Result of parsing raw files; counts describe what the parser discarded.
struct LoadReport {
  Dataset dataset;
  std::size_t edge_records = 0;
  std::size_t dropped_edges = 0;
};

/// Cora/Citeseer text format: `<id> <f_1> ... <f_d> <label>` per content line
/// and `<cited> <citing>` per cites line. Ids map to indices in content
/// order, labels are factorised in first-appearance order and citations that
/// mention an unknown id are dropped and counted.
LoadReport load_citation_text(const std::filesystem::path& content_path, const std::filesystem::path& cites_path);

/// Pubmed-Diabetes tab format (`*.NODE.paper.tab`, `*.DIRECTED.cites.tab`).
LoadReport load_pubmed_tab(const std::filesystem::path& node_path, const std::filesystem::path& edge_path);

/// Divides each non-zero row by its sum; zero rows are left alone.
Matrix row_normalize(const Matrix& features);

struct SplitSizes {
  Index per_class_train = 20;
  Index val = 500;
  Index test = 1000;
};

/// Samples per_class_train nodes of every class for training, then val and
/// test nodes from the remainder. Each list is sorted.
Split make_planetoid_split(std::span<const int> labels, Index num_classes, const SplitSizes& sizes, Rng& rng);

/// Parameters of a planted-partition citation-like graph with bag-of-words features.
struct SyntheticSpec {
  Index nodes = 600;
  Index classes = 4;
  Index features = 200;
  double mean_degree = 4.0;
  /// Fraction of edges that stay inside a class.
  double homophily = 0.8;
  /// Active words per node; class-specific words take `signal` of them.
  Index words_per_node = 12;
  double signal = 0.5;
};

Dataset make_synthetic_citation(const SyntheticSpec& spec, Rng& rng);

inline constexpr int kBundleVersion = 1;

/// Canonical directory bundle: meta.json, features.bin (row-major little-endian
/// doubles), edges.tsv, labels.tsv and split.json. meta.json records a crc32 of
/// every other file.
void save_bundle(const Dataset& dataset, const Split& split, const std::filesystem::path& dir);

struct Bundle {
  Dataset dataset;
  Split split;
};

Bundle load_bundle(const std::filesystem::path& dir);

}  // namespace mgcn
