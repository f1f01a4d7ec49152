#include <mgcn/dataset.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace mgcn {

void Dataset::validate() const {
  const Index n = features.rows();
  if (static_cast<Index>(labels.size()) != n) throw DataError("dataset: label count does not match feature rows");
  if (graph.n != n) throw DataError("dataset: graph node count does not match feature rows");
  if (!node_names.empty() && static_cast<Index>(node_names.size()) != n) {
    throw DataError("dataset: node name count does not match feature rows");
  }
  if (!features.allFinite()) throw DataError("dataset: non-finite feature value");
  std::vector<char> seen(class_names.size(), 0);
  for (int y : labels) {
    if (y < 0 || y >= static_cast<int>(class_names.size())) throw DataError("dataset: label out of range");
    seen[static_cast<std::size_t>(y)] = 1;
  }
  for (std::size_t c = 0; c < seen.size(); ++c) {
    if (!seen[c]) throw DataError("dataset: class '" + class_names[c] + "' has no nodes");
  }
}

void Split::validate(Index n) const {
  if (train.empty()) throw DataError("split: empty training set");
  std::vector<char> owner(static_cast<std::size_t>(n), 0);
  const auto mark = [&](const std::vector<Index>& part, const char* name) {
    for (Index i : part) {
      if (i < 0 || i >= n) throw DataError(std::string("split: ") + name + " index out of range");
      if (owner[static_cast<std::size_t>(i)]) throw DataError(std::string("split: ") + name + " overlaps another set");
      owner[static_cast<std::size_t>(i)] = 1;
    }
  };
  mark(train, "train");
  mark(val, "val");
  mark(test, "test");
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto tab = line.find('\t');
    out.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().remove_suffix(1);
  return out;
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw DataError(where + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

struct LabelFactorizer {
  std::unordered_map<std::string, int> index;
  std::vector<std::string> names;

  int operator()(std::string_view name) {
    auto [it, inserted] = index.emplace(std::string(name), static_cast<int>(names.size()));
    if (inserted) names.emplace_back(name);
    return it->second;
  }
};

}  // namespace

LoadReport load_citation_text(const std::filesystem::path& content_path, const std::filesystem::path& cites_path) {
  LoadReport report;
  Dataset& ds = report.dataset;
  ds.name = content_path.stem().string();

  std::unordered_map<std::string, Index> id_of;
  std::vector<std::vector<double>> rows;
  LabelFactorizer factorize;
  std::size_t width = 0;

  auto content = open(content_path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(content, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    const std::string where = content_path.filename().string() + ":" + std::to_string(line_no);
    if (fields.size() < 3) throw DataError(where + ": expected id, features and label");
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw DataError(where + ": " + std::to_string(fields.size()) + " columns, expected " + std::to_string(width));
    }
    if (!id_of.emplace(std::string(fields.front()), static_cast<Index>(rows.size())).second) {
      throw DataError(where + ": duplicate node id '" + std::string(fields.front()) + "'");
    }
    std::vector<double> row;
    row.reserve(width - 2);
    for (std::size_t k = 1; k + 1 < fields.size(); ++k) row.push_back(parse_double(fields[k], where));
    rows.push_back(std::move(row));
    ds.node_names.emplace_back(fields.front());
    ds.labels.push_back(factorize(fields.back()));
  }
  if (rows.empty()) throw DataError(content_path.string() + ": no nodes");

  const Index n = static_cast<Index>(rows.size());
  ds.features.resize(n, static_cast<Index>(width - 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < ds.features.cols(); ++j) ds.features(i, j) = rows[i][j];
  }
  ds.class_names = std::move(factorize.names);

  std::vector<Edge> edges;
  auto cites = open(cites_path);
  line_no = 0;
  while (std::getline(cites, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 2) {
      throw DataError(cites_path.filename().string() + ":" + std::to_string(line_no) + ": expected two node ids");
    }
    ++report.edge_records;
    const auto a = id_of.find(std::string(fields[0]));
    const auto b = id_of.find(std::string(fields[1]));
    if (a == id_of.end() || b == id_of.end()) {
      ++report.dropped_edges;
      continue;
    }
    edges.push_back({a->second, b->second, 1.0});
  }
  if (report.edge_records == 0) throw DataError(cites_path.string() + ": no citations");
  ds.graph = build_graph(edges, n);
  ds.validate();
  return report;
}

LoadReport load_pubmed_tab(const std::filesystem::path& node_path, const std::filesystem::path& edge_path) {
  LoadReport report;
  Dataset& ds = report.dataset;
  ds.name = "pubmed";

  auto nodes = open(node_path);
  std::string line;
  if (!std::getline(nodes, line)) throw DataError(node_path.string() + ": empty file");
  if (!std::getline(nodes, line)) throw DataError(node_path.string() + ": missing feature declaration line");

  std::unordered_map<std::string, Index> feature_of;
  for (auto field : split_tabs(line)) {
    // numeric:<name>:<default>
    if (!field.starts_with("numeric:")) continue;
    field.remove_prefix(8);
    const auto colon = field.rfind(':');
    feature_of.emplace(std::string(field.substr(0, colon)), static_cast<Index>(feature_of.size()));
  }
  if (feature_of.empty()) throw DataError(node_path.string() + ": no numeric feature declarations");

  std::unordered_map<std::string, Index> id_of;
  std::vector<std::vector<std::pair<Index, double>>> rows;
  LabelFactorizer factorize;
  std::size_t line_no = 2;
  while (std::getline(nodes, line)) {
    ++line_no;
    const auto fields = split_tabs(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    const std::string where = node_path.filename().string() + ":" + std::to_string(line_no);
    if (fields.size() < 2) throw DataError(where + ": expected id and label");
    if (!id_of.emplace(std::string(fields[0]), static_cast<Index>(rows.size())).second) {
      throw DataError(where + ": duplicate node id");
    }
    std::vector<std::pair<Index, double>> row;
    bool has_label = false;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const auto eq = fields[k].find('=');
      if (eq == std::string_view::npos) throw DataError(where + ": field without '='");
      const auto key = fields[k].substr(0, eq);
      const auto value = fields[k].substr(eq + 1);
      if (key == "label") {
        ds.labels.push_back(factorize(value));
        has_label = true;
      } else if (key != "summary") {
        const auto it = feature_of.find(std::string(key));
        if (it == feature_of.end()) throw DataError(where + ": undeclared feature '" + std::string(key) + "'");
        row.emplace_back(it->second, parse_double(value, where));
      }
    }
    if (!has_label) throw DataError(where + ": missing label");
    rows.push_back(std::move(row));
    ds.node_names.emplace_back(fields[0]);
  }
  if (rows.empty()) throw DataError(node_path.string() + ": no nodes");

  const Index n = static_cast<Index>(rows.size());
  ds.features = Matrix::Zero(n, static_cast<Index>(feature_of.size()));
  for (Index i = 0; i < n; ++i) {
    for (const auto& [j, v] : rows[i]) ds.features(i, j) = v;
  }
  ds.class_names = std::move(factorize.names);

  auto edge_in = open(edge_path);
  std::vector<Edge> edges;
  line_no = 0;
  while (std::getline(edge_in, line)) {
    ++line_no;
    const auto fields = split_tabs(line);
    if (fields.size() < 4) continue;  // header lines
    const auto strip = [](std::string_view s) {
      const auto colon = s.find(':');
      return colon == std::string_view::npos ? s : s.substr(colon + 1);
    };
    ++report.edge_records;
    const auto a = id_of.find(std::string(strip(fields[1])));
    const auto b = id_of.find(std::string(strip(fields[3])));
    if (a == id_of.end() || b == id_of.end()) {
      ++report.dropped_edges;
      continue;
    }
    edges.push_back({a->second, b->second, 1.0});
  }
  if (report.edge_records == 0) throw DataError(edge_path.string() + ": no edges");
  ds.graph = build_graph(edges, n);
  ds.validate();
  return report;
}

Matrix row_normalize(const Matrix& features) {
  Matrix out = features;
  for (Index i = 0; i < out.rows(); ++i) {
    const double s = out.row(i).sum();
    if (s != 0.0) out.row(i) /= s;
  }
  return out;
}

Split make_planetoid_split(std::span<const int> labels, Index num_classes, const SplitSizes& sizes, Rng& rng) {
  if (sizes.per_class_train < 1) throw InvalidArgument("make_planetoid_split: per_class_train must be >= 1");
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) throw InvalidArgument("make_planetoid_split: label out of range");
    members[static_cast<std::size_t>(labels[i])].push_back(static_cast<Index>(i));
  }

  Split split;
  std::vector<char> used(labels.size(), 0);
  for (Index c = 0; c < num_classes; ++c) {
    auto& m = members[static_cast<std::size_t>(c)];
    if (static_cast<Index>(m.size()) < sizes.per_class_train) {
      throw InvalidArgument("make_planetoid_split: class " + std::to_string(c) + " has " + std::to_string(m.size()) +
                            " nodes, fewer than " + std::to_string(sizes.per_class_train));
    }
    std::shuffle(m.begin(), m.end(), rng);
    for (Index k = 0; k < sizes.per_class_train; ++k) {
      split.train.push_back(m[k]);
      used[static_cast<std::size_t>(m[k])] = 1;
    }
  }

  std::vector<Index> rest;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!used[i]) rest.push_back(static_cast<Index>(i));
  }
  if (static_cast<Index>(rest.size()) < sizes.val + sizes.test) {
    throw InvalidArgument("make_planetoid_split: " + std::to_string(rest.size()) +
                          " nodes left, not enough for the requested validation and test sets");
  }
  std::shuffle(rest.begin(), rest.end(), rng);
  split.val.assign(rest.begin(), rest.begin() + sizes.val);
  split.test.assign(rest.begin() + sizes.val, rest.begin() + sizes.val + sizes.test);

  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Dataset make_synthetic_citation(const SyntheticSpec& spec, Rng& rng) {
  if (spec.classes < 1 || spec.nodes < spec.classes || spec.features < spec.classes) {
    throw InvalidArgument("make_synthetic_citation: need nodes >= classes and features >= classes");
  }
  Dataset ds;
  ds.name = "synthetic";
  for (Index c = 0; c < spec.classes; ++c) ds.class_names.push_back("class" + std::to_string(c));

  ds.labels.resize(static_cast<std::size_t>(spec.nodes));
  for (Index i = 0; i < spec.nodes; ++i) ds.labels[i] = static_cast<int>(i % spec.classes);
  std::shuffle(ds.labels.begin(), ds.labels.end(), rng);

  std::vector<std::vector<Index>> members(static_cast<std::size_t>(spec.classes));
  for (Index i = 0; i < spec.nodes; ++i) members[ds.labels[i]].push_back(i);

  std::uniform_int_distribution<Index> any_node(0, spec.nodes - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n_edges = static_cast<Index>(std::llround(spec.nodes * spec.mean_degree / 2.0));
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n_edges));
  for (Index e = 0; e < n_edges; ++e) {
    const Index a = any_node(rng);
    Index b = a;
    if (unit(rng) < spec.homophily || spec.classes == 1) {
      const auto& same = members[ds.labels[a]];
      std::uniform_int_distribution<std::size_t> pick(0, same.size() - 1);
      b = same[pick(rng)];
    } else {
      do {
        b = any_node(rng);
      } while (ds.labels[b] == ds.labels[a]);
    }
    edges.push_back({a, b, 1.0});
  }
  ds.graph = build_graph(edges, spec.nodes);

  const Index block = spec.features / spec.classes;
  std::uniform_int_distribution<Index> any_word(0, spec.features - 1);
  std::uniform_int_distribution<Index> block_word(0, block - 1);
  ds.features = Matrix::Zero(spec.nodes, spec.features);
  for (Index i = 0; i < spec.nodes; ++i) {
    for (Index w = 0; w < spec.words_per_node; ++w) {
      const Index word = unit(rng) < spec.signal ? ds.labels[i] * block + block_word(rng) : any_word(rng);
      ds.features(i, word) = 1.0;
    }
  }
  ds.validate();
  return ds;
}

}  // namespace mgcn
