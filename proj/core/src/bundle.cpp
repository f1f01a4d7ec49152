#include <mgcn/dataset.hpp>

#include "byte_io.hpp"

#include <json.hpp>

#include <charconv>
#include <sstream>

namespace mgcn {

namespace {

using nlohmann::json;

constexpr const char* kFeatures = "features.bin";
constexpr const char* kEdges = "edges.tsv";
constexpr const char* kLabels = "labels.tsv";
constexpr const char* kSplit = "split.json";
constexpr const char* kMeta = "meta.json";

std::string encode_features(const Matrix& f) {
  std::string out;
  out.reserve(static_cast<std::size_t>(f.size()) * 8);
  for (Index i = 0; i < f.rows(); ++i) {
    for (Index j = 0; j < f.cols(); ++j) detail::put_le(out, f(i, j));
  }
  return out;
}

std::string encode_edges(const Graph& g) {
  std::string out = "# src\tdst\tweight\n";
  for (const auto& e : g.edges()) {
    out += std::to_string(e.src);
    out += '\t';
    out += std::to_string(e.dst);
    out += '\t';
    out += detail::format_double(e.weight);
    out += '\n';
  }
  return out;
}

std::string encode_labels(const Dataset& ds) {
  std::string out = "node\tlabel\tname\n";
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    const std::string& name = ds.node_names.empty() ? std::string() : ds.node_names[i];
    if (name.find_first_of("\t\n") != std::string::npos) throw DataError("bundle: node name contains a tab or newline");
    out += std::to_string(i);
    out += '\t';
    out += std::to_string(ds.labels[i]);
    out += '\t';
    out += name;
    out += '\n';
  }
  return out;
}

std::string encode_split(const Split& s) {
  return json{{"train", s.train}, {"val", s.val}, {"test", s.test}}.dump(1) + "\n";
}

void verify(const json& meta, const char* file, std::string_view bytes) {
  const std::string expected = meta.at("checksums").at(file).get<std::string>();
  if (detail::crc32_hex(bytes) != expected) throw DataError(std::string("bundle: checksum mismatch in ") + file);
}

}  // namespace

void save_bundle(const Dataset& dataset, const Split& split, const std::filesystem::path& dir) {
  dataset.validate();
  split.validate(dataset.num_nodes());
  std::filesystem::create_directories(dir);

  const std::string features = encode_features(dataset.features);
  const std::string edges = encode_edges(dataset.graph);
  const std::string labels = encode_labels(dataset);
  const std::string split_text = encode_split(split);

  json meta;
  meta["format_version"] = kBundleVersion;
  meta["name"] = dataset.name;
  meta["num_nodes"] = dataset.num_nodes();
  meta["num_features"] = dataset.num_features();
  meta["num_classes"] = dataset.num_classes();
  meta["num_edges"] = dataset.graph.edge_count();
  meta["class_names"] = dataset.class_names;
  meta["has_node_names"] = !dataset.node_names.empty();
  meta["checksums"] = {{kFeatures, detail::crc32_hex(features)},
                       {kEdges, detail::crc32_hex(edges)},
                       {kLabels, detail::crc32_hex(labels)},
                       {kSplit, detail::crc32_hex(split_text)}};

  detail::write_file(dir / kFeatures, features);
  detail::write_file(dir / kEdges, edges);
  detail::write_file(dir / kLabels, labels);
  detail::write_file(dir / kSplit, split_text);
  // meta.json last: a bundle without it is never considered complete.
  detail::write_file(dir / kMeta, meta.dump(2) + "\n");
}

Bundle load_bundle(const std::filesystem::path& dir) {
  json meta;
  try {
    meta = json::parse(detail::read_file(dir / kMeta));
  } catch (const json::exception& e) {
    throw DataError("bundle: unreadable meta.json: " + std::string(e.what()));
  }

  try {
    const int version = meta.at("format_version").get<int>();
    if (version != kBundleVersion) {
      throw DataError("bundle: format version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kBundleVersion) + ")");
    }
    const std::string features = detail::read_file(dir / kFeatures);
    const std::string edges = detail::read_file(dir / kEdges);
    const std::string labels = detail::read_file(dir / kLabels);
    const std::string split_text = detail::read_file(dir / kSplit);
    verify(meta, kFeatures, features);
    verify(meta, kEdges, edges);
    verify(meta, kLabels, labels);
    verify(meta, kSplit, split_text);

    Bundle bundle;
    Dataset& ds = bundle.dataset;
    ds.name = meta.at("name").get<std::string>();
    const Index n = meta.at("num_nodes").get<Index>();
    const Index d = meta.at("num_features").get<Index>();
    ds.class_names = meta.at("class_names").get<std::vector<std::string>>();
    if (static_cast<Index>(ds.class_names.size()) != meta.at("num_classes").get<Index>()) {
      throw DataError("bundle: class_names length disagrees with num_classes");
    }
    if (features.size() != static_cast<std::size_t>(n * d) * 8) throw DataError("bundle: features.bin has the wrong size");

    ds.features.resize(n, d);
    detail::ByteReader reader(features);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) ds.features(i, j) = reader.get<double>();
    }

    std::istringstream edge_stream(edges);
    ds.graph = build_graph(read_edge_list(edge_stream), n);
    if (ds.graph.edge_count() != meta.at("num_edges").get<Index>()) throw DataError("bundle: edge count mismatch");

    std::istringstream label_stream(labels);
    std::string line;
    std::getline(label_stream, line);  // header
    const bool has_names = meta.at("has_node_names").get<bool>();
    Index row = 0;
    while (std::getline(label_stream, line)) {
      const auto t1 = line.find('\t');
      const auto t2 = line.find('\t', t1 + 1);
      if (t1 == std::string::npos || t2 == std::string::npos) throw DataError("bundle: malformed labels.tsv line");
      if (std::stoll(line.substr(0, t1)) != row) throw DataError("bundle: labels.tsv rows out of order");
      ds.labels.push_back(std::stoi(line.substr(t1 + 1, t2 - t1 - 1)));
      if (has_names) ds.node_names.push_back(line.substr(t2 + 1));
      ++row;
    }
    if (row != n) throw DataError("bundle: labels.tsv has " + std::to_string(row) + " rows, expected " + std::to_string(n));
    ds.validate();

    const json s = json::parse(split_text);
    bundle.split.train = s.at("train").get<std::vector<Index>>();
    bundle.split.val = s.at("val").get<std::vector<Index>>();
    bundle.split.test = s.at("test").get<std::vector<Index>>();
    bundle.split.validate(n);
    return bundle;
  } catch (const json::exception& e) {
    throw DataError("bundle: malformed metadata: " + std::string(e.what()));
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("bundle: inconsistent contents: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw DataError("bundle: malformed number in labels.tsv");
  } catch (const std::out_of_range&) {
    throw DataError("bundle: number out of range in labels.tsv");
  }
}

}  // namespace mgcn
