#include <mgcn/checkpoint.hpp>

#include "byte_io.hpp"

#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>

namespace mgcn {

namespace detail {

std::uint32_t crc32(std::string_view bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - offset, 1u << 30));
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + offset), chunk);
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string crc32_hex(std::string_view bytes) {
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08x", crc32(bytes));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

std::string format_double(double value) {
  char buf[64];
  const auto end = std::to_chars(buf, buf + sizeof(buf), value).ptr;
  return {buf, end};
}

}  // namespace detail

namespace {

constexpr std::string_view kMagic = "MGCNCKPT";

void put_matrix(std::string& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) detail::put_le(out, m(i, j));
  }
}

Matrix get_matrix(detail::ByteReader& in, Index rows, Index cols) {
  if (in.remaining() / 8 < static_cast<std::size_t>(rows * cols)) throw DataError("checkpoint: truncated matrix");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = in.get<double>();
  }
  return m;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kMagic);
  detail::put_le(out, kCheckpointVersion);
  detail::put_le(out, ckpt.seed);
  detail::put_le(out, static_cast<std::uint32_t>(ckpt.model.layers.size()));
  for (const auto& layer : ckpt.model.layers) {
    detail::put_le(out, static_cast<std::uint32_t>(layer.in_dim()));
    detail::put_le(out, static_cast<std::uint32_t>(layer.out_dim()));
    detail::put_le(out, static_cast<std::uint8_t>(layer.activation));
    put_matrix(out, layer.weight);
    put_matrix(out, layer.bias);
  }
  detail::put_le(out, static_cast<std::uint32_t>(ckpt.projector.rows()));
  detail::put_le(out, static_cast<std::uint32_t>(ckpt.projector.cols()));
  put_matrix(out, ckpt.projector);
  detail::put_le(out, static_cast<std::uint64_t>(ckpt.metadata.size()));
  out += ckpt.metadata;
  detail::put_le(out, detail::crc32(out));
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 4 || bytes.substr(0, kMagic.size()) != kMagic) {
    throw DataError("checkpoint: bad magic");
  }
  const auto body = bytes.substr(0, bytes.size() - 4);
  detail::ByteReader trailer(bytes.substr(bytes.size() - 4));
  if (trailer.get<std::uint32_t>() != detail::crc32(body)) throw DataError("checkpoint: checksum mismatch");

  detail::ByteReader in(body);
  in.take(kMagic.size());
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported format version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.seed = in.get<std::uint64_t>();
  const auto n_layers = in.get<std::uint32_t>();
  for (std::uint32_t a = 0; a < n_layers; ++a) {
    GcnLayer layer;
    const Index d_in = in.get<std::uint32_t>();
    const Index d_out = in.get<std::uint32_t>();
    const auto act = in.get<std::uint8_t>();
    if (act > 1) throw DataError("checkpoint: unknown activation code");
    layer.activation = static_cast<Activation>(act);
    layer.weight = get_matrix(in, d_in, d_out);
    layer.bias = get_matrix(in, 1, d_out);
    ckpt.model.layers.push_back(std::move(layer));
  }
  const Index pr = in.get<std::uint32_t>();
  const Index pc = in.get<std::uint32_t>();
  ckpt.projector = get_matrix(in, pr, pc);
  const auto meta_len = in.get<std::uint64_t>();
  ckpt.metadata = std::string(in.take(meta_len));
  if (in.remaining() != 0) throw DataError("checkpoint: trailing bytes");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  detail::write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(detail::read_file(path));
}

}  // namespace mgcn
