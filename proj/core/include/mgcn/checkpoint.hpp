#pragma once

#include <mgcn/gcn.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace mgcn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Model weights plus what is needed to reproduce predictions: the seed, the
/// decision-layer projector (empty for softmax runs) and free-form metadata
/// (the resolved training config as JSON). Layout is in docs/checkpoint.md.
struct Checkpoint {
  GcnModel model;
  std::uint64_t seed = 0;
  Matrix projector;
  std::string metadata;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mgcn
