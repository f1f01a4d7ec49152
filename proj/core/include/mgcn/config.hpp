#pragma once

#include <mgcn/types.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mgcn {

enum class Mode {
  full,     // orthogonal projection + Laplacian label smoothing
  om_only,  // decision layer with lambda pinned to 0
  lp_only,  // softmax-trained GCN, predictions by harmonic propagation
  softmax,  // plain GCN with a cross-entropy head
};

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

inline bool uses_decision_layer(Mode mode) { return mode == Mode::full || mode == Mode::om_only; }

struct TrainConfig {
  /// Output widths of every graph convolution; the last one is the embedding
  /// width fed to the decision layer. Softmax-headed modes replace it with
  /// the class count.
  std::vector<Index> hidden_dims{64, 64};
  double lambda = 1.0;
  double dropout = 0.5;
  double lr = 0.01;
  double weight_decay = 0.0;
  Index refresh_interval = 50;
  Index max_epochs = 500;
  Index patience = 100;
  double inner_tol = 1e-4;
  Index inner_max_iter = 30;
  Mode mode = Mode::full;
  std::uint64_t seed = 0;
  bool normalize_features = true;
  bool random_label_init = false;
  /// Backpropagate the fit term through labeled rows only.
  bool labeled_only_loss = false;

  /// Lambda actually used by the decision layer (0 for om_only).
  double effective_lambda() const { return mode == Mode::om_only ? 0.0 : lambda; }

  /// Throws InvalidArgument naming the first offending field.
  void validate(Index num_classes) const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Pretty-printed JSON object with every field.
std::string config_to_json(const TrainConfig& config);

/// Overlays the keys of a JSON object onto `base`. Unknown keys and wrongly
/// typed values throw InvalidArgument.
TrainConfig config_from_json(std::string_view json_text, TrainConfig base = {});

}  // namespace mgcn
