#pragma once

#include <mgcn/sparse.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace mgcn {

enum class Activation : std::uint8_t { relu = 0, identity = 1 };

/// One graph convolution: act(K * input * weight + bias).
struct GcnLayer {
  Matrix weight;  // d_in x d_out
  Matrix bias;    // 1 x d_out
  Activation activation = Activation::relu;

  Index in_dim() const noexcept { return weight.rows(); }
  Index out_dim() const noexcept { return weight.cols(); }
};

struct GcnModel {
  std::vector<GcnLayer> layers;

  Index input_dim() const { return layers.front().in_dim(); }
  Index output_dim() const { return layers.back().out_dim(); }

  /// W0, b0, W1, b1, ... in layer order.
  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
};

/// Uniform on [-sqrt(6 / (d_in + d_out)), +sqrt(6 / (d_in + d_out))].
Matrix init_glorot(Index d_in, Index d_out, Rng& rng);

/// Glorot weights and zero biases for widths dims[0] -> dims[1] -> ... ;
/// ReLU on every layer except the last, which is linear.
GcnModel make_model(std::span<const Index> dims, Rng& rng);

struct LayerCache {
  SparseMatrix sparse_input;  // layer 0 input after dropout
  Matrix input;               // later layers: input after dropout
  std::vector<double> sparse_mask;
  Matrix mask;                // empty when no dropout was applied
  Matrix pre_activation;
  Matrix output;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
};

struct ForwardOptions {
  double dropout = 0.0;
  bool training = false;
};

/// Full-batch forward pass. Dropout (inverted, scaled by 1/keep) is applied to
/// every layer input in training mode; layer 0 drops stored feature entries.
/// The kernel must be symmetric; backward relies on it.
Matrix forward(const GcnModel& model, const SparseMatrix& kernel, const SparseMatrix& features,
               const ForwardOptions& options, Rng& rng, ForwardCache* cache = nullptr);

struct LayerGradient {
  Matrix weight;
  Matrix bias;
};

struct BackwardResult {
  std::vector<LayerGradient> layers;
  /// Gradient w.r.t. the dense feature matrix; only filled on request.
  Matrix input;

  /// Same order as GcnModel::parameters().
  std::vector<Matrix> flatten() const;
};

/// Exact gradients of a scalar loss whose gradient w.r.t. the model output is
/// `grad_output`. The input gradient requires a cache without layer-0 dropout.
BackwardResult backward(const GcnModel& model, const SparseMatrix& kernel, const ForwardCache& cache,
                        const Matrix& grad_output, bool want_input_gradient = false);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
};

/// Bias-corrected Adam. Moments are zero-initialised on the first call.
void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state, double lr);

}  // namespace mgcn
