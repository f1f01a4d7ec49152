#include <mgcn/gcn.hpp>

#include <cmath>
#include <string>

namespace mgcn {

std::vector<Matrix*> GcnModel::parameters() {
  std::vector<Matrix*> out;
  for (auto& layer : layers) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<const Matrix*> GcnModel::parameters() const {
  std::vector<const Matrix*> out;
  for (const auto& layer : layers) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

Matrix init_glorot(Index d_in, Index d_out, Rng& rng) {
  if (d_in < 1 || d_out < 1) throw InvalidArgument("init_glorot: dimensions must be >= 1");
  const double bound = std::sqrt(6.0 / static_cast<double>(d_in + d_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix w(d_in, d_out);
  for (Index i = 0; i < d_in; ++i) {
    for (Index j = 0; j < d_out; ++j) w(i, j) = dist(rng);
  }
  return w;
}

GcnModel make_model(std::span<const Index> dims, Rng& rng) {
  if (dims.size() < 2) throw InvalidArgument("make_model: need at least an input and an output width");
  GcnModel model;
  for (std::size_t a = 0; a + 1 < dims.size(); ++a) {
    GcnLayer layer;
    layer.weight = init_glorot(dims[a], dims[a + 1], rng);
    layer.bias = Matrix::Zero(1, dims[a + 1]);
    layer.activation = a + 2 == dims.size() ? Activation::identity : Activation::relu;
    model.layers.push_back(std::move(layer));
  }
  return model;
}

namespace {

void check_model(const GcnModel& model, const SparseMatrix& kernel, Index n, Index d) {
  if (model.layers.empty()) throw InvalidArgument("forward: model has no layers");
  if (kernel.rows() != n || kernel.cols() != n) throw InvalidArgument("forward: kernel must be n x n");
  if (model.input_dim() != d) {
    throw InvalidArgument("forward: feature width " + std::to_string(d) + " does not match model input " +
                          std::to_string(model.input_dim()));
  }
  for (std::size_t a = 1; a < model.layers.size(); ++a) {
    if (model.layers[a].in_dim() != model.layers[a - 1].out_dim()) {
      throw InvalidArgument("forward: layer widths do not chain at layer " + std::to_string(a));
    }
  }
}

Matrix activate(const Matrix& z, Activation act) {
  return act == Activation::relu ? Matrix(z.cwiseMax(0.0)) : z;
}

}  // namespace

Matrix forward(const GcnModel& model, const SparseMatrix& kernel, const SparseMatrix& features,
               const ForwardOptions& options, Rng& rng, ForwardCache* cache) {
  check_model(model, kernel, features.rows(), features.cols());
  if (!(options.dropout >= 0.0 && options.dropout < 1.0)) throw InvalidArgument("forward: dropout must lie in [0, 1)");
  const bool drop = options.training && options.dropout > 0.0;
  const double keep = 1.0 - options.dropout;
  std::bernoulli_distribution keep_draw(keep);

  if (cache != nullptr) {
    cache->layers.clear();
    cache->layers.resize(model.layers.size());
  }

  Matrix h;
  for (std::size_t a = 0; a < model.layers.size(); ++a) {
    const GcnLayer& layer = model.layers[a];
    Matrix transformed;
    if (a == 0) {
      SparseMatrix input = features;
      std::vector<double> mask;
      if (drop) {
        mask.resize(static_cast<std::size_t>(features.nnz()));
        std::vector<double> vals(features.values().begin(), features.values().end());
        std::vector<Triplet> kept;
        kept.reserve(vals.size());
        for (Index r = 0; r < features.rows(); ++r) {
          const auto cols = features.row_cols(r);
          const Index base = features.row_offsets()[r];
          for (std::size_t k = 0; k < cols.size(); ++k) {
            const double m = keep_draw(rng) ? 1.0 / keep : 0.0;
            mask[base + k] = m;
            if (m != 0.0) kept.push_back({r, cols[k], vals[base + k] * m});
          }
        }
        input = SparseMatrix::from_triplets(features.rows(), features.cols(), kept);
      }
      transformed = spmm(input, layer.weight);
      if (cache != nullptr) {
        cache->layers[a].sparse_input = std::move(input);
        cache->layers[a].sparse_mask = std::move(mask);
      }
    } else {
      Matrix mask;
      if (drop) {
        mask.resize(h.rows(), h.cols());
        for (Index i = 0; i < h.rows(); ++i) {
          for (Index j = 0; j < h.cols(); ++j) mask(i, j) = keep_draw(rng) ? 1.0 / keep : 0.0;
        }
        h.array() *= mask.array();
      }
      transformed = h * layer.weight;
      if (cache != nullptr) {
        cache->layers[a].input = h;
        cache->layers[a].mask = std::move(mask);
      }
    }
    Matrix z = spmm(kernel, transformed);
    z.rowwise() += layer.bias.row(0);
    h = activate(z, layer.activation);
    if (cache != nullptr) {
      cache->layers[a].pre_activation = std::move(z);
      cache->layers[a].output = h;
    }
  }
  return h;
}

std::vector<Matrix> BackwardResult::flatten() const {
  std::vector<Matrix> out;
  for (const auto& g : layers) {
    out.push_back(g.weight);
    out.push_back(g.bias);
  }
  return out;
}

BackwardResult backward(const GcnModel& model, const SparseMatrix& kernel, const ForwardCache& cache,
                        const Matrix& grad_output, bool want_input_gradient) {
  if (cache.layers.size() != model.layers.size()) throw InvalidArgument("backward: cache does not match the model");
  const auto& last = cache.layers.back();
  if (grad_output.rows() != last.output.rows() || grad_output.cols() != last.output.cols()) {
    throw InvalidArgument("backward: output gradient shape does not match the cached output");
  }

  BackwardResult result;
  result.layers.resize(model.layers.size());
  Matrix grad = grad_output;
  for (std::size_t a = model.layers.size(); a-- > 0;) {
    const GcnLayer& layer = model.layers[a];
    const LayerCache& lc = cache.layers[a];
    if (lc.pre_activation.rows() != grad.rows() || lc.pre_activation.cols() != layer.out_dim()) {
      throw InvalidArgument("backward: stale cache at layer " + std::to_string(a));
    }
    Matrix grad_z = grad;
    if (layer.activation == Activation::relu) {
      grad_z.array() *= (lc.pre_activation.array() > 0.0).cast<double>();
    }
    result.layers[a].bias = grad_z.colwise().sum();
    // K is symmetric, so K^T grad_z = K grad_z.
    const Matrix propagated = spmm(kernel, grad_z);
    if (a == 0) {
      result.layers[a].weight = spmm_transposed(lc.sparse_input, propagated);
      if (want_input_gradient) {
        if (!lc.sparse_mask.empty()) throw InvalidArgument("backward: input gradient needs a cache without dropout");
        result.input = propagated * layer.weight.transpose();
      }
    } else {
      result.layers[a].weight = lc.input.transpose() * propagated;
      grad = propagated * layer.weight.transpose();
      if (lc.mask.size() != 0) grad.array() *= lc.mask.array();
    }
  }
  return result;
}

void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state, double lr) {
  if (params.size() != grads.size()) throw InvalidArgument("adam_step: parameter/gradient count mismatch");
  if (state.first_moment.empty()) {
    for (const Matrix* p : params) {
      state.first_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
      state.second_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (state.first_moment.size() != params.size()) throw InvalidArgument("adam_step: state does not match parameters");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& p = *params[k];
    const Matrix& g = grads[k];
    if (g.rows() != p.rows() || g.cols() != p.cols()) throw InvalidArgument("adam_step: gradient shape mismatch");
    Matrix& m = state.first_moment[k];
    Matrix& v = state.second_moment[k];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseAbs2();
    p.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + state.epsilon);
  }
}

}  // namespace mgcn
