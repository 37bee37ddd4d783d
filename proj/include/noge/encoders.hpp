#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "noge/cooc_graph.hpp"
#include "noge/tensor.hpp"

namespace noge {

enum class EncoderKind { dualqgnn, qgnn, gcn };

// Real components per coordinate in the encoder's native algebra.
inline int algebra_components(EncoderKind k) {
  switch (k) {
    case EncoderKind::dualqgnn: return 8;
    case EncoderKind::qgnn: return 4;
    case EncoderKind::gcn: return 1;
  }
  return 0;
}

struct EncoderConfig {
  EncoderKind kind = EncoderKind::dualqgnn;
  int num_layers = 1;
  int dim = 32;  // coordinates per node in the native algebra
};

// Node embedding table plus per-layer square weight matrices, all in the
// native algebra. These are the model's only trainable parameters.
struct EncoderParams {
  EncoderConfig config;
  int64_t node_count = 0;
  Tensor embeddings;                  // comps x node_count x dim
  std::vector<Tensor> layer_weights;  // comps x dim x dim each
};

// Uniform init on [-s, s] with s = sqrt(6 / (fan_in + fan_out)) over
// coordinate counts (fan_in = fan_out = dim). Deterministic given the seed.
EncoderParams init_params(const EncoderConfig& config, int64_t node_count,
                          uint64_t seed);

struct ForwardCache {
  std::vector<Tensor> pre_act;   // per layer, before tanh
  std::vector<Tensor> post_act;  // per layer, after tanh
};

// Multi-layer message passing: per layer, transform each node vector by the
// layer weight in the native algebra, aggregate with the real coefficients
// of the normalized adjacency, apply tanh component-wise. Throws
// NumericError naming the layer if a non-finite pre-activation appears.
Tensor encoder_forward(const EncoderParams& params, const NormalizedAdjacency& adj,
                       ForwardCache* cache = nullptr);

struct EncoderGrads {
  Tensor embeddings;
  std::vector<Tensor> layer_weights;
};

// Exact reverse-mode gradients of encoder_forward for a cache produced by a
// matching forward call.
EncoderGrads encoder_backward(const Tensor& grad_final, const ForwardCache& cache,
                              const EncoderParams& params,
                              const NormalizedAdjacency& adj);

// Dual-quaternion reps (8 x N x d) -> quaternion reps (4 x N x 2d): the q
// coefficients occupy coordinates [0, d), the p coefficients [d, 2d).
Tensor concat_dual_to_quat(const Tensor& dq_reps);

// Gradient counterpart: quaternion grads (4 x N x 2d) -> dual (8 x N x d).
Tensor split_quat_grad_to_dual(const Tensor& quat_grad);

const char* encoder_kind_name(EncoderKind k);
EncoderKind encoder_kind_from(const std::string& name);

}  // namespace noge
