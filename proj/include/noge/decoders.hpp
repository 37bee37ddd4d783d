#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noge/hypercomplex.hpp"
#include "noge/tensor.hpp"

namespace noge {

enum class DecoderKind { quate, distmult };

// f(h,r,t) = (v_h (x) v_r^<) . v_t: every quaternion coordinate of the
// relation is normalized, Hamilton-multiplied with the head coordinate-wise,
// then the quaternion-inner product with the tail is taken. Throws
// NumericError on a zero-norm relation coordinate.
double quate_score(const QuatVec& v_h, const QuatVec& v_r, const QuatVec& v_t);

// sum_i h_i * r_i * t_i.
double distmult_score(std::span<const double> h, std::span<const double> r,
                      std::span<const double> t);

// Per-(h,r) forward state reused by the backward pass. For quate: the
// normalized relation coordinates, their norms, and w = v_h (x) v_r^<.
// For distmult only w (= h .* r) is populated.
struct DecoderQueryCache {
  std::array<std::vector<double>, 4> rn;
  std::vector<double> rnorm;
  std::array<std::vector<double>, 4> w;
};

// Scores one (h_node, r_node) query against every entity t in [0,
// entity_count). `reps` is the decoder-input tensor (4 components for quate,
// 1 for distmult; rows are nodes). Bit-equal to scoring each triple with
// score_one.
void score_all_tails(const Tensor& reps, int64_t h_node, int64_t r_node,
                     int64_t entity_count, DecoderKind kind, std::span<double> out,
                     DecoderQueryCache* cache = nullptr);

double score_one(const Tensor& reps, int64_t h_node, int64_t r_node, int64_t t_node,
                 DecoderKind kind);

// Accumulates gradients w.r.t. the head, relation, and all entity rows into
// grad_reps, given the gradient of the loss w.r.t. the score row and the
// cache from the matching score_all_tails call. Reverse-mode through the
// relation normalization includes the projection term.
void decoder_backward_all_tails(const Tensor& reps, int64_t h_node, int64_t r_node,
                                int64_t entity_count, DecoderKind kind,
                                std::span<const double> grad_row,
                                const DecoderQueryCache& cache, Tensor& grad_reps);

const char* decoder_kind_name(DecoderKind k);
DecoderKind decoder_kind_from(const std::string& name);

}  // namespace noge
