#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "noge/decoders.hpp"
#include "noge/kg_data.hpp"
#include "noge/tensor.hpp"

namespace noge {

// MRR and Hits@{1,3,10} aggregates over filtered ranking queries.
struct Metrics {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  int64_t query_count = 0;
};

// Rank of `target` within the score row, excluding filtered entities.
// Ties are pessimistic: candidates with a score equal to the target's count
// as ranked above it. `filter_sorted` is a sorted list of entities to
// exclude; it may or may not contain the target (the target is always
// compared regardless).
int64_t filtered_rank(std::span<const double> scores, int32_t target,
                      std::span<const int32_t> filter_sorted);

// Filtered evaluation over one split: each original triple contributes a
// tail query (h, r, ?) and a head query (t, r_inverse, ?) in the
// inverse-augmented relation space. `truth_all` must index every split and
// supplies the filters. `reps` is the decoder-input tensor.
Metrics evaluate_split(const Tensor& reps, DecoderKind kind,
                       std::span<const Triple> original_triples,
                       const TruthIndex& truth_all, int64_t entity_count,
                       int32_t num_relations_original);

}  // namespace noge
