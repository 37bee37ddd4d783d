#include "noge/eval.hpp"

#include <algorithm>

#include "noge/errors.hpp"

namespace noge {

int64_t filtered_rank(std::span<const double> scores, int32_t target,
                      std::span<const int32_t> filter_sorted) {
  const double st = scores[static_cast<size_t>(target)];
  int64_t rank = 1;
  for (int64_t e = 0; e < static_cast<int64_t>(scores.size()); ++e) {
    if (e == target) continue;
    if (std::binary_search(filter_sorted.begin(), filter_sorted.end(),
                           static_cast<int32_t>(e)))
      continue;
    if (scores[static_cast<size_t>(e)] >= st) ++rank;
  }
  return rank;
}

Metrics evaluate_split(const Tensor& reps, DecoderKind kind,
                       std::span<const Triple> original_triples,
                       const TruthIndex& truth_all, int64_t entity_count,
                       int32_t num_relations_original) {
  Metrics m;
  std::vector<double> row(static_cast<size_t>(entity_count));
  double sum_rr = 0.0;
  int64_t h1 = 0, h3 = 0, h10 = 0, n = 0;

  auto run_query = [&](int64_t source_node, int32_t relation, int32_t target) {
    score_all_tails(reps, source_node, entity_count + relation, entity_count, kind,
                    row);
    const auto known = truth_all.tails(static_cast<int32_t>(source_node), relation);
    const int64_t rank = filtered_rank(row, target, known);
    sum_rr += 1.0 / static_cast<double>(rank);
    if (rank <= 1) ++h1;
    if (rank <= 3) ++h3;
    if (rank <= 10) ++h10;
    ++n;
  };

  for (const Triple& t : original_triples) {
    run_query(t.h, t.r, t.t);                                // tail prediction
    run_query(t.t, t.r + num_relations_original, t.h);       // head via inverse
  }
  if (n > 0) {
    m.mrr = sum_rr / static_cast<double>(n);
    m.hits1 = static_cast<double>(h1) / static_cast<double>(n);
    m.hits3 = static_cast<double>(h3) / static_cast<double>(n);
    m.hits10 = static_cast<double>(h10) / static_cast<double>(n);
  }
  m.query_count = n;
  return m;
}

}  // namespace noge
