#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

#include "noge/kg_data.hpp"

namespace noge {

// Index layout of the unified entity+relation node space. Built from a
// Dataset so the relation block covers inverse relations when augmented.
struct NodeSpace {
  int32_t entity_count = 0;
  int32_t relation_count = 0;

  int32_t node_count() const { return entity_count + relation_count; }
  bool is_entity(int32_t node) const { return node < entity_count; }
  int32_t relation_node(int32_t r) const { return entity_count + r; }
};

inline NodeSpace node_space(const Dataset& d) {
  return {d.entity_count(), d.num_relations()};
}

// Per-triple containment counts: a triple contributes at most once to any
// node or pair count, so a self-loop triple (e,r,e) gives #C(e) = 1 and
// #C(e,e) = 1.
struct CoocCounts {
  std::unordered_map<uint64_t, int64_t> pair_count;  // canonical (min,max) key
  std::vector<int64_t> node_count;
  int64_t total = 0;

  static uint64_t key(int32_t u, int32_t v) {
    const uint32_t lo = static_cast<uint32_t>(u < v ? u : v);
    const uint32_t hi = static_cast<uint32_t>(u < v ? v : u);
    return (static_cast<uint64_t>(lo) << 32) | hi;
  }
  int64_t pair(int32_t u, int32_t v) const {
    auto it = pair_count.find(key(u, v));
    return it == pair_count.end() ? 0 : it->second;
  }
};

CoocCounts count_cooccurrence(std::span<const Triple> train, const NodeSpace& ns);

enum class AdjacencyKind { weighted, binary };

// CSR with deterministically sorted column order within each row.
struct SparseMatrix {
  int64_t dim = 0;
  std::vector<int64_t> row_ptr;  // dim + 1
  std::vector<int32_t> col;
  std::vector<double> val;

  int64_t nnz() const { return static_cast<int64_t>(col.size()); }
  double at(int64_t r, int64_t c) const;  // 0.0 when absent
};

struct WeightedAdjacency {
  AdjacencyKind kind = AdjacencyKind::weighted;
  SparseMatrix m;
};

struct NormalizedAdjacency {
  SparseMatrix m;
};

// The co-occurrence weight matrix: entity-entity entries are conditional
// probabilities p(v,u)/p(v) (asymmetric), entries touching a relation node
// are joint probabilities p(v,u), and the diagonal is 1.
WeightedAdjacency build_weighted_adjacency(const CoocCounts& counts, const NodeSpace& ns);

// Same support as the weighted matrix, all entries 1.
WeightedAdjacency build_binary_adjacency(const CoocCounts& counts, const NodeSpace& ns);

// Diagonal handling for the self-loop term added before degree
// normalization: `doubled` adds the identity on top of the existing unit
// diagonal (self-loop weight 2, the default); `single` keeps the unit
// diagonal as the self-loop.
enum class SelfLoopMode { doubled, single };

// D^{-1/2} (A + I) D^{-1/2} with D the diagonal of row sums.
NormalizedAdjacency renormalize(const WeightedAdjacency& adj,
                                SelfLoopMode mode = SelfLoopMode::doubled);

// Debug dump: `row<TAB>col<TAB>weight` lines, rows ascending, full precision.
void dump_adjacency_tsv(const SparseMatrix& m, std::ostream& os);

}  // namespace noge
