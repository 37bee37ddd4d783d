#include "noge/cooc_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "noge/errors.hpp"

namespace noge {

double SparseMatrix::at(int64_t r, int64_t c) const {
  const auto b = col.begin() + row_ptr[r];
  const auto e = col.begin() + row_ptr[r + 1];
  auto it = std::lower_bound(b, e, static_cast<int32_t>(c));
  if (it == e || *it != c) return 0.0;
  return val[static_cast<size_t>(it - col.begin())];
}

CoocCounts count_cooccurrence(std::span<const Triple> train, const NodeSpace& ns) {
  CoocCounts counts;
  counts.node_count.assign(static_cast<size_t>(ns.node_count()), 0);
  counts.total = static_cast<int64_t>(train.size());
  for (const Triple& t : train) {
    const int32_t vh = t.h;
    const int32_t vr = ns.relation_node(t.r);
    const int32_t vt = t.t;
    counts.node_count[static_cast<size_t>(vh)] += 1;
    counts.node_count[static_cast<size_t>(vr)] += 1;
    if (vt != vh) counts.node_count[static_cast<size_t>(vt)] += 1;
    counts.pair_count[CoocCounts::key(vh, vt)] += 1;
    counts.pair_count[CoocCounts::key(vh, vr)] += 1;
    if (vt != vh) counts.pair_count[CoocCounts::key(vr, vt)] += 1;
  }
  return counts;
}

namespace {

SparseMatrix assemble_csr(int64_t dim,
                          std::vector<std::tuple<int32_t, int32_t, double>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) {
              return std::tie(std::get<0>(a), std::get<1>(a)) <
                     std::tie(std::get<0>(b), std::get<1>(b));
            });
  SparseMatrix m;
  m.dim = dim;
  m.row_ptr.assign(static_cast<size_t>(dim + 1), 0);
  m.col.reserve(entries.size());
  m.val.reserve(entries.size());
  for (const auto& [r, c, v] : entries) {
    m.row_ptr[static_cast<size_t>(r + 1)] += 1;
    m.col.push_back(c);
    m.val.push_back(v);
  }
  for (int64_t i = 0; i < dim; ++i)
    m.row_ptr[static_cast<size_t>(i + 1)] += m.row_ptr[static_cast<size_t>(i)];
  return m;
}

WeightedAdjacency build_adjacency(const CoocCounts& counts, const NodeSpace& ns,
                                  AdjacencyKind kind) {
  const int64_t dim = ns.node_count();
  const double total = static_cast<double>(counts.total);
  std::vector<std::tuple<int32_t, int32_t, double>> entries;
  entries.reserve(counts.pair_count.size() * 2 + static_cast<size_t>(dim));

  for (int64_t v = 0; v < dim; ++v)
    entries.emplace_back(static_cast<int32_t>(v), static_cast<int32_t>(v), 1.0);

  for (const auto& [key, cnt] : counts.pair_count) {
    const int32_t u = static_cast<int32_t>(key >> 32);
    const int32_t v = static_cast<int32_t>(key & 0xffffffffull);
    if (u == v) continue;  // diagonal is fixed at 1
    if (cnt <= 0) continue;
    const double p_uv = static_cast<double>(cnt) / total;
    auto weight_from = [&](int32_t row) {
      if (kind == AdjacencyKind::binary) return 1.0;
      if (ns.is_entity(u) && ns.is_entity(v)) {
        const int64_t ncr = counts.node_count[static_cast<size_t>(row)];
        if (ncr <= 0)
          throw InternalError("co-occurrence counts inconsistent: positive pair "
                              "count with zero node count");
        const double p_row = static_cast<double>(ncr) / total;
        return p_uv / p_row;
      }
      return p_uv;
    };
    entries.emplace_back(u, v, weight_from(u));
    entries.emplace_back(v, u, weight_from(v));
  }
  return {kind, assemble_csr(dim, std::move(entries))};
}

}  // namespace

WeightedAdjacency build_weighted_adjacency(const CoocCounts& counts, const NodeSpace& ns) {
  return build_adjacency(counts, ns, AdjacencyKind::weighted);
}

WeightedAdjacency build_binary_adjacency(const CoocCounts& counts, const NodeSpace& ns) {
  return build_adjacency(counts, ns, AdjacencyKind::binary);
}

NormalizedAdjacency renormalize(const WeightedAdjacency& adj, SelfLoopMode mode) {
  if (adj.m.dim <= 0) throw InternalError("renormalize: empty adjacency");
  SparseMatrix m = adj.m;
  if (mode == SelfLoopMode::doubled) {
    for (int64_t r = 0; r < m.dim; ++r) {
      for (int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
        if (m.col[static_cast<size_t>(k)] == r) m.val[static_cast<size_t>(k)] += 1.0;
      }
    }
  }
  std::vector<double> degree(static_cast<size_t>(m.dim), 0.0);
  for (int64_t r = 0; r < m.dim; ++r)
    for (int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      degree[static_cast<size_t>(r)] += m.val[static_cast<size_t>(k)];
  for (double dgr : degree)
    if (dgr <= 0.0)
      throw InternalError("renormalize: zero row degree (diagonal missing?)");
  std::vector<double> inv_sqrt(degree.size());
  for (size_t i = 0; i < degree.size(); ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);
  for (int64_t r = 0; r < m.dim; ++r)
    for (int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      m.val[static_cast<size_t>(k)] *=
          inv_sqrt[static_cast<size_t>(r)] *
          inv_sqrt[static_cast<size_t>(m.col[static_cast<size_t>(k)])];
  return {std::move(m)};
}

void dump_adjacency_tsv(const SparseMatrix& m, std::ostream& os) {
  char buf[64];
  for (int64_t r = 0; r < m.dim; ++r) {
    for (int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.val[static_cast<size_t>(k)]);
      os << r << '\t' << m.col[static_cast<size_t>(k)] << '\t' << buf << '\n';
    }
  }
}

}  // namespace noge
