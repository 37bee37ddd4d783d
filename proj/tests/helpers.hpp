// Shared test fixtures and independent oracles. Everything here recomputes
// expected values from first principles (dense loops, exhaustive scans) and
// must stay independent of the library code paths it checks.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "noge/cooc_graph.hpp"
#include "noge/decoders.hpp"
#include "noge/hypercomplex.hpp"
#include "noge/kg_data.hpp"
#include "noge/prng.hpp"
#include "noge/tensor.hpp"

namespace test_helpers {

using namespace noge;

// ---------------------------------------------------------------------------
// Random fixtures
// ---------------------------------------------------------------------------

inline Quaternion random_quat(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi),
          rng.uniform(lo, hi)};
}

inline DualQuaternion random_dq(Rng& rng) {
  return {random_quat(rng), random_quat(rng)};
}

// Random encoded triples over [0,entities) x [0,relations) x [0,entities),
// duplicates removed, deterministic.
inline std::vector<Triple> random_triples(uint64_t seed, int32_t entities,
                                          int32_t relations, int count) {
  Rng rng(seed, "random_triples");
  std::set<std::tuple<int32_t, int32_t, int32_t>> seen;
  std::vector<Triple> out;
  while (static_cast<int>(out.size()) < count) {
    const int32_t h = static_cast<int32_t>(rng.next_below(entities));
    const int32_t r = static_cast<int32_t>(rng.next_below(relations));
    const int32_t t = static_cast<int32_t>(rng.next_below(entities));
    if (seen.insert({h, r, t}).second) out.push_back({h, r, t});
  }
  return out;
}

inline std::vector<RawTriple> to_raw(const std::vector<Triple>& ts) {
  std::vector<RawTriple> out;
  for (const Triple& t : ts)
    out.push_back({"e" + std::to_string(t.h), "r" + std::to_string(t.r),
                   "e" + std::to_string(t.t)});
  return out;
}

// ---------------------------------------------------------------------------
// Co-occurrence / adjacency oracles: brute-force scans over all triples.
// ---------------------------------------------------------------------------

struct DenseCooc {
  std::vector<std::vector<int64_t>> pair;  // [u][v], symmetric
  std::vector<int64_t> node;
  int64_t total = 0;
};

inline DenseCooc brute_force_cooc(const std::vector<Triple>& train, const NodeSpace& ns) {
  const int n = ns.node_count();
  DenseCooc d;
  d.pair.assign(n, std::vector<int64_t>(n, 0));
  d.node.assign(n, 0);
  d.total = static_cast<int64_t>(train.size());
  for (int v = 0; v < n; ++v) {
    for (const Triple& t : train) {
      const int nodes[3] = {t.h, ns.relation_node(t.r), t.t};
      if (std::count(nodes, nodes + 3, v) > 0) d.node[v] += 1;
    }
  }
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      for (const Triple& t : train) {
        const int nodes[3] = {t.h, ns.relation_node(t.r), t.t};
        const bool has_u = std::count(nodes, nodes + 3, u) > 0;
        const bool has_v = std::count(nodes, nodes + 3, v) > 0;
        // a pair co-occurs in a triple when both nodes appear AND the pair is
        // one of {h,t}, {h,r}, {r,t} — i.e. not the (v,v) pair of a node that
        // only appears once in the triple
        if (u == v) {
          if (has_u && t.h == t.t && u == t.h) d.pair[u][v] += 1;
        } else if (has_u && has_v) {
          d.pair[u][v] += 1;
        }
      }
    }
  }
  return d;
}

// Dense weighted adjacency straight from the four-case definition, computed
// as count ratios (the implementation divides probabilities instead; the two
// agree to ~1 ulp).
inline std::vector<std::vector<double>> brute_force_weighted(const DenseCooc& d,
                                                             const NodeSpace& ns) {
  const int n = ns.node_count();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      if (v == u) {
        a[v][u] = 1.0;
      } else if (d.pair[v][u] > 0) {
        if (ns.is_entity(v) && ns.is_entity(u)) {
          a[v][u] = static_cast<double>(d.pair[v][u]) / static_cast<double>(d.node[v]);
        } else {
          a[v][u] = static_cast<double>(d.pair[v][u]) / static_cast<double>(d.total);
        }
      }
    }
  }
  return a;
}

// Dense degree-normalized matrix: form A~ and D~ explicitly.
inline std::vector<std::vector<double>> brute_force_renormalize(
    std::vector<std::vector<double>> a, bool doubled_diag) {
  const size_t n = a.size();
  if (doubled_diag)
    for (size_t i = 0; i < n; ++i) a[i][i] += 1.0;
  std::vector<double> deg(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    deg[i] = std::accumulate(a[i].begin(), a[i].end(), 0.0);
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      out[i][j] = a[i][j] / (std::sqrt(deg[i]) * std::sqrt(deg[j]));
  return out;
}

inline std::vector<std::vector<double>> to_dense(const SparseMatrix& m) {
  std::vector<std::vector<double>> out(static_cast<size_t>(m.dim),
                                       std::vector<double>(static_cast<size_t>(m.dim), 0.0));
  for (int64_t r = 0; r < m.dim; ++r)
    for (int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      out[static_cast<size_t>(r)][static_cast<size_t>(m.col[static_cast<size_t>(k)])] =
          m.val[static_cast<size_t>(k)];
  return out;
}

// ---------------------------------------------------------------------------
// Hypercomplex oracles
// ---------------------------------------------------------------------------

// Expands a quaternion matrix into the equivalent (4 rows x 4 cols) real
// matrix acting on component-stacked vectors [a0..an b0..bn c0..cn d0..dn].
inline std::vector<std::vector<double>> expand_quat_matrix(const QuatMat& W) {
  const int64_t R = W.rows, C = W.cols;
  std::vector<std::vector<double>> M(static_cast<size_t>(4 * R),
                                     std::vector<double>(static_cast<size_t>(4 * C), 0.0));
  for (int64_t i = 0; i < R; ++i) {
    for (int64_t j = 0; j < C; ++j) {
      const Quaternion w = W.at(i, j);
      // block of the left-multiplication matrix L(w)
      const double L[4][4] = {{w.a, -w.b, -w.c, -w.d},
                              {w.b, w.a, -w.d, w.c},
                              {w.c, w.d, w.a, -w.b},
                              {w.d, -w.c, w.b, w.a}};
      for (int bi = 0; bi < 4; ++bi)
        for (int bj = 0; bj < 4; ++bj)
          M[static_cast<size_t>(bi * R + i)][static_cast<size_t>(bj * C + j)] = L[bi][bj];
    }
  }
  return M;
}

inline std::vector<double> flatten_quatvec(const QuatVec& x) {
  std::vector<double> out;
  out.insert(out.end(), x.a.begin(), x.a.end());
  out.insert(out.end(), x.b.begin(), x.b.end());
  out.insert(out.end(), x.c.begin(), x.c.end());
  out.insert(out.end(), x.d.begin(), x.d.end());
  return out;
}

// ---------------------------------------------------------------------------
// Ranking oracle: exhaustive score-and-sort with pessimistic ties.
// ---------------------------------------------------------------------------

inline int64_t oracle_rank(const std::vector<double>& scores, int32_t target,
                           const std::set<int32_t>& filter) {
  struct Cand { double s; int32_t e; };
  std::vector<Cand> cands;
  for (int32_t e = 0; e < static_cast<int32_t>(scores.size()); ++e) {
    if (e == target) continue;
    if (filter.count(e)) continue;
    cands.push_back({scores[static_cast<size_t>(e)], e});
  }
  // pessimistic: every candidate scoring >= the target outranks it
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return a.s > b.s;
  });
  int64_t rank = 1;
  for (const Cand& c : cands)
    if (c.s >= scores[static_cast<size_t>(target)]) ++rank;
  return rank;
}

// ---------------------------------------------------------------------------
// Synthetic compositional KG over a 40-node cycle.
//
// Planted rule pattern: relation k holds between i and i + o (mod 40) for a
// fixed offset set per relation. rel1..rel3 use offset pairs {o, o + 20}, so
// the heads reaching any tail t are exactly {t - o, t - o - 20} = one coset
// of {0, 20}. Holding out a whole coset-by-relation unit (both heads, both
// tails) therefore removes every training query that could touch the four
// held-out triples, in both the tail and the inverse-head direction: the
// evaluation pairs are genuinely unseen and the model must rank them from
// the shared cyclic geometry alone.
//
// rel0 is never evaluated and provides anchoring density; its offsets 11/31
// overlap rel3's differences (9, 29 vs 11, 31 share pair differences with
// rel0's 11/31 plus 9/29 from both), and offset 31 only fires from the first
// half of the cycle, so pair and node frequencies are non-uniform and the
// weighted adjacency carries signal a binary one cannot.
// ---------------------------------------------------------------------------

struct ToyKgFiles {
  std::string train, valid, test;
};

inline ToyKgFiles make_compositional_kg(uint64_t seed = 7) {
  const int n = 40;
  std::vector<std::array<int, 3>> all;  // (head, relation, tail)
  const int eval_offsets[4] = {0, 3, 7, 9};  // rel1..rel3 use {o, o+20}
  for (int i = 0; i < n; ++i) {
    all.push_back({i, 0, (i + 1) % n});
    all.push_back({i, 0, (i + 21) % n});
    all.push_back({i, 0, (i + 11) % n});
    if (i < n / 2) all.push_back({i, 0, (i + 31) % n});
    for (int k = 1; k < 4; ++k) {
      all.push_back({i, k, (i + eval_offsets[k]) % n});
      all.push_back({i, k, (i + eval_offsets[k] + 20) % n});
    }
  }

  // sample 20 of the 60 (coset, relation) units; each unit holds 4 triples
  std::vector<std::pair<int, int>> units;  // (coset representative, relation)
  for (int c = 0; c < 20; ++c)
    for (int k = 1; k < 4; ++k) units.push_back({c, k});
  Rng rng(seed, "toykg_units");
  rng.shuffle(units);
  units.resize(20);

  std::set<std::array<int, 3>> held;
  for (const auto& [c, k] : units) {
    const int o = eval_offsets[k];
    held.insert({c, k, (c + o) % n});
    held.insert({c, k, (c + o + 20) % n});
    held.insert({(c + 20) % n, k, (c + o + 20) % n});
    held.insert({(c + 20) % n, k, (c + o) % n});
  }

  std::vector<std::array<int, 3>> train, eval;
  for (const auto& t : all)
    (held.count(t) ? eval : train).push_back(t);
  Rng rng2(seed, "toykg_eval");
  rng2.shuffle(eval);

  auto render = [](const std::vector<std::array<int, 3>>& ts, size_t b, size_t e) {
    std::string s;
    for (size_t i = b; i < e; ++i)
      s += "n" + std::to_string(ts[i][0]) + "\trel" + std::to_string(ts[i][1]) +
           "\tn" + std::to_string(ts[i][2]) + "\n";
    return s;
  };
  ToyKgFiles f;
  f.valid = render(eval, 0, 40);
  f.test = render(eval, 40, 80);
  f.train = render(train, 0, train.size());
  return f;
}

}  // namespace test_helpers
