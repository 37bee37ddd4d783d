#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "noge/cooc_graph.hpp"

using namespace noge;
using test_helpers::brute_force_cooc;
using test_helpers::brute_force_renormalize;
using test_helpers::brute_force_weighted;
using test_helpers::to_dense;

namespace {

// Two-triple fixture: G = {(e1,r1,e2), (e1,r2,e3)}.
Dataset two_triple_fixture() {
  const std::vector<RawTriple> train = {{"e1", "r1", "e2"}, {"e1", "r2", "e3"}};
  return encode_dataset(train, {}, {}, build_vocabulary(train), false);
}

}  // namespace

TEST_CASE("count_cooccurrence on a single triple") {
  const std::vector<RawTriple> train = {{"e1", "r1", "e2"}};
  const Dataset d = encode_dataset(train, {}, {}, build_vocabulary(train), false);
  const NodeSpace ns = node_space(d);
  const CoocCounts c = count_cooccurrence(d.train, ns);
  // nodes: e1=0, e2=1, r1=2
  CHECK(c.total == 1);
  CHECK(c.node_count[0] == 1);
  CHECK(c.node_count[1] == 1);
  CHECK(c.node_count[2] == 1);
  CHECK(c.pair(0, 1) == 1);
  CHECK(c.pair(0, 2) == 1);
  CHECK(c.pair(2, 1) == 1);
  CHECK(c.pair(1, 0) == 1);  // symmetric lookup
}

TEST_CASE("count_cooccurrence self-loop triple uses containment") {
  const std::vector<RawTriple> train = {{"e1", "r1", "e1"}};
  const Dataset d = encode_dataset(train, {}, {}, build_vocabulary(train), false);
  const NodeSpace ns = node_space(d);
  const CoocCounts c = count_cooccurrence(d.train, ns);
  CHECK(c.node_count[0] == 1);  // not 2
  CHECK(c.pair(0, 0) == 1);
  CHECK(c.pair(0, 1) == 1);  // {e1,r1} counted once even though {h,r}={r,t}
}

TEST_CASE("count_cooccurrence matches brute force on a random KG") {
  const auto train = test_helpers::random_triples(51, 9, 3, 30);
  const NodeSpace ns{9, 3};
  const CoocCounts c = count_cooccurrence(train, ns);
  const auto oracle = brute_force_cooc(train, ns);
  CHECK(c.total == oracle.total);
  for (int v = 0; v < ns.node_count(); ++v)
    CHECK(c.node_count[static_cast<size_t>(v)] == oracle.node[static_cast<size_t>(v)]);
  for (int u = 0; u < ns.node_count(); ++u)
    for (int v = 0; v < ns.node_count(); ++v)
      CHECK(c.pair(u, v) == oracle.pair[static_cast<size_t>(u)][static_cast<size_t>(v)]);
}

TEST_CASE("weighted adjacency worked example shows the asymmetry") {
  const Dataset d = two_triple_fixture();
  const NodeSpace ns = node_space(d);
  // nodes: e1=0, e2=1, e3=2, r1=3, r2=4
  const WeightedAdjacency adj =
      build_weighted_adjacency(count_cooccurrence(d.train, ns), ns);
  CHECK(adj.m.at(0, 1) == doctest::Approx(0.5).epsilon(1e-15));   // A[e1,e2]
  CHECK(adj.m.at(1, 0) == doctest::Approx(1.0).epsilon(1e-15));   // A[e2,e1]
  CHECK(adj.m.at(0, 3) == doctest::Approx(0.5).epsilon(1e-15));   // A[e1,r1]
  CHECK(adj.m.at(1, 2) == 0.0);                                   // never co-occur
  for (int v = 0; v < 5; ++v) CHECK(adj.m.at(v, v) == 1.0);
}

TEST_CASE("weighted adjacency single-triple all-ones") {
  const std::vector<RawTriple> train = {{"e1", "r1", "e2"}};
  const Dataset d = encode_dataset(train, {}, {}, build_vocabulary(train), false);
  const NodeSpace ns = node_space(d);
  const WeightedAdjacency adj =
      build_weighted_adjacency(count_cooccurrence(d.train, ns), ns);
  CHECK(adj.m.at(0, 1) == 1.0);
  CHECK(adj.m.at(1, 0) == 1.0);
  CHECK(adj.m.at(0, 2) == 1.0);
  CHECK(adj.m.at(2, 0) == 1.0);
}

TEST_CASE("weighted adjacency equals the brute-force oracle on random KGs") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const int32_t entities = 6 + static_cast<int32_t>(seed % 5);
    const auto train = test_helpers::random_triples(100 + seed, entities, 3, 25);
    const NodeSpace ns{entities, 3};
    const WeightedAdjacency adj =
        build_weighted_adjacency(count_cooccurrence(train, ns), ns);
    const auto dense = to_dense(adj.m);
    const auto oracle = brute_force_weighted(brute_force_cooc(train, ns), ns);
    for (int u = 0; u < ns.node_count(); ++u)
      for (int v = 0; v < ns.node_count(); ++v)
        CHECK(std::abs(dense[static_cast<size_t>(u)][static_cast<size_t>(v)] -
                       oracle[static_cast<size_t>(u)][static_cast<size_t>(v)]) < 1e-12);
  }
}

TEST_CASE("off-diagonal weights lie in (0, 1] and support is symmetric") {
  const auto train = test_helpers::random_triples(52, 10, 4, 40);
  const NodeSpace ns{10, 4};
  const WeightedAdjacency adj =
      build_weighted_adjacency(count_cooccurrence(train, ns), ns);
  const auto dense = to_dense(adj.m);
  for (int u = 0; u < ns.node_count(); ++u) {
    for (int v = 0; v < ns.node_count(); ++v) {
      const double w = dense[static_cast<size_t>(u)][static_cast<size_t>(v)];
      if (u != v && w != 0.0) {
        CHECK(w > 0.0);
        CHECK(w <= 1.0);
      }
      const double wt = dense[static_cast<size_t>(v)][static_cast<size_t>(u)];
      CHECK((w > 0) == (wt > 0));
    }
  }
}

TEST_CASE("binary adjacency has the same support, entries in {0,1}") {
  const auto train = test_helpers::random_triples(53, 8, 3, 30);
  const NodeSpace ns{8, 3};
  const CoocCounts counts = count_cooccurrence(train, ns);
  const WeightedAdjacency w = build_weighted_adjacency(counts, ns);
  const WeightedAdjacency b = build_binary_adjacency(counts, ns);
  const auto dw = to_dense(w.m);
  const auto db = to_dense(b.m);
  for (int u = 0; u < ns.node_count(); ++u) {
    for (int v = 0; v < ns.node_count(); ++v) {
      const double bw = db[static_cast<size_t>(u)][static_cast<size_t>(v)];
      CHECK((bw == 0.0 || bw == 1.0));
      CHECK((bw != 0.0) == (dw[static_cast<size_t>(u)][static_cast<size_t>(v)] != 0.0));
    }
  }
}

TEST_CASE("renormalize scalar case") {
  WeightedAdjacency adj;
  adj.m.dim = 1;
  adj.m.row_ptr = {0, 1};
  adj.m.col = {0};
  adj.m.val = {1.0};
  const NormalizedAdjacency n = renormalize(adj, SelfLoopMode::doubled);
  CHECK(n.m.at(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  // single mode keeps the unit diagonal: 1 / sqrt(1 * 1) = 1 as well
  const NormalizedAdjacency s = renormalize(adj, SelfLoopMode::single);
  CHECK(s.m.at(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("renormalize matches a dense oracle") {
  const std::vector<RawTriple> train = {{"e1", "r1", "e2"}};
  const Dataset d = encode_dataset(train, {}, {}, build_vocabulary(train), false);
  const NodeSpace ns = node_space(d);
  const WeightedAdjacency adj =
      build_weighted_adjacency(count_cooccurrence(d.train, ns), ns);

  for (const SelfLoopMode mode : {SelfLoopMode::doubled, SelfLoopMode::single}) {
    const NormalizedAdjacency got = renormalize(adj, mode);
    const auto oracle = brute_force_renormalize(to_dense(adj.m),
                                                mode == SelfLoopMode::doubled);
    const auto dense = to_dense(got.m);
    for (int u = 0; u < ns.node_count(); ++u)
      for (int v = 0; v < ns.node_count(); ++v)
        CHECK(std::abs(dense[static_cast<size_t>(u)][static_cast<size_t>(v)] -
                       oracle[static_cast<size_t>(u)][static_cast<size_t>(v)]) < 1e-12);
  }
}

TEST_CASE("renormalized symmetric binary adjacency stays symmetric") {
  const auto train = test_helpers::random_triples(54, 7, 3, 25);
  const NodeSpace ns{7, 3};
  const WeightedAdjacency b = build_binary_adjacency(count_cooccurrence(train, ns), ns);
  const NormalizedAdjacency n = renormalize(b, SelfLoopMode::doubled);
  const auto dense = to_dense(n.m);
  for (int u = 0; u < ns.node_count(); ++u)
    for (int v = 0; v < ns.node_count(); ++v)
      CHECK(dense[static_cast<size_t>(u)][static_cast<size_t>(v)] ==
            doctest::Approx(dense[static_cast<size_t>(v)][static_cast<size_t>(u)])
                .epsilon(1e-15));
}

TEST_CASE("renormalize(binary) commutes with node permutation") {
  const auto train = test_helpers::random_triples(55, 6, 2, 18);
  const NodeSpace ns{6, 2};
  const WeightedAdjacency b = build_binary_adjacency(count_cooccurrence(train, ns), ns);
  const auto base = to_dense(renormalize(b, SelfLoopMode::doubled).m);

  // permute nodes by relabeling the triples consistently (entities among
  // entities, relations among relations, so the node-kind structure holds)
  std::vector<int32_t> eperm = {3, 0, 5, 1, 4, 2};
  std::vector<int32_t> rperm = {1, 0};
  std::vector<Triple> permuted;
  for (const Triple& t : train)
    permuted.push_back({eperm[static_cast<size_t>(t.h)], rperm[static_cast<size_t>(t.r)],
                        eperm[static_cast<size_t>(t.t)]});
  const WeightedAdjacency bp =
      build_binary_adjacency(count_cooccurrence(permuted, ns), ns);
  const auto perm = to_dense(renormalize(bp, SelfLoopMode::doubled).m);

  auto node_map = [&](int v) {
    return v < 6 ? eperm[static_cast<size_t>(v)] : 6 + rperm[static_cast<size_t>(v - 6)];
  };
  for (int u = 0; u < ns.node_count(); ++u)
    for (int v = 0; v < ns.node_count(); ++v)
      CHECK(base[static_cast<size_t>(u)][static_cast<size_t>(v)] ==
            doctest::Approx(perm[static_cast<size_t>(node_map(u))]
                                [static_cast<size_t>(node_map(v))])
                .epsilon(1e-15));
}

TEST_CASE("row mass toward relation columns is bounded by their count") {
  const auto train = test_helpers::random_triples(56, 8, 4, 30);
  const NodeSpace ns{8, 4};
  const WeightedAdjacency adj =
      build_weighted_adjacency(count_cooccurrence(train, ns), ns);
  const auto dense = to_dense(adj.m);
  for (int v = 0; v < ns.node_count(); ++v) {
    double rel_sum = 0;
    int rel_nonzero = 0;
    for (int r = ns.entity_count; r < ns.node_count(); ++r) {
      if (r == v) continue;
      const double w = dense[static_cast<size_t>(v)][static_cast<size_t>(r)];
      rel_sum += w;
      if (w > 0) ++rel_nonzero;
    }
    CHECK(rel_sum <= static_cast<double>(rel_nonzero) + 1e-12);
  }
}

TEST_CASE("adjacency TSV dump is deterministic and ordered") {
  const Dataset d = two_triple_fixture();
  const NodeSpace ns = node_space(d);
  const WeightedAdjacency adj =
      build_weighted_adjacency(count_cooccurrence(d.train, ns), ns);
  std::ostringstream os1, os2;
  dump_adjacency_tsv(adj.m, os1);
  dump_adjacency_tsv(adj.m, os2);
  CHECK(os1.str() == os2.str());
  // first data line is row 0 and the first line mentioning 0.5 exists
  CHECK(os1.str().find("0\t1\t0.5\n") != std::string::npos);
  CHECK(os1.str().find("1\t0\t1\n") != std::string::npos);
}
