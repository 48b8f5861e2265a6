#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "freezetree/builders.hpp"
#include "freezetree/metrics.hpp"

using namespace freezetree;

namespace {

// Breadth-first distances on the undirected tree.
std::vector<std::int64_t> bfs(const FrozenTree& t, VertexId source) {
  std::vector<std::vector<VertexId>> adj(t.size());
  for (std::size_t v = 0; v < t.size(); ++v) {
    if (t.parent[v] == kNoVertex) continue;
    adj[v].push_back(t.parent[v]);
    adj[static_cast<std::size_t>(t.parent[v])].push_back(static_cast<VertexId>(v));
  }
  std::vector<std::int64_t> dist(t.size(), -1);
  std::queue<VertexId> q;
  dist[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    const auto x = q.front();
    q.pop();
    for (auto y : adj[static_cast<std::size_t>(x)]) {
      if (dist[static_cast<std::size_t>(y)] < 0) {
        dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
        q.push(y);
      }
    }
  }
  return dist;
}

FreezeSequence random_surviving(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return make_sequence(n, {0.5, IidShape{}}, rng);
}

}  // namespace

TEST(GraphDistance, MatchesBfs) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto seq = random_surviving(100, s);
    Rng rng = make_rng(s + 50);
    const auto t = (s % 2 == 0) ? build_forward(seq, rng) : build_coalescent(seq, rng).tree;
    for (VertexId u = 0; u < static_cast<VertexId>(t.size()); ++u) {
      const auto d = bfs(t, u);
      for (VertexId v = 0; v < static_cast<VertexId>(t.size()); ++v) {
        EXPECT_EQ(graph_distance(t, u, v), d[static_cast<std::size_t>(v)]);
      }
    }
  }
}

TEST(GraphDistance, MetricAxioms) {
  const auto seq = random_surviving(200, 3);
  Rng rng = make_rng(4);
  const auto t = build_forward(seq, rng);
  for (int r = 0; r < 2000; ++r) {
    const auto a = static_cast<VertexId>(uniform_index(rng, t.size()));
    const auto b = static_cast<VertexId>(uniform_index(rng, t.size()));
    const auto c = static_cast<VertexId>(uniform_index(rng, t.size()));
    EXPECT_EQ(graph_distance(t, a, a), 0);
    EXPECT_EQ(graph_distance(t, a, b), graph_distance(t, b, a));
    EXPECT_LE(graph_distance(t, a, c), graph_distance(t, a, b) + graph_distance(t, b, c));
  }
}

TEST(GraphDistance, RootToFrozenFive) {
  // Root Frozen(2) -> Active -> Frozen(5).
  FrozenTree t;
  t.n = 5;
  t.parent = {kNoVertex, 0, 1, 1};
  t.label = {{VertexKind::Frozen, 2}, {VertexKind::Active, 1}, {VertexKind::Frozen, 5}, {VertexKind::Active, 2}};
  t.edge_label = {0, 1, 3, 4};
  t.birth = {1, 5, 4, 5};
  t.depth = {0, 1, 2, 2};
  EXPECT_EQ(graph_distance(t, 0, 2), 2);
  EXPECT_EQ(graph_distance(t, 2, 3), 2);
  EXPECT_EQ(height(t), 2);
  EXPECT_EQ(lowest_common_ancestor(t, 2, 3), 1);
  EXPECT_THROW(graph_distance(t, 0, 4), std::out_of_range);
}

TEST(Height, SingleVertexAndPath) {
  Rng rng = make_rng(1);
  FrozenTree single;
  single.parent = {kNoVertex};
  single.depth = {0};
  EXPECT_EQ(height(single), 0);
  // One active vertex before each +: height between 1 and the number of + steps.
  for (int r = 0; r < 50; ++r) {
    const auto t = build_forward(sequence_from_text("+-+-+-+"), rng);
    EXPECT_GE(height(t), 1);
    EXPECT_LE(height(t), 4);
    EXPECT_EQ(height(t), *std::max_element(t.depth.begin(), t.depth.end()));
  }
}

TEST(Height, RecursiveTreeGrowsLikeELogN) {
  // Coarse: the height of a random recursive tree is e ln n - O(ln ln n).
  const std::size_t n = 1'000'000;
  const auto seq = all_plus_sequence(n);
  Rng rng = make_rng(8);
  double total = 0.0;
  const int reps = 3;
  for (int r = 0; r < reps; ++r) total += static_cast<double>(height(build_forward(seq, rng)));
  const double ratio = total / reps / std::log(static_cast<double>(n));
  EXPECT_NEAR(ratio, std::exp(1.0), 0.1 * std::exp(1.0) + 0.3);
}

TEST(DcDistance, AllPlusThreeLastStepMerge) {
  const auto seq = all_plus_sequence(3);
  const auto w = walk(seq);
  bool seen = false;
  for (std::uint64_t s = 0; s < 100 && !seen; ++s) {
    Rng rng = make_rng(s);
    const auto built = build_coalescent(seq, rng);
    if (coal_time(built.genealogy, 0, 1) != 2) continue;
    seen = true;
    EXPECT_NEAR(dc_distance(w, built.genealogy, 0, 1), 1.0 / 3 + 1.0 / 4, 1e-15);
    EXPECT_DOUBLE_EQ(delta(built.genealogy, 0, 1), 1.0);
  }
  EXPECT_TRUE(seen);
}

TEST(DcDistance, DirectSummationOracle) {
  const auto seq = random_surviving(300, 17);
  const auto w = walk(seq);
  Rng rng = make_rng(18);
  const auto [t, gen] = build_coalescent(seq, rng);
  for (int r = 0; r < 500; ++r) {
    const auto u = static_cast<VertexId>(uniform_index(rng, t.size()));
    const auto v = static_cast<VertexId>(uniform_index(rng, t.size()));
    const auto c = coal_time(gen, u, v);
    double expected = 0.0;
    if (u != v) {
      for (std::size_t i = c; i <= gen.birth[static_cast<std::size_t>(u)]; ++i) expected += 0.5 / static_cast<double>(w[i]);
      for (std::size_t i = c; i <= gen.birth[static_cast<std::size_t>(v)]; ++i) expected += 0.5 / static_cast<double>(w[i]);
    }
    const double dc = dc_distance(w, gen, u, v);
    EXPECT_NEAR(dc, expected, 1e-9 * (1.0 + expected));
    EXPECT_DOUBLE_EQ(dc, dc_distance(w, gen, v, u));
    EXPECT_GE(dc, 0.0);
    EXPECT_DOUBLE_EQ(delta(gen, u, v), delta(gen, v, u));
  }
  EXPECT_EQ(dc_distance(w, gen, 3, 3), 0.0);
  EXPECT_THROW(dc_distance(w, gen, 0, static_cast<VertexId>(t.size())), std::out_of_range);
}

TEST(DistanceSample, ShapeAndNormalization) {
  const auto seq = random_surviving(400, 21);
  const auto w = walk(seq);
  Rng rng = make_rng(22);
  const auto [t, gen] = build_coalescent(seq, rng);
  for (auto mode : {DistanceMode::Graph, DistanceMode::Coalescent, DistanceMode::Delta}) {
    const auto s = sample_distance_matrix(t, &gen, &w, 6, mode, 0.5, rng);
    ASSERT_EQ(s.k(), 6u);
    ASSERT_EQ(s.matrix.size(), 36u);
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_EQ(s.at(i, i), 0.0);
      for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_EQ(s.at(i, j), s.at(j, i));
        EXPECT_GE(s.at(i, j), 0.0);
      }
    }
    if (mode == DistanceMode::Graph) {
      const double raw = static_cast<double>(graph_distance(t, s.vertex_ids[0], s.vertex_ids[1]));
      EXPECT_DOUBLE_EQ(s.at(0, 1), raw / std::sqrt(400.0));
    }
  }
  EXPECT_THROW(sample_distance_matrix(t, nullptr, nullptr, 3, DistanceMode::Delta, 0.5, rng), std::invalid_argument);
  EXPECT_THROW(sample_distance_matrix(t, &gen, nullptr, 3, DistanceMode::Coalescent, 0.5, rng), std::invalid_argument);
  EXPECT_THROW(sample_distance_matrix(t, nullptr, nullptr, 1, DistanceMode::Graph, 0.5, rng), std::invalid_argument);
}

TEST(DistanceSample, ModesParseAndExport) {
  EXPECT_EQ(parse_distance_mode("graph"), DistanceMode::Graph);
  EXPECT_EQ(parse_distance_mode("dc"), DistanceMode::Coalescent);
  EXPECT_EQ(parse_distance_mode("coalescent"), DistanceMode::Coalescent);
  EXPECT_EQ(parse_distance_mode("delta"), DistanceMode::Delta);
  EXPECT_THROW(parse_distance_mode("euclid"), std::invalid_argument);

  Rng rng = make_rng(1);
  const auto t = build_forward(sequence_from_text("+++"), rng);
  const auto s = distance_matrix(t, nullptr, nullptr, {0, 3}, DistanceMode::Graph, 0.0);
  std::ostringstream csv;
  write_distance_csv(csv, s);
  EXPECT_EQ(csv.str().rfind("# freezetree distance v1 mode=graph n=3", 0), 0u);
  EXPECT_NE(csv.str().find("vertex_id,0,3\n"), std::string::npos);
  EXPECT_NE(to_json(s).find("\"mode\":\"graph\""), std::string::npos);
}
