// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "warmlab/graph.hpp"
#include "warmlab/rng.hpp"

using namespace warmlab;

namespace {
std::int64_t geometric_count(std::int64_t n, std::int64_t depth) {
  std::int64_t total = 0;
  std::int64_t layer = 1;
  for (std::int64_t d = 0; d <= depth; ++d) {
    total += layer;
    layer *= n;
  }
  return total;
}

std::set<std::string> descendants(const Graph& g, const std::string& label) {
  std::set<std::string> out;
  for (const auto v : g.subtree(g.find(label))) out.insert(g.vertex(v).label);
  return out;
}
}  // namespace

TEST_CASE("binary tree of depth 2") {
  const double q = 0.3;
  const Graph g = build_tree(2, 2, q);
  CHECK(g.size() == 7);
  CHECK(g.edges().size() == 6);
  std::multiset<double> rates;
  for (const auto& v : g.vertices()) rates.insert(v.rate);
  CHECK(rates == std::multiset<double>{1.0, q, q, q * q, q * q, q * q, q * q});
  CHECK(g.vertex(g.find("0")).rate == 1.0);
  CHECK(g.find("") == g.find("0"));
}

TEST_CASE("ternary star") {
  const Graph g = build_tree(3, 1, 0.5);
  CHECK(g.neighbours("0").size() == 3);
  for (const char* leaf : {"1", "2", "3"}) CHECK(g.neighbours(leaf).size() == 1);
}

TEST_CASE("deep binary tree") {
  const double q = 0.5;
  const Graph g = build_tree(2, 10, q);
  CHECK(g.size() == 2047);
  double expected = 1.0;
  for (int i = 0; i < 10; ++i) expected *= q;
  CHECK(g.vertex(g.find("1111111111")).rate == expected);
}

TEST_CASE("local edge order") {
  const Graph g = build_tree(2, 3, 0.5);
  const auto root = g.neighbours("0");
  REQUIRE(root.size() == 2);
  CHECK(g.vertex(root[0].other).label == "1");
  CHECK(g.vertex(root[1].other).label == "2");
  const auto mid = g.neighbours("12");
  REQUIRE(mid.size() == 3);
  CHECK(g.vertex(mid[0].other).label == "1");
  CHECK(g.vertex(mid[1].other).label == "121");
  CHECK(g.vertex(mid[2].other).label == "122");
  CHECK(g.neighbours("122").size() == 1);
  CHECK(g.edge_name(g.parent_edge(g.find("12"))) == "1-12");
  CHECK_THROWS_AS(g.find("3"), std::out_of_range);
}

TEST_CASE("labels for wide trees are dotted") {
  CHECK(label_for({}, 3) == "0");
  CHECK(label_for({1, 2}, 3) == "12");
  CHECK(label_for({1, 12}, 12) == "1.12");
}

TEST_CASE("spark vertices") {
  const auto s = spark_vertices(2, 8, 3);
  CHECK(s.v == std::vector<std::string>{"1111", "12111", "122111"});
  const auto a = spark_vertices(3, 9, 2, true);
  CHECK(a.anchors == std::vector<std::string>{"11113111", "121113111"});
  CHECK_THROWS(spark_vertices(2, 5, 3));
  CHECK(spark_vertices(2, 8, 1, true).anchors == std::vector<std::string>{"11112111"});
  CHECK_THROWS(spark_vertices(2, 7, 1, true));
}

TEST_CASE("spark neighbourhoods are disjoint") {
  const Graph g = build_tree(2, 9, 0.5);
  std::vector<std::set<std::string>> sets;
  for (int k = 1; k <= 3; ++k) sets.push_back(descendants(g, "1" + std::string(static_cast<std::size_t>(k - 1), '2') + "1"));
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      std::vector<std::string> common;
      std::set_intersection(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(), std::back_inserter(common));
      CHECK(common.empty());
    }
  }
}

TEST_CASE("composite of two blocks") {
  const Graph g = build_composite({{2, 0.5, 1}, {3, 0.25, 1}});
  CHECK(g.size() == 3 + 4);
  CHECK(g.neighbours("b0:0").size() == 3);
  CHECK(g.neighbours("b1:0").size() == 4);
  const auto last = g.neighbours("b1:0").back();
  CHECK(g.vertex(last.other).label == "b0:0");
  CHECK(g.edges()[static_cast<std::size_t>(last.edge)].spine);
  CHECK(g.vertex(g.find("b1:2")).rate == 0.25);
}

TEST_CASE("single block composite equals the tree") {
  const Graph a = build_tree(3, 2, 0.1);
  const Graph b = build_composite({{3, 0.1, 2}});
  REQUIRE(a.size() == b.size());
  for (std::size_t v = 0; v < a.size(); ++v) {
    CHECK(a.vertices()[v].label == b.vertices()[v].label);
    CHECK(a.vertices()[v].rate == b.vertices()[v].rate);
  }
  for (const auto& e : b.edges()) CHECK_FALSE(e.spine);
}

TEST_CASE("adjacency round trip and corruption") {
  const Graph g = build_composite({{2, 0.5, 2}, {3, 0.2, 1}, {2, 0.1, 1}});
  std::ostringstream out;
  write_adjacency(out, g);
  std::istringstream in(out.str());
  const Graph back = read_adjacency(in);
  REQUIRE(back.size() == g.size());
  for (std::size_t v = 0; v < g.size(); ++v) CHECK(back.vertices()[v].label == g.vertices()[v].label);
  std::string text = out.str();
  const auto pos = text.find("b0:12");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 5, "b0:99");
  std::istringstream bad(text);
  CHECK_THROWS(read_adjacency(bad));
}

TEST_CASE("property: counts, degrees and rates on random trees and chains") {
  UniformStream u(21, stream_id("graph-property", Purpose::kAuxiliary));
  for (int trial = 0; trial < 60; ++trial) {
    const auto blocks_count = 1 + static_cast<int>(3 * u.next());
    std::vector<TreeBlock> blocks;
    std::int64_t expected = 0;
    for (int b = 0; b < blocks_count; ++b) {
      TreeBlock t{2 + static_cast<std::int32_t>(3 * u.next()), 0.05 + 0.9 * u.next(),
                  1 + static_cast<std::int32_t>(4 * u.next())};
      blocks.push_back(t);
      expected += geometric_count(t.n, t.depth);
    }
    const Graph g = build_composite(blocks);
    REQUIRE(static_cast<std::int64_t>(g.size()) == expected);
    CHECK(g.edges().size() == g.size() - 1);
    for (std::size_t vi = 0; vi < g.size(); ++vi) {
      const Vertex& v = g.vertices()[vi];
      const TreeBlock& t = blocks[static_cast<std::size_t>(v.block)];
      const auto degree = static_cast<std::int32_t>(g.neighbours(static_cast<VertexId>(vi)).size());
      const std::int32_t spine = static_cast<std::int32_t>(v.spine.size());
      if (v.depth == 0) {
        CHECK(degree == t.n + spine);
        CHECK((blocks.size() == 1 ? spine == 0 : (spine == 1 || spine == 2)));
      } else if (v.depth < t.depth) {
        CHECK(degree == t.n + 1);
      } else {
        CHECK(degree == 1);
      }
      double rate = 1.0;
      for (int d = 0; d < v.depth; ++d) rate *= t.q;
      CHECK(v.rate == rate);
      if (v.parent != kNoVertex) CHECK(g.neighbours(static_cast<VertexId>(vi))[0].other == v.parent);
    }
  }
}
