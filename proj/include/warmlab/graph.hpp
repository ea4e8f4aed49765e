// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Truncated rooted n-ary trees and chains of such trees joined root to root.
//
// Labels: the root of a tree is "0"; the children of the root are "1".."n"
// and the children of v are v1..vn. When n >= 10 the digits are separated by
// dots ("3.12.1"). In a chain of several trees every label carries the block
// prefix "b<j>:".
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace warmlab {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;
inline constexpr VertexId kNoVertex = -1;

struct Vertex {
  std::string label;
  std::int32_t block = 0;
  std::vector<std::int32_t> digits;  // path from the block root
  std::int32_t depth = 0;
  VertexId parent = kNoVertex;
  std::vector<VertexId> children;    // in digit order
  std::vector<VertexId> spine;       // roots of neighbouring blocks
  double rate = 1.0;                 // q^depth by repeated multiplication
};

struct Edge {
  VertexId a = kNoVertex;  // parent, or the lower-indexed root of a spine edge
  VertexId b = kNoVertex;
  bool spine = false;
};

struct Incident {
  EdgeId edge;
  VertexId other;
};

struct TreeBlock {
  std::int32_t n = 2;
  double q = 0.5;
  std::int32_t depth = 1;
};

class Graph {
 public:
  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<TreeBlock>& blocks() const noexcept { return blocks_; }
  const Vertex& vertex(VertexId v) const { return vertices_.at(static_cast<std::size_t>(v)); }
  std::size_t size() const noexcept { return vertices_.size(); }

  /// Throws std::out_of_range for an unknown label. "" names the first root.
  VertexId find(const std::string& label) const;
  bool contains(const std::string& label) const;

  /// Local edge order at v: parent edge (index 0 when present), children in
  /// digit order, then spine edges.
  const std::vector<Incident>& neighbours(VertexId v) const { return incidence_.at(static_cast<std::size_t>(v)); }
  std::vector<Incident> neighbours(const std::string& label) const { return neighbours(find(label)); }

  /// Edge between a child and its parent.
  EdgeId parent_edge(VertexId child) const;
  /// "a-b" with vertex labels.
  std::string edge_name(EdgeId e) const;

  /// True when `d` is `v` or a descendant of `v` (same block).
  bool in_subtree(VertexId v, VertexId d) const;
  /// Labels of v and all its descendants.
  std::vector<VertexId> subtree(VertexId v) const;

 private:
  friend Graph build_composite(const std::vector<TreeBlock>& blocks);
  void link();

  std::vector<TreeBlock> blocks_;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incident>> incidence_;
  std::vector<EdgeId> parent_edge_;
  std::unordered_map<std::string, VertexId> index_;
};

/// Complete n-ary tree of depth D with rates q^d(v).
Graph build_tree(std::int32_t n, std::int32_t depth, double q);

/// Blocks joined by spine edges between consecutive roots; every root has rate 1.
Graph build_composite(const std::vector<TreeBlock>& blocks);

/// Label text for a digit path under arity n ("0" for the empty path).
std::string label_for(const std::vector<std::int32_t>& digits, std::int32_t n);

struct SparkVertices {
  std::vector<std::string> v;        // 1 2^(k-1) 111
  std::vector<std::string> anchors;  // v n 111 (empty unless requested)
};

/// The first `count` independent spark vertices; throws std::invalid_argument
/// when they (or their anchors) do not fit within depth D.
SparkVertices spark_vertices(std::int32_t n, std::int32_t depth, std::int32_t count, bool with_anchors = false);

/// One line per vertex: `label rate parent child... [~spine...]`, preceded
/// by a header line describing the blocks.
void write_adjacency(std::ostream& out, const Graph& graph);
Graph read_adjacency(std::istream& in);

}  // namespace warmlab
