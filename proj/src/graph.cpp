// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/graph.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace warmlab {
namespace {

std::string format_rate(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string vertex_line(const Graph& g, const Vertex& v) {
  std::ostringstream line;
  line << v.label << ' ' << format_rate(v.rate) << ' '
       << (v.parent == kNoVertex ? std::string("-") : g.vertex(v.parent).label);
  for (const auto c : v.children) line << ' ' << g.vertex(c).label;
  for (const auto s : v.spine) line << " ~" << g.vertex(s).label;
  return line.str();
}

std::string header_line(const Graph& g) {
  std::ostringstream line;
  line << "# warmlab-graph";
  for (const auto& b : g.blocks()) line << ' ' << b.n << ':' << format_rate(b.q) << ':' << b.depth;
  return line.str();
}

}  // namespace

std::string label_for(const std::vector<std::int32_t>& digits, std::int32_t n) {
  if (digits.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (n >= 10 && i > 0) out += '.';
    out += std::to_string(digits[i]);
  }
  return out;
}

VertexId Graph::find(const std::string& label) const {
  if (label.empty() && !vertices_.empty()) return 0;
  const auto it = index_.find(label);
  if (it == index_.end()) throw std::out_of_range("unknown vertex: " + label);
  return it->second;
}

bool Graph::contains(const std::string& label) const { return index_.count(label) > 0; }

EdgeId Graph::parent_edge(VertexId child) const {
  const EdgeId e = parent_edge_.at(static_cast<std::size_t>(child));
  if (e < 0) throw std::invalid_argument("vertex has no parent: " + vertex(child).label);
  return e;
}

std::string Graph::edge_name(EdgeId e) const {
  const Edge& edge = edges_.at(static_cast<std::size_t>(e));
  return vertex(edge.a).label + "-" + vertex(edge.b).label;
}

bool Graph::in_subtree(VertexId v, VertexId d) const {
  const Vertex& a = vertex(v);
  const Vertex& b = vertex(d);
  if (a.block != b.block || b.depth < a.depth) return false;
  for (std::size_t i = 0; i < a.digits.size(); ++i) {
    if (a.digits[i] != b.digits[i]) return false;
  }
  return true;
}

std::vector<VertexId> Graph::subtree(VertexId v) const {
  std::vector<VertexId> out{v};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto c : vertex(out[i]).children) out.push_back(c);
  }
  return out;
}

void Graph::link() {
  incidence_.assign(vertices_.size(), {});
  parent_edge_.assign(vertices_.size(), -1);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].parent != kNoVertex) {
      parent_edge_[i] = static_cast<EdgeId>(edges_.size());
      edges_.push_back({vertices_[i].parent, static_cast<VertexId>(i), false});
    }
  }
  const std::size_t tree_edges = edges_.size();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (const auto s : vertices_[i].spine) {
      if (static_cast<std::size_t>(s) > i) edges_.push_back({static_cast<VertexId>(i), s, true});
    }
  }
  // Child edges are looked up from the children's parent edges.
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    auto& inc = incidence_[i];
    const Vertex& v = vertices_[i];
    if (v.parent != kNoVertex) inc.push_back({parent_edge_[i], v.parent});
    for (const auto c : v.children) inc.push_back({parent_edge_[static_cast<std::size_t>(c)], c});
    for (const auto s : v.spine) {
      for (std::size_t e = tree_edges; e < edges_.size(); ++e) {
        const Edge& edge = edges_[e];
        if ((edge.a == static_cast<VertexId>(i) && edge.b == s) ||
            (edge.b == static_cast<VertexId>(i) && edge.a == s)) {
          inc.push_back({static_cast<EdgeId>(e), s});
        }
      }
    }
  }
}

Graph build_composite(const std::vector<TreeBlock>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("build_composite: need at least one block");
  Graph g;
  g.blocks_ = blocks;
  const bool prefixed = blocks.size() > 1;
  std::vector<VertexId> roots;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const TreeBlock& block = blocks[b];
    if (block.n < 2) throw std::invalid_argument("tree arity must be at least 2");
    if (block.depth < 1) throw std::invalid_argument("tree depth must be at least 1");
    if (!(block.q > 0.0 && block.q < 1.0)) throw std::invalid_argument("rate decay q must lie in (0,1)");
    const std::string prefix = prefixed ? "b" + std::to_string(b) + ":" : "";
    const auto root = static_cast<VertexId>(g.vertices_.size());
    roots.push_back(root);
    Vertex r;
    r.label = prefix + "0";
    r.block = static_cast<std::int32_t>(b);
    g.vertices_.push_back(r);
    for (std::size_t i = static_cast<std::size_t>(root); i < g.vertices_.size(); ++i) {
      if (g.vertices_[i].depth >= block.depth) continue;
      for (std::int32_t d = 1; d <= block.n; ++d) {
        Vertex c;
        c.block = static_cast<std::int32_t>(b);
        c.digits = g.vertices_[i].digits;
        c.digits.push_back(d);
        c.depth = g.vertices_[i].depth + 1;
        c.parent = static_cast<VertexId>(i);
        c.rate = g.vertices_[i].rate * block.q;
        c.label = prefix + label_for(c.digits, block.n);
        g.vertices_[i].children.push_back(static_cast<VertexId>(g.vertices_.size()));
        g.vertices_.push_back(std::move(c));
      }
    }
  }
  for (std::size_t b = 0; b + 1 < roots.size(); ++b) {
    g.vertices_[static_cast<std::size_t>(roots[b])].spine.push_back(roots[b + 1]);
    g.vertices_[static_cast<std::size_t>(roots[b + 1])].spine.push_back(roots[b]);
  }
  for (std::size_t i = 0; i < g.vertices_.size(); ++i) {
    g.index_.emplace(g.vertices_[i].label, static_cast<VertexId>(i));
  }
  g.link();
  return g;
}

Graph build_tree(std::int32_t n, std::int32_t depth, double q) { return build_composite({{n, q, depth}}); }

SparkVertices spark_vertices(std::int32_t n, std::int32_t depth, std::int32_t count, bool with_anchors) {
  if (n < 2) throw std::invalid_argument("spark_vertices: arity must be at least 2");
  SparkVertices out;
  for (std::int32_t k = 1; k <= count; ++k) {
    std::vector<std::int32_t> digits{1};
    digits.insert(digits.end(), static_cast<std::size_t>(k - 1), 2);
    digits.insert(digits.end(), 3, 1);
    if (static_cast<std::int32_t>(digits.size()) > depth) {
      throw std::invalid_argument("spark_vertices: vertex " + std::to_string(k) + " exceeds depth " +
                                  std::to_string(depth));
    }
    out.v.push_back(label_for(digits, n));
    if (with_anchors) {
      digits.push_back(n);
      digits.insert(digits.end(), 3, 1);
      if (static_cast<std::int32_t>(digits.size()) > depth) {
        throw std::invalid_argument("spark_vertices: anchor " + std::to_string(k) + " exceeds depth " +
                                    std::to_string(depth));
      }
      out.anchors.push_back(label_for(digits, n));
    }
  }
  return out;
}

void write_adjacency(std::ostream& out, const Graph& graph) {
  out << header_line(graph) << '\n';
  for (const auto& v : graph.vertices()) out << vertex_line(graph, v) << '\n';
}

Graph read_adjacency(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("graph text: missing header");
  std::istringstream hs(header);
  std::string hash;
  std::string tag;
  hs >> hash >> tag;
  if (hash != "#" || tag != "warmlab-graph") throw std::invalid_argument("graph text: bad header");
  std::vector<TreeBlock> blocks;
  std::string spec;
  while (hs >> spec) {
    TreeBlock b;
    char c1 = 0;
    char c2 = 0;
    std::istringstream ss(spec);
    if (!(ss >> b.n >> c1 >> b.q >> c2 >> b.depth) || c1 != ':' || c2 != ':') {
      throw std::invalid_argument("graph text: bad block spec " + spec);
    }
    blocks.push_back(b);
  }
  Graph g = build_composite(blocks);
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= g.size() || line != vertex_line(g, g.vertices()[i])) {
      throw std::invalid_argument("graph text: line " + std::to_string(i + 2) + " does not match the header");
    }
    ++i;
  }
  if (i != g.size()) throw std::invalid_argument("graph text: truncated vertex list");
  return g;
}

}  // namespace warmlab
