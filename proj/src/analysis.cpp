// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/analysis.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "warmlab/rng.hpp"
#include "warmlab/urn.hpp"

namespace warmlab {
namespace {

const Graph& graph_of(const WarmTrajectory& traj) {
  if (traj.config.graph == nullptr) throw std::invalid_argument("trajectory has no graph");
  return *traj.config.graph;
}

std::int32_t arity_of(const Graph& g, VertexId v) { return g.blocks().at(static_cast<std::size_t>(g.vertex(v).block)).n; }

std::int32_t depth_limit_of(const Graph& g, VertexId v) {
  return g.blocks().at(static_cast<std::size_t>(g.vertex(v).block)).depth;
}

// Local index of the edge to `child` at its parent.
std::int32_t child_slot(const Graph& g, VertexId parent, VertexId child) {
  const auto& inc = g.neighbours(parent);
  for (std::size_t i = 0; i < inc.size(); ++i) {
    if (inc[i].other == child) return static_cast<std::int32_t>(i);
  }
  throw std::invalid_argument("vertex is not a neighbour");
}

}  // namespace

TimeRegularity check_time_regular(std::span<const double> times, double lambda, double eps, double horizon,
                                  std::int64_t M) {
  if (!(lambda > 0.0) || !(eps > 0.0)) throw std::invalid_argument("check_time_regular: bad rate or eps");
  TimeRegularity out;
  out.regular = true;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    if (!(eps * k / lambda < times[i] && times[i] < k / (eps * lambda))) {
      out.regular = false;
      break;
    }
  }
  // The next firing happens after the horizon; it is already late when its
  // upper bound does not exceed the horizon.
  const double next = static_cast<double>(times.size() + 1);
  if (next / (eps * lambda) <= horizon) out.regular = false;
  out.horizon_limited = horizon < static_cast<double>(M) / (eps * lambda);
  return out;
}

TimeRegularity check_time_regular(const WarmTrajectory& traj, VertexId v, const ParamSet& params) {
  const Graph& g = graph_of(traj);
  const auto times = firing_times(traj, v);
  return check_time_regular(times, g.vertex(v).rate, params.eps, traj.config.horizon, params.M);
}

double non_disturbing_bound(const ParamSet& p, std::int64_t j) {
  const double jd = static_cast<double>(j);
  const double ratio = (2.0 * static_cast<double>(p.m) + p.q * jd / (p.eps * p.eps)) / (jd / 2.0);
  return 1.0 - static_cast<double>(p.n) * std::pow(ratio, p.alpha);
}

PolyaCheck check_polya_conditions(std::span<const double> uniforms, const ParamSet& p) {
  PolyaCheck out;
  const auto available = static_cast<std::int64_t>(uniforms.size());
  const std::int64_t mprime = p.mprime > 0 ? p.mprime : derive_mprime(p.M, p.eps, p.q);
  out.checked_until = available;

  if (available < p.M) {
    out.regular_limited = true;
  } else {
    ReplayUniforms replay(uniforms.first(static_cast<std::size_t>(p.M)));
    const UrnTrace trace = run_sequential(head_start_state(p.m, p.n), p.alpha, p.M, replay);
    out.regular = corollary_event(trace, p.m);
    if (out.regular) out.p_children = exact_colours(trace, p.m);
  }

  out.non_disturbing = true;
  out.non_disturbing_limited = available < mprime;
  for (std::int64_t j = p.M + 1; j <= std::min(mprime, available); ++j) {
    if (!(uniforms[static_cast<std::size_t>(j - 1)] <= non_disturbing_bound(p, j))) {
      out.non_disturbing = false;
      break;
    }
  }

  out.well_behaved = true;
  std::int64_t high = 0;
  const double cut = 1.0 - p.delta0 / 2.0;
  for (std::int64_t j = mprime + 1; j <= available; ++j) {
    if (uniforms[static_cast<std::size_t>(j - 1)] >= cut) ++high;
    if (static_cast<double>(high) > p.delta0 * static_cast<double>(j)) {
      out.well_behaved = false;
      break;
    }
  }
  return out;
}

ParentCheck check_parent(const WarmTrajectory& traj, VertexId v, const ParamSet& params) {
  const Graph& g = graph_of(traj);
  const VertexId parent = g.vertex(v).parent;
  if (parent == kNoVertex) throw std::invalid_argument("check_parent: vertex has no parent");
  const EdgeId edge = g.parent_edge(v);
  const VertexTimes t = vertex_times(params, g.vertex(v).rate);
  std::int64_t early = 0;
  std::int64_t late = 0;
  for (const auto i : traj.vertex_events[static_cast<std::size_t>(parent)]) {
    const FiringEvent& ev = traj.events[i];
    if (ev.edge != edge) continue;
    if (ev.time <= t.t0) {
      ++early;
    } else if (ev.time <= t.t1) {
      ++late;
    }
  }
  ParentCheck out;
  out.nurturing = early == params.m - 1;
  out.non_disturbing = late == 0;
  out.good = out.nurturing && out.non_disturbing;
  out.horizon_limited = traj.config.horizon < t.t1;
  return out;
}

SparkCheck check_spark(const WarmTrajectory& traj, VertexId v, const ParamSet& params) {
  const Graph& g = graph_of(traj);
  if (g.vertex(v).depth < 2) throw std::invalid_argument("check_spark: vertex depth must be at least 2");
  const VertexId parent = g.vertex(v).parent;
  const VertexTimes t = vertex_times(params, g.vertex(v).rate);
  SparkCheck out;
  out.horizon_limited = traj.config.horizon < t.t1;

  for (const auto& inc : g.neighbours(parent)) {
    const auto& idx = traj.vertex_events[static_cast<std::size_t>(inc.other)];
    if (!idx.empty() && traj.events[idx.front()].time < t.t0) return out;
  }
  if (!check_time_regular(traj, v, params).regular) return out;

  const std::int32_t slot = child_slot(g, parent, v);
  std::int64_t early = 0;
  for (const auto i : traj.vertex_events[static_cast<std::size_t>(parent)]) {
    const FiringEvent& ev = traj.events[i];
    if (ev.time <= t.t0) {
      ++early;
      if (ev.edge_index != slot) return out;
    } else if (ev.time < t.t1) {
      return out;
    } else {
      break;
    }
  }
  out.spark = early == params.m - 1;
  return out;
}

DisconnectCheck check_disconnect(const WarmTrajectory& traj, VertexId v) {
  const Graph& g = graph_of(traj);
  const Vertex& vx = g.vertex(v);
  if (vx.parent == kNoVertex) throw std::invalid_argument("check_disconnect: vertex has no parent");
  const std::int32_t n = arity_of(g, v);
  if (static_cast<std::int32_t>(vx.children.size()) < n) {
    throw std::invalid_argument("check_disconnect: last child lies beyond the truncation depth");
  }
  const VertexId last = vx.children.back();
  if (static_cast<std::int32_t>(g.vertex(last).children.size()) < arity_of(g, last)) {
    throw std::invalid_argument("check_disconnect: the last child's own children lie beyond the truncation depth");
  }
  const double alpha = traj.config.alpha;
  auto power = [&](std::int64_t j) {
    return std::pow(1.0 + static_cast<double>(j) / static_cast<double>(n), alpha);
  };
  DisconnectCheck out;
  out.e1 = true;
  const auto fired_v = static_cast<std::int64_t>(traj.vertex_events[static_cast<std::size_t>(v)].size());
  for (std::int64_t j = 0; j < fired_v; ++j) {
    const double w = power(j);
    if (!(choice_uniform(g, traj.config.seed, v, j + 1) <= w / (1.0 + w))) {
      out.e1 = false;
      break;
    }
  }
  out.e2 = true;
  const auto fired_last = static_cast<std::int64_t>(traj.vertex_events[static_cast<std::size_t>(last)].size());
  for (std::int64_t j = 0; j < fired_last; ++j) {
    if (!(choice_uniform(g, traj.config.seed, last, j + 1) >= 1.0 / (1.0 + power(j)))) {
      out.e2 = false;
      break;
    }
  }
  out.violated = out.e1 && out.e2 && traj.final_tallies[static_cast<std::size_t>(g.parent_edge(last))] > 1;
  return out;
}

GoodnessReport build_goodness_report(const WarmTrajectory& traj, const ParamSet& params,
                                     const AnalysisOptions& options) {
  const Graph& g = graph_of(traj);
  GoodnessReport report;
  report.graph = &g;
  report.uniform_limit = options.uniform_limit;
  report.vertices.assign(g.size(), {});

  std::vector<TimeRegularity> regular(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) regular[v] = check_time_regular(traj, static_cast<VertexId>(v), params);

  std::vector<double> uniforms(static_cast<std::size_t>(std::max<std::int64_t>(options.uniform_limit, 0)));
  for (std::size_t vi = 0; vi < g.size(); ++vi) {
    const auto v = static_cast<VertexId>(vi);
    const Vertex& vx = g.vertex(v);
    VertexGoodness& out = report.vertices[vi];
    out.time_regular = regular[vi].regular;
    if (vx.parent == kNoVertex) continue;

    out.time_good = true;
    for (const auto c : vx.children) {
      out.time_good = out.time_good && regular[static_cast<std::size_t>(c)].regular;
      out.horizon_limited = out.horizon_limited || regular[static_cast<std::size_t>(c)].horizon_limited;
    }
    out.truncated = vx.depth >= depth_limit_of(g, v);

    UniformStream stream(traj.config.seed, choice_stream(g, v));
    for (auto& u : uniforms) u = stream.next();
    ParamSet local = params;
    local.n = arity_of(g, v);
    const PolyaCheck polya = check_polya_conditions(uniforms, local);
    out.polya_regular = polya.regular;
    out.polya_non_disturbing = polya.non_disturbing;
    out.polya_well_behaved = polya.well_behaved;
    out.polya_good = polya.good();
    out.p_children = polya.p_children;
    out.tree_good = out.time_good && out.polya_good;
  }
  return report;
}

CrystalTree build_crystal_tree(const GoodnessReport& report, VertexId root) {
  if (report.graph == nullptr) throw std::invalid_argument("build_crystal_tree: report has no graph");
  const Graph& g = *report.graph;
  CrystalTree tree;
  tree.root = root;
  if (!report.vertices.at(static_cast<std::size_t>(root)).tree_good) return tree;
  tree.nodes.push_back(root);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const VertexId v = tree.nodes[i];
    const auto& children = g.vertex(v).children;
    std::int64_t count = 0;
    for (const auto slot : report.vertices[static_cast<std::size_t>(v)].p_children) {
      if (slot < 1 || static_cast<std::size_t>(slot) > children.size()) continue;
      const VertexId c = children[static_cast<std::size_t>(slot - 1)];
      if (!report.vertices[static_cast<std::size_t>(c)].tree_good) continue;
      tree.nodes.push_back(c);
      tree.edges.emplace_back(v, c);
      ++count;
    }
    tree.offspring[v] = count;
  }
  return tree;
}

GwStatistics gw_statistics_from_counts(std::span<const std::int64_t> counts) {
  GwStatistics out;
  out.nodes = static_cast<std::int64_t>(counts.size());
  out.has_data = !counts.empty();
  if (!out.has_data) {
    out.mean = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sum = 0.0;
  for (const auto c : counts) {
    ++out.histogram[c];
    sum += static_cast<double>(c);
  }
  const double n = static_cast<double>(counts.size());
  out.mean = sum / n;
  if (counts.size() < 2) {
    out.mean_ci = {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    return out;
  }
  double ss = 0.0;
  for (const auto c : counts) ss += (static_cast<double>(c) - out.mean) * (static_cast<double>(c) - out.mean);
  const double half = kZ95 * std::sqrt(ss / (n - 1.0) / n);
  out.mean_ci = {out.mean - half, out.mean + half};
  out.supercritical = out.mean_ci.lo > 1.0;
  return out;
}

GwStatistics gw_statistics(const std::vector<CrystalTree>& trees, const Graph& graph) {
  std::vector<std::int64_t> counts;
  for (const auto& tree : trees) {
    for (const auto& [v, c] : tree.offspring) {
      if (graph.vertex(v).depth < depth_limit_of(graph, v)) counts.push_back(c);
    }
  }
  return gw_statistics_from_counts(counts);
}

void write_histogram_csv(std::ostream& out, const GwStatistics& stats) {
  out << "offspring,count\n";
  for (const auto& [k, c] : stats.histogram) out << k << ',' << c << '\n';
}

nlohmann::json to_json(const GoodnessReport& report) {
  nlohmann::json vertices = nlohmann::json::array();
  for (std::size_t v = 0; v < report.vertices.size(); ++v) {
    const auto& g = report.vertices[v];
    vertices.push_back({{"vertex", report.graph->vertex(static_cast<VertexId>(v)).label},
                        {"time_regular", g.time_regular},
                        {"time_good", g.time_good},
                        {"polya_regular", g.polya_regular},
                        {"polya_non_disturbing", g.polya_non_disturbing},
                        {"polya_well_behaved", g.polya_well_behaved},
                        {"polya_good", g.polya_good},
                        {"tree_good", g.tree_good},
                        {"p_children", g.p_children},
                        {"horizon_limited", g.horizon_limited},
                        {"truncated", g.truncated}});
  }
  return {{"uniform_limit", report.uniform_limit}, {"vertices", vertices}};
}

nlohmann::json to_json(const CrystalTree& tree, const Graph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto v : tree.nodes) nodes.push_back(graph.vertex(v).label);
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : tree.edges) edges.push_back({graph.vertex(a).label, graph.vertex(b).label});
  return {{"root", tree.root == kNoVertex ? std::string() : graph.vertex(tree.root).label},
          {"nodes", nodes},
          {"edges", edges}};
}

nlohmann::json to_json(const GwStatistics& stats) {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [k, c] : stats.histogram) hist[std::to_string(k)] = c;
  nlohmann::json out{{"nodes", stats.nodes}, {"histogram", hist}, {"has_data", stats.has_data}};
  if (stats.has_data) {
    out["mean"] = stats.mean;
    out["mean_ci"] = {stats.mean_ci.lo, stats.mean_ci.hi};
  } else {
    out["mean"] = "no data";
  }
  out["supercritical"] = stats.supercritical;
  return out;
}

}  // namespace warmlab
