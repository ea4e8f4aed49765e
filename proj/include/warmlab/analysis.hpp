// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Post-hoc evaluation of recorded trajectories: regularity and goodness of
// vertices, parent behaviour, the initial spark, disconnection of the last
// child edge, and crystallisation trees with offspring statistics.
//
// Events that quantify over all firings or all uniforms are checked on the
// realised or generated range only; the `*_limited` flags say when that
// range falls short of what the event needs.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "json.hpp"
#include "warmlab/graph.hpp"
#include "warmlab/params.hpp"
#include "warmlab/stats.hpp"
#include "warmlab/warm.hpp"

namespace warmlab {

struct TimeRegularity {
  bool regular = false;
  bool horizon_limited = false;  // horizon < t1 = M / (eps lambda)
};

/// eps k / lambda < T_k < k / (eps lambda) for every realised k, and for the
/// next firing k = N + 1 (which is known to come after the horizon).
TimeRegularity check_time_regular(std::span<const double> times, double lambda, double eps, double horizon,
                                  std::int64_t M);
TimeRegularity check_time_regular(const WarmTrajectory& traj, VertexId v, const ParamSet& params);

struct PolyaCheck {
  bool regular = false;
  bool non_disturbing = false;
  bool well_behaved = false;
  std::vector<std::int32_t> p_children;  // local child indices 1..n
  bool regular_limited = false;          // fewer than M uniforms supplied
  bool non_disturbing_limited = false;   // fewer than M' uniforms supplied
  std::int64_t checked_until = 0;        // last j inspected
  bool good() const { return regular && non_disturbing && well_behaved; }
};

/// Applies the urn, non-disturbing and density conditions to U_1..U_L
/// (uniforms[j-1] = U_j).
PolyaCheck check_polya_conditions(std::span<const double> uniforms, const ParamSet& params);

/// Right-hand side 1 - n ((2m + q j / eps^2) / (j/2))^alpha of the
/// non-disturbing condition; may be negative.
double non_disturbing_bound(const ParamSet& params, std::int64_t j);

struct ParentCheck {
  bool nurturing = false;
  bool non_disturbing = false;
  bool good = false;
  bool horizon_limited = false;
};

/// Reinforcements of the edge parent(v)-v by the parent in [0, t0(v)] and
/// (t0(v), t1(v)].
ParentCheck check_parent(const WarmTrajectory& traj, VertexId v, const ParamSet& params);

struct SparkCheck {
  bool spark = false;
  bool horizon_limited = false;
};

/// The initial-spark event at the parent of v; needs depth(v) >= 2.
SparkCheck check_spark(const WarmTrajectory& traj, VertexId v, const ParamSet& params);

struct DisconnectCheck {
  bool e1 = false;
  bool e2 = false;
  bool violated = false;
};

/// Density conditions on the uniforms of v and of its last child over their
/// realised firings, and whether the edge between them was reinforced anyway.
DisconnectCheck check_disconnect(const WarmTrajectory& traj, VertexId v);

struct VertexGoodness {
  bool time_regular = false;
  bool time_good = false;
  bool polya_regular = false;
  bool polya_non_disturbing = false;
  bool polya_well_behaved = false;
  bool polya_good = false;
  bool tree_good = false;
  std::vector<std::int32_t> p_children;
  bool horizon_limited = false;  // some verdict needed data beyond the horizon
  bool truncated = false;        // children lie beyond the truncation depth
};

struct GoodnessReport {
  const Graph* graph = nullptr;
  std::vector<VertexGoodness> vertices;  // indexed by VertexId; root entries stay false
  std::int64_t uniform_limit = 0;
};

struct AnalysisOptions {
  std::int64_t uniform_limit = 1 << 16;  // U_1..U_limit are generated per vertex
};

GoodnessReport build_goodness_report(const WarmTrajectory& traj, const ParamSet& params,
                                     const AnalysisOptions& options = {});

struct CrystalTree {
  VertexId root = kNoVertex;
  std::vector<VertexId> nodes;                           // breadth-first
  std::vector<std::pair<VertexId, VertexId>> edges;      // (parent, child)
  std::map<VertexId, std::int64_t> offspring;
  bool empty() const { return nodes.empty(); }
};

/// Breadth-first closure over tree-good P-children, starting at a tree-good root.
CrystalTree build_crystal_tree(const GoodnessReport& report, VertexId root);

struct GwStatistics {
  std::map<std::int64_t, std::int64_t> histogram;  // offspring count -> nodes
  std::int64_t nodes = 0;
  bool has_data = false;
  double mean = 0.0;
  Interval mean_ci;
  bool supercritical = false;  // mean_ci.lo > 1
};

/// Pools offspring counts of crystal nodes strictly above the truncation depth.
GwStatistics gw_statistics(const std::vector<CrystalTree>& trees, const Graph& graph);
/// Same, from raw offspring counts.
GwStatistics gw_statistics_from_counts(std::span<const std::int64_t> counts);

void write_histogram_csv(std::ostream& out, const GwStatistics& stats);

nlohmann::json to_json(const GoodnessReport& report);
nlohmann::json to_json(const CrystalTree& tree, const Graph& graph);
nlohmann::json to_json(const GwStatistics& stats);

}  // namespace warmlab
