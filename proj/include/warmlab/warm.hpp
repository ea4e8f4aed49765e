// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Discrete-event simulation of the WARM process: every vertex carries a
// Poisson clock of rate lambda_v and, when it rings, reinforces one incident
// edge chosen by the alpha-power rule on the current tallies.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "warmlab/graph.hpp"

namespace warmlab {

struct WarmConfig {
  const Graph* graph = nullptr;
  double alpha = 2.0;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  bool record_uniforms = true;
  std::int64_t event_cap = 50'000'000;
};

struct FiringEvent {
  double time = 0.0;
  VertexId vertex = kNoVertex;
  std::int64_t k = 0;            // firing ordinal at the vertex, from 1
  std::int32_t edge_index = 0;   // local index in Graph::neighbours order
  EdgeId edge = -1;
  double uniform = 0.0;          // U_{k,v}; 0 when not recorded
};

struct WarmTrajectory {
  WarmConfig config;
  std::vector<FiringEvent> events;          // strictly increasing in time
  std::vector<std::int64_t> final_tallies;  // per edge id
  std::vector<std::vector<std::size_t>> vertex_events;  // event indices per vertex
  std::vector<std::vector<std::size_t>> edge_events;    // event indices per edge
  bool cap_hit = false;
};

/// Stream ids of the per-vertex clock gaps and selection uniforms. The k-th
/// firing of v uses position k-1 of each.
std::uint64_t clock_stream(const Graph& graph, VertexId v);
std::uint64_t choice_stream(const Graph& graph, VertexId v);

/// U_{j,v} for any j >= 1, independent of whether v fired j times.
double choice_uniform(const Graph& graph, std::uint64_t seed, VertexId v, std::int64_t j);

/// Runs to the horizon or the event cap. Throws std::runtime_error when two
/// firings share a time.
WarmTrajectory simulate(const WarmConfig& config);

/// #{k : T_{k,v} <= t}.
std::int64_t firing_count(const WarmTrajectory& traj, VertexId v, double t);

/// Firing times of v in order.
std::vector<double> firing_times(const WarmTrajectory& traj, VertexId v);

/// N_t(e), with N_0 = 1.
std::int64_t tally_at(const WarmTrajectory& traj, EdgeId e, double t);

/// (N_{tb}(e) - N_{ta}(e)) / (tb - ta).
double linear_rate(const WarmTrajectory& traj, EdgeId e, double ta, double tb);

/// linear_rate over the trailing half of the horizon.
double trailing_rate(const WarmTrajectory& traj, EdgeId e);

/// trailing_rate >= eps * lambda / 4, lambda being the rate of the edge's
/// lower endpoint (the child for tree edges).
bool surviving(const WarmTrajectory& traj, EdgeId e, double eps);

/// CSV `time,vertex,k,edge_index,uniform`.
void write_events_csv(std::ostream& out, const WarmTrajectory& traj);
/// CSV `edge,tally`.
void write_tallies_csv(std::ostream& out, const WarmTrajectory& traj);

}  // namespace warmlab
