// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/warm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <utility>

#include "warmlab/rng.hpp"
#include "warmlab/urn.hpp"

namespace warmlab {
namespace {

const Graph& graph_of(const WarmTrajectory& traj) {
  if (traj.config.graph == nullptr) throw std::invalid_argument("trajectory has no graph");
  return *traj.config.graph;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::uint64_t clock_stream(const Graph& graph, VertexId v) {
  return stream_id(graph.vertex(v).label, Purpose::kClock);
}

std::uint64_t choice_stream(const Graph& graph, VertexId v) {
  return stream_id(graph.vertex(v).label, Purpose::kChoice);
}

double choice_uniform(const Graph& graph, std::uint64_t seed, VertexId v, std::int64_t j) {
  if (j < 1) throw std::invalid_argument("choice_uniform: index starts at 1");
  return uniform_at(seed, choice_stream(graph, v), static_cast<std::uint64_t>(j - 1));
}

WarmTrajectory simulate(const WarmConfig& config) {
  if (config.graph == nullptr) throw std::invalid_argument("simulate: no graph");
  if (!(config.horizon > 0.0)) throw std::invalid_argument("simulate: horizon must be positive");
  if (!(config.alpha > 0.0)) throw std::invalid_argument("simulate: alpha must be positive");
  const Graph& g = *config.graph;
  const std::size_t nv = g.size();

  WarmTrajectory traj;
  traj.config = config;
  traj.final_tallies.assign(g.edges().size(), 1);
  traj.vertex_events.assign(nv, {});
  traj.edge_events.assign(g.edges().size(), {});

  std::vector<UniformStream> clocks;
  std::vector<UniformStream> choices;
  clocks.reserve(nv);
  choices.reserve(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    clocks.emplace_back(config.seed, clock_stream(g, static_cast<VertexId>(v)));
    choices.emplace_back(config.seed, choice_stream(g, static_cast<VertexId>(v)));
  }

  using Entry = std::pair<double, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<double> last_time(nv, 0.0);
  for (std::size_t v = 0; v < nv; ++v) {
    const double t = next_exponential(clocks[v]) / g.vertex(static_cast<VertexId>(v)).rate;
    last_time[v] = t;
    queue.emplace(t, static_cast<VertexId>(v));
  }

  std::vector<double> weights;
  double previous = -1.0;
  while (!queue.empty()) {
    const auto [time, v] = queue.top();
    if (time > config.horizon) break;
    if (static_cast<std::int64_t>(traj.events.size()) >= config.event_cap) {
      traj.cap_hit = true;
      break;
    }
    queue.pop();
    if (time == previous) throw std::runtime_error("simulate: two firings share a time");
    previous = time;
    const auto vi = static_cast<std::size_t>(v);

    const auto& incident = g.neighbours(v);
    weights.resize(incident.size());
    for (std::size_t i = 0; i < incident.size(); ++i) {
      weights[i] = std::pow(static_cast<double>(traj.final_tallies[static_cast<std::size_t>(incident[i].edge)]),
                            config.alpha);
    }
    const double u = choices[vi].next();
    const std::size_t index = select_by_weights(weights, u);
    const EdgeId edge = incident[index].edge;
    ++traj.final_tallies[static_cast<std::size_t>(edge)];

    FiringEvent ev;
    ev.time = time;
    ev.vertex = v;
    ev.k = static_cast<std::int64_t>(traj.vertex_events[vi].size()) + 1;
    ev.edge_index = static_cast<std::int32_t>(index);
    ev.edge = edge;
    ev.uniform = config.record_uniforms ? u : 0.0;
    traj.vertex_events[vi].push_back(traj.events.size());
    traj.edge_events[static_cast<std::size_t>(edge)].push_back(traj.events.size());
    traj.events.push_back(ev);

    const double next = time + next_exponential(clocks[vi]) / g.vertex(v).rate;
    if (!(next > time)) throw std::runtime_error("simulate: firing times stalled");
    queue.emplace(next, v);
  }
  return traj;
}

std::int64_t firing_count(const WarmTrajectory& traj, VertexId v, double t) {
  const auto& idx = traj.vertex_events.at(static_cast<std::size_t>(v));
  const auto it = std::upper_bound(idx.begin(), idx.end(), t,
                                   [&](double x, std::size_t i) { return x < traj.events[i].time; });
  return it - idx.begin();
}

std::vector<double> firing_times(const WarmTrajectory& traj, VertexId v) {
  std::vector<double> out;
  for (const auto i : traj.vertex_events.at(static_cast<std::size_t>(v))) out.push_back(traj.events[i].time);
  return out;
}

std::int64_t tally_at(const WarmTrajectory& traj, EdgeId e, double t) {
  if (e < 0 || static_cast<std::size_t>(e) >= traj.edge_events.size()) {
    throw std::out_of_range("tally_at: unknown edge");
  }
  const auto& idx = traj.edge_events[static_cast<std::size_t>(e)];
  const auto it = std::upper_bound(idx.begin(), idx.end(), t,
                                   [&](double x, std::size_t i) { return x < traj.events[i].time; });
  return 1 + (it - idx.begin());
}

double linear_rate(const WarmTrajectory& traj, EdgeId e, double ta, double tb) {
  if (!(ta < tb)) throw std::invalid_argument("linear_rate: empty window");
  if (tb > traj.config.horizon) throw std::invalid_argument("linear_rate: window exceeds the horizon");
  return static_cast<double>(tally_at(traj, e, tb) - tally_at(traj, e, ta)) / (tb - ta);
}

double trailing_rate(const WarmTrajectory& traj, EdgeId e) {
  const double h = traj.config.horizon;
  return linear_rate(traj, e, 0.5 * h, h);
}

bool surviving(const WarmTrajectory& traj, EdgeId e, double eps) {
  const Graph& g = graph_of(traj);
  const double lambda = g.vertex(g.edges().at(static_cast<std::size_t>(e)).b).rate;
  return trailing_rate(traj, e) >= eps * lambda / 4.0;
}

void write_events_csv(std::ostream& out, const WarmTrajectory& traj) {
  const Graph& g = graph_of(traj);
  out << "time,vertex,k,edge_index,uniform\n";
  for (const auto& ev : traj.events) {
    out << format_double(ev.time) << ',' << g.vertex(ev.vertex).label << ',' << ev.k << ',' << ev.edge_index
        << ',' << format_double(ev.uniform) << '\n';
  }
}

void write_tallies_csv(std::ostream& out, const WarmTrajectory& traj) {
  const Graph& g = graph_of(traj);
  out << "edge,tally\n";
  for (std::size_t e = 0; e < traj.final_tallies.size(); ++e) {
    out << g.edge_name(static_cast<EdgeId>(e)) << ',' << traj.final_tallies[e] << '\n';
  }
}

}  // namespace warmlab
