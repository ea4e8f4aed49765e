// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/urn.hpp"

namespace warmlab {

UrnState head_start_state(std::int64_t m, std::int64_t n) {
  if (m < 1 || n < 1) throw std::invalid_argument("head_start_state: need m >= 1, n >= 1");
  UrnState state;
  state.tallies.assign(static_cast<std::size_t>(n) + 1, 1);
  state.tallies[0] = m;
  return state;
}

std::size_t select_by_weights(const std::vector<double>& weights, double u) {
  double total = 0.0;
  for (const double w : weights) total += w;
  const double target = u * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (target <= cum) return i;
  }
  return weights.size() - 1;
}

std::size_t select_colour(const UrnState& state, double u, double alpha) {
  std::vector<double> weights(state.tallies.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = std::pow(static_cast<double>(state.tallies[i]), alpha);
  }
  return select_by_weights(weights, u);
}

UrnState replay(const UrnTrace& trace) {
  UrnState state = trace.initial;
  for (const auto c : trace.choices) {
    if (c < 0 || static_cast<std::size_t>(c) >= state.tallies.size()) {
      throw std::invalid_argument("replay: colour out of range");
    }
    ++state.tallies[static_cast<std::size_t>(c)];
    ++state.step;
  }
  return state;
}

std::vector<std::int64_t> selection_counts(const UrnTrace& trace) {
  std::vector<std::int64_t> counts(trace.initial.tallies.size(), 0);
  for (const auto c : trace.choices) ++counts.at(static_cast<std::size_t>(c));
  return counts;
}

std::vector<std::int32_t> exact_colours(const UrnTrace& trace, std::int64_t m) {
  const auto counts = selection_counts(trace);
  std::vector<std::int32_t> out;
  for (std::size_t k = 1; k < counts.size(); ++k) {
    if (counts[k] == m - 1) out.push_back(static_cast<std::int32_t>(k));
  }
  return out;
}

bool corollary_event(const UrnTrace& trace, std::int64_t m, std::int64_t min_colours) {
  const auto& t = trace.initial.tallies;
  if (m < 1 || t.size() < 2 || t[0] != m) {
    throw std::invalid_argument("corollary_event: trace must start from (m,1,...,1)");
  }
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (t[k] != 1) throw std::invalid_argument("corollary_event: trace must start from (m,1,...,1)");
  }
  const auto counts = selection_counts(trace);
  std::int64_t exact = 0;
  for (std::size_t k = 1; k < counts.size(); ++k) {
    if (counts[k] > 2 * m - 1) return false;
    if (counts[k] == m - 1) ++exact;
  }
  return exact >= min_colours;
}

void to_json(nlohmann::json& j, const UrnState& s) {
  j = nlohmann::json{{"tallies", s.tallies}, {"step", s.step}};
}

void to_json(nlohmann::json& j, const UrnTrace& t) {
  j = nlohmann::json{{"initial", t.initial},
                     {"choices", t.choices},
                     {"uniforms_consumed", t.uniforms_consumed},
                     {"final", replay(t)}};
}

}  // namespace warmlab
