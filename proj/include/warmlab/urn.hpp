// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// The alpha-Polya urn driven by explicit uniforms.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "warmlab/rng.hpp"

namespace warmlab {

struct UrnState {
  std::vector<std::int64_t> tallies;  // colour 0..n, every entry >= 1
  std::int64_t step = 0;
  bool operator==(const UrnState&) const = default;
};

/// (m, 1, ..., 1) with n competitor colours.
UrnState head_start_state(std::int64_t m, std::int64_t n);

/// The colour i with cum_{i-1} < u * total <= cum_i, cum_i = sum_{i' <= i} N_{i'}^alpha.
/// Ties resolve to the lower index.
std::size_t select_colour(const UrnState& state, double u, double alpha);

/// Same rule over precomputed weights N_i^alpha.
std::size_t select_by_weights(const std::vector<double>& weights, double u);

struct UrnTrace {
  UrnState initial;
  std::vector<std::int32_t> choices;
  std::uint64_t uniforms_consumed = 0;
};

/// Final state obtained by replaying `trace.choices` from `trace.initial`.
UrnState replay(const UrnTrace& trace);

/// Number of times each colour was selected.
std::vector<std::int64_t> selection_counts(const UrnTrace& trace);

template <UniformSource Source>
UrnTrace run_sequential(const UrnState& initial, double alpha, std::int64_t steps, Source& uniforms) {
  if (steps < 0) throw std::invalid_argument("run_sequential: negative step count");
  if (initial.tallies.empty()) throw std::invalid_argument("run_sequential: empty urn");
  UrnTrace trace{initial, {}, 0};
  trace.choices.reserve(static_cast<std::size_t>(steps));
  std::vector<std::int64_t> tallies = initial.tallies;
  std::vector<double> weights(tallies.size());
  for (std::size_t i = 0; i < tallies.size(); ++i) {
    if (tallies[i] < 1) throw std::invalid_argument("run_sequential: tallies must be positive");
    weights[i] = std::pow(static_cast<double>(tallies[i]), alpha);
  }
  const std::uint64_t before = uniforms.consumed();
  for (std::int64_t s = 0; s < steps; ++s) {
    const std::size_t colour = select_by_weights(weights, uniforms.next());
    ++tallies[colour];
    weights[colour] = std::pow(static_cast<double>(tallies[colour]), alpha);
    trace.choices.push_back(static_cast<std::int32_t>(colour));
  }
  trace.uniforms_consumed = uniforms.consumed() - before;
  return trace;
}

/// Colours k >= 1 selected exactly m-1 times.
std::vector<std::int32_t> exact_colours(const UrnTrace& trace, std::int64_t m);

/// Only colour 0 is selected more than 2m-1 times, and at least `min_colours`
/// colours are selected exactly m-1 times. The trace must start from (m,1,...,1).
bool corollary_event(const UrnTrace& trace, std::int64_t m, std::int64_t min_colours = 5);

void to_json(nlohmann::json& j, const UrnState& s);
void to_json(nlohmann::json& j, const UrnTrace& t);

}  // namespace warmlab
