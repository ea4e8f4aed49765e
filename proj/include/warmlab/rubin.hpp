// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Rubin's exponential embedding of the alpha-urn started from (m, 1, ..., 1):
// colour 0 gains balls at the partial sums of sum_{j>=m} xi_j / j^alpha,
// colour k at the partial sums of sum_{j>=1} eta_{j,k} / j^alpha.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <type_traits>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "warmlab/rng.hpp"

namespace warmlab {

struct RubinOptions {
  std::int64_t z_terms = 0;          // terms per competitor series; 0 means 2m
  std::int64_t initial_last = 0;     // last xi index of the first bracket; 0 means 4m
  std::int64_t cap_last = 0;         // largest xi index ever drawn; 0 means 2^20 m
  double kappa = 20.0;               // tail allowance multiplier
};

struct SBracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Running partial sum of sum_{j>=m} xi_j / j^alpha with its bracket.
class SSeries {
 public:
  SSeries(double alpha, std::int64_t m, double kappa);

  /// Draws xi_j up to and including index `last`.
  template <UniformSource Source>
  void extend_to(std::int64_t last, Source& source, std::vector<double>* keep, std::size_t keep_limit) {
    if constexpr (std::is_same_v<Source, UniformStream>) {
      std::array<double, 512> batch;
      while (next_ <= last) {
        const auto count = static_cast<std::size_t>(std::min<std::int64_t>(last - next_ + 1, batch.size()));
        source.fill(std::span<double>(batch.data(), count));
        for (std::size_t i = 0; i < count; ++i) add(-std::log(batch[i]), keep, keep_limit);
      }
    } else {
      while (next_ <= last) add(next_exponential(source), keep, keep_limit);
    }
  }

  std::int64_t last() const noexcept { return next_ - 1; }
  double partial() const noexcept { return partial_; }
  /// [partial, partial + kappa * last^(1-alpha)/(alpha-1)].
  SBracket bracket() const;

 private:
  void add(double xi, std::vector<double>* keep, std::size_t keep_limit) {
    const auto j = static_cast<double>(next_);
    partial_ += xi * (alpha_ == 2.0 ? 1.0 / (j * j) : std::pow(j, -alpha_));
    if (keep != nullptr && keep->size() < keep_limit) keep->push_back(partial_);
    ++next_;
  }

  double alpha_;
  double kappa_;
  std::int64_t next_;
  double partial_ = 0.0;
};

struct RubinClocks {
  double alpha = 0.0;
  std::int64_t m = 0;
  std::vector<double> s_partial;               // S^(r), r = 1..(kept)
  std::vector<std::vector<double>> z_partial;  // z_partial[k-1][r-1] = Z_k^(r)
  SBracket s_bracket;
  std::int64_t truncation_index = 0;  // last xi index drawn
  bool cap_hit = false;
};

struct PolyaOutcome {
  bool only_zero_exceeds = false;
  std::vector<std::int32_t> exact_m_minus_1;  // colours k with Z_k^(m-1) < S < Z_k^(m)
  bool decided = false;
};

/// Draws eta (colour-major) then xi from `source`, extending xi until
/// evaluate_outcome is decided or the cap is reached.
RubinClocks run_rubin(double alpha, std::int64_t m, std::int64_t n, UniformStream& source,
                      const RubinOptions& options = {});

PolyaOutcome evaluate_outcome(const RubinClocks& clocks, std::int64_t m);

/// only_zero_exceeds and at least `min_colours` exact colours. Throws on an
/// undecided outcome.
bool theorem1_event(const PolyaOutcome& outcome, std::int64_t min_colours = 5);

/// Colours of the first `events` arrivals, merging all ball times. Empty when
/// two arrival times coincide. Needs that many kept partial sums per colour.
std::optional<std::vector<std::int32_t>> rubin_choices(const RubinClocks& clocks, std::int64_t events);

// Aggregated engine for very large n. Given S, the competitor colours are
// i.i.d., so the counts of "exact" colours and "exceeding" colours form a
// multinomial whose cell probabilities are exact series CDFs at S. The joint
// indicator (no exceeding colour, at least t exact colours) is drawn by
// inversion with one uniform; the S bracket is refined until the inversion is
// unambiguous.
struct AggregateOptions {
  std::int64_t initial_last = 0;  // 0 means 4m
  std::int64_t cap_last = 0;      // 0 means 2^20 m
  double kappa = 20.0;
  std::int64_t min_colours = 5;
};

struct AggregateOutcome {
  bool decided = false;
  bool only_zero_exceeds = false;
  bool enough_exact = false;
  SBracket s_bracket;
  std::int64_t truncation_index = 0;
};

AggregateOutcome run_rubin_aggregate(double alpha, std::int64_t m, double n, UniformStream& source,
                                     const AggregateOptions& options = {});

void to_json(nlohmann::json& j, const PolyaOutcome& o);
void to_json(nlohmann::json& j, const AggregateOutcome& o);

}  // namespace warmlab
