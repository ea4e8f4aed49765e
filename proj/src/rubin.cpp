// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/rubin.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

#include "warmlab/series.hpp"
#include "warmlab/stats.hpp"

namespace warmlab {
namespace {

enum class Cmp { kBelow, kAbove, kUnknown };  // position of z relative to S

Cmp compare(double z, const SBracket& s) {
  if (z < s.lo) return Cmp::kBelow;
  if (z > s.hi) return Cmp::kAbove;
  return Cmp::kUnknown;
}

std::int64_t resolve_cap(std::int64_t requested, std::int64_t m) {
  return requested > 0 ? requested : (m << 20);
}

}  // namespace

SSeries::SSeries(double alpha, std::int64_t m, double kappa) : alpha_(alpha), kappa_(kappa), next_(m) {
  if (!(alpha > 1.0)) throw std::invalid_argument("Rubin series: alpha must exceed 1");
  if (m < 1) throw std::invalid_argument("Rubin series: m must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("Rubin series: kappa must be positive");
}

SBracket SSeries::bracket() const {
  if (last() < 1) return {0.0, std::numeric_limits<double>::infinity()};
  return {partial_, partial_ + kappa_ * tail_power_sum_bound(alpha_, last())};
}

RubinClocks run_rubin(double alpha, std::int64_t m, std::int64_t n, UniformStream& source,
                      const RubinOptions& options) {
  if (n < 1) throw std::invalid_argument("run_rubin: n must be positive");
  SSeries series(alpha, m, options.kappa);
  const std::int64_t z_terms = std::max(options.z_terms, 2 * m);

  RubinClocks clocks;
  clocks.alpha = alpha;
  clocks.m = m;
  clocks.z_partial.assign(static_cast<std::size_t>(n), {});
  for (auto& row : clocks.z_partial) {
    row.reserve(static_cast<std::size_t>(z_terms));
    double sum = 0.0;
    for (std::int64_t j = 1; j <= z_terms; ++j) {
      sum += next_exponential(source) * std::pow(static_cast<double>(j), -alpha);
      row.push_back(sum);
    }
  }

  const std::int64_t cap = resolve_cap(options.cap_last, m);
  std::int64_t last = options.initial_last > 0 ? options.initial_last : 4 * m;
  last = std::max(last, m + z_terms - 1);
  const auto keep = static_cast<std::size_t>(z_terms);
  series.extend_to(std::min(last, std::max(cap, m + z_terms - 1)), source, &clocks.s_partial, keep);
  for (;;) {
    clocks.s_bracket = series.bracket();
    clocks.truncation_index = series.last();
    if (evaluate_outcome(clocks, m).decided) break;
    if (series.last() >= cap) {
      clocks.cap_hit = true;
      break;
    }
    series.extend_to(std::min(2 * series.last(), cap), source, &clocks.s_partial, keep);
  }
  return clocks;
}

PolyaOutcome evaluate_outcome(const RubinClocks& clocks, std::int64_t m) {
  PolyaOutcome out;
  bool unknown = false;
  bool exceeded = false;
  for (std::size_t k = 0; k < clocks.z_partial.size(); ++k) {
    const auto& row = clocks.z_partial[k];
    if (row.size() < static_cast<std::size_t>(2 * m)) {
      throw std::invalid_argument("evaluate_outcome: fewer than 2m competitor terms");
    }
    const Cmp top = compare(row[static_cast<std::size_t>(2 * m - 1)], clocks.s_bracket);
    if (top == Cmp::kBelow) exceeded = true;
    if (top == Cmp::kUnknown) unknown = true;

    // Z^(m-1) < S < Z^(m); Z^(0) = 0.
    const Cmp low = m > 1 ? compare(row[static_cast<std::size_t>(m - 2)], clocks.s_bracket) : Cmp::kBelow;
    const Cmp high = compare(row[static_cast<std::size_t>(m - 1)], clocks.s_bracket);
    if (low == Cmp::kAbove || high == Cmp::kBelow) continue;
    if (low == Cmp::kBelow && high == Cmp::kAbove) {
      out.exact_m_minus_1.push_back(static_cast<std::int32_t>(k + 1));
      continue;
    }
    unknown = true;
  }
  out.only_zero_exceeds = !exceeded;
  out.decided = !unknown;
  return out;
}

bool theorem1_event(const PolyaOutcome& outcome, std::int64_t min_colours) {
  if (!outcome.decided) throw std::invalid_argument("theorem1_event: outcome is undecided");
  return outcome.only_zero_exceeds &&
         static_cast<std::int64_t>(outcome.exact_m_minus_1.size()) >= min_colours;
}

std::optional<std::vector<std::int32_t>> rubin_choices(const RubinClocks& clocks, std::int64_t events) {
  const auto need = static_cast<std::size_t>(std::max<std::int64_t>(events, 0));
  if (clocks.s_partial.size() < need) throw std::invalid_argument("rubin_choices: too few S partial sums kept");
  for (const auto& row : clocks.z_partial) {
    if (row.size() < need) throw std::invalid_argument("rubin_choices: too few Z partial sums kept");
  }
  const std::size_t colours = clocks.z_partial.size() + 1;
  std::vector<std::size_t> next(colours, 0);
  auto time_of = [&](std::size_t c) {
    return c == 0 ? clocks.s_partial[next[0]] : clocks.z_partial[c - 1][next[c]];
  };
  std::vector<std::int32_t> out;
  out.reserve(need);
  for (std::size_t e = 0; e < need; ++e) {
    std::size_t best = 0;
    double best_time = time_of(0);
    bool tie = false;
    for (std::size_t c = 1; c < colours; ++c) {
      const double t = time_of(c);
      if (t < best_time) {
        best = c;
        best_time = t;
        tie = false;
      } else if (t == best_time) {
        tie = true;
      }
    }
    if (tie) return std::nullopt;
    out.push_back(static_cast<std::int32_t>(best));
    ++next[best];
  }
  return out;
}

AggregateOutcome run_rubin_aggregate(double alpha, std::int64_t m, double n, UniformStream& source,
                                     const AggregateOptions& options) {
  if (!(n >= 1.0) || n != std::floor(n)) throw std::invalid_argument("run_rubin_aggregate: n must be a positive integer");
  const double u = source.next();
  SSeries series(alpha, m, options.kappa);
  const std::int64_t cap = resolve_cap(options.cap_last, m);
  const std::int64_t first = options.initial_last > 0 ? std::max(options.initial_last, m) : 4 * m;
  series.extend_to(std::min(first, std::max(cap, m)), source, nullptr, 0);

  const std::array<std::int64_t, 3> counts{m - 1, m, 2 * m};
  const std::int64_t t = options.min_colours;
  AggregateOutcome out;
  for (;;) {
    const SBracket s = series.bracket();
    out.s_bracket = s;
    out.truncation_index = series.last();

    const auto f_lo = prefix_series_cdfs(alpha, counts, s.lo);
    const auto f_hi = prefix_series_cdfs(alpha, counts, s.hi);
    const double pa_lo = std::max(0.0, f_lo[0] - f_hi[1]);
    const double pa_hi = std::min(1.0, f_hi[0] - f_lo[1]);
    const double pb_lo = f_lo[2];
    const double pb_hi = f_hi[2];
    const double p0_lo = std::exp(n * std::log1p(-pb_hi));
    const double p0_hi = std::exp(n * std::log1p(-pb_lo));
    const double gp_lo = pb_lo < 1.0 ? binomial_upper_tail(n, std::min(1.0, pa_lo / (1.0 - pb_lo)), t) : 0.0;
    const double gp_hi = pb_hi < 1.0 ? binomial_upper_tail(n, std::min(1.0, pa_hi / (1.0 - pb_hi)), t) : 1.0;
    const double ga_lo = binomial_upper_tail(n, pa_lo, t);
    const double ga_hi = binomial_upper_tail(n, pa_hi, t);

    // Cells in order: (none exceed, enough), (none exceed, not enough),
    // (some exceed, enough), (some exceed, not enough).
    const double c1_lo = p0_lo * gp_lo;
    const double c1_hi = p0_hi * gp_hi;
    const double c3_lo = p0_lo + ga_lo - c1_hi;
    const double c3_hi = p0_hi + ga_hi - c1_lo;
    const std::array<std::pair<double, double>, 3> edges{{{c1_lo, c1_hi}, {p0_lo, p0_hi}, {c3_lo, c3_hi}}};
    int cell = 3;
    bool ambiguous = false;
    for (int i = 0; i < 3; ++i) {
      if (u <= edges[static_cast<std::size_t>(i)].first) {
        cell = i;
        break;
      }
      if (u <= edges[static_cast<std::size_t>(i)].second) {
        ambiguous = true;
        break;
      }
    }
    if (!ambiguous) {
      out.decided = true;
      out.only_zero_exceeds = cell <= 1;
      out.enough_exact = cell == 0 || cell == 2;
      return out;
    }
    if (series.last() >= cap) return out;
    series.extend_to(std::min(2 * series.last(), cap), source, nullptr, 0);
  }
}

void to_json(nlohmann::json& j, const PolyaOutcome& o) {
  j = nlohmann::json{{"only_zero_exceeds", o.only_zero_exceeds},
                     {"exact_m_minus_1", o.exact_m_minus_1},
                     {"decided", o.decided}};
}

void to_json(nlohmann::json& j, const AggregateOutcome& o) {
  j = nlohmann::json{{"only_zero_exceeds", o.only_zero_exceeds},
                     {"enough_exact", o.enough_exact},
                     {"decided", o.decided},
                     {"s_lo", o.s_bracket.lo},
                     {"s_hi", o.s_bracket.hi},
                     {"truncation_index", o.truncation_index}};
}

}  // namespace warmlab
