// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "warmlab/rng.hpp"
#include "warmlab/rubin.hpp"
#include "warmlab/series.hpp"
#include "warmlab/stats.hpp"
#include "warmlab/urn.hpp"

using namespace warmlab;

namespace {

RubinClocks constructed(std::int64_t m, std::vector<std::vector<double>> rows, SBracket s) {
  RubinClocks c;
  c.alpha = 2.0;
  c.m = m;
  c.z_partial = std::move(rows);
  c.s_bracket = s;
  return c;
}

std::vector<double> ramp(double start, double step, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(start + step * i);
  return out;
}

}  // namespace

TEST_CASE("S bracket width is the tail allowance") {
  SSeries s(2.0, 10, 20.0);
  UniformStream u(1, stream_id("bracket", Purpose::kAuxiliary));
  s.extend_to(40, u, nullptr, 0);
  CHECK(s.last() == 40);
  const SBracket b = s.bracket();
  CHECK(b.lo == s.partial());
  CHECK(b.hi - b.lo == doctest::Approx(20.0 / 40.0).epsilon(1e-12));
}

TEST_CASE("constructed clocks: a competitor below S at 2m breaks only_zero_exceeds") {
  // m = 2: exact needs Z^(1) < S < Z^(2); top is Z^(4).
  const auto c = constructed(2, {ramp(0.05, 0.1, 4), ramp(0.001, 0.001, 4)}, {0.1, 0.11});
  const PolyaOutcome o = evaluate_outcome(c, 2);
  CHECK(o.decided);
  CHECK_FALSE(o.only_zero_exceeds);
  CHECK(o.exact_m_minus_1 == std::vector<std::int32_t>{1});
}

TEST_CASE("constructed clocks: everything above S gives no exact colours") {
  const auto c = constructed(3, {ramp(1.0, 1.0, 6), ramp(2.0, 1.0, 6)}, {0.1, 0.2});
  const PolyaOutcome o = evaluate_outcome(c, 3);
  CHECK(o.decided);
  CHECK(o.only_zero_exceeds);
  CHECK(o.exact_m_minus_1.empty());
}

TEST_CASE("constructed clocks: a partial sum inside the bracket is undecided") {
  const auto c = constructed(2, {{0.05, 0.105, 1.0, 2.0}}, {0.1, 0.11});
  CHECK_FALSE(evaluate_outcome(c, 2).decided);
  CHECK_THROWS(theorem1_event(evaluate_outcome(c, 2)));
}

TEST_CASE("theorem1 event truth table") {
  PolyaOutcome o;
  o.decided = true;
  o.only_zero_exceeds = true;
  o.exact_m_minus_1 = {1, 2, 3, 4, 5};
  CHECK(theorem1_event(o));
  o.exact_m_minus_1.pop_back();
  CHECK_FALSE(theorem1_event(o));
  o.only_zero_exceeds = false;
  o.exact_m_minus_1 = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK_FALSE(theorem1_event(o));
}

TEST_CASE("same stream, same clocks") {
  UniformStream a(3, stream_id(std::uint64_t{0}, Purpose::kReplica));
  UniformStream b(3, stream_id(std::uint64_t{0}, Purpose::kReplica));
  const RubinClocks x = run_rubin(2.0, 4, 30, a);
  const RubinClocks y = run_rubin(2.0, 4, 30, b);
  CHECK(x.z_partial == y.z_partial);
  CHECK(x.s_partial == y.s_partial);
  CHECK(x.truncation_index == y.truncation_index);
}

TEST_CASE("property: refining the S bracket never changes a decided outcome") {
  for (std::uint64_t r = 0; r < 300; ++r) {
    UniformStream a(4, stream_id(r, Purpose::kReplica));
    UniformStream b(4, stream_id(r, Purpose::kReplica));
    RubinOptions fine;
    fine.initial_last = 1 << 16;
    const RubinClocks coarse = run_rubin(2.0, 3, 12, a);
    const RubinClocks deep = run_rubin(2.0, 3, 12, b, fine);
    const PolyaOutcome oc = evaluate_outcome(coarse, 3);
    const PolyaOutcome od = evaluate_outcome(deep, 3);
    if (!oc.decided || !od.decided) continue;
    CHECK(oc.only_zero_exceeds == od.only_zero_exceeds);
    CHECK(oc.exact_m_minus_1 == od.exact_m_minus_1);
    CHECK(deep.s_bracket.lo >= coarse.s_bracket.lo);
    CHECK(deep.s_bracket.hi <= coarse.s_bracket.hi);
  }
}

TEST_CASE("mean of S matches the series mean") {
  const int replicas = 2000;
  double sum = 0.0;
  for (int r = 0; r < replicas; ++r) {
    SSeries s(2.0, 10, 20.0);
    UniformStream u(5, stream_id(static_cast<std::uint64_t>(r), Purpose::kReplica));
    s.extend_to(10 << 12, u, nullptr, 0);
    const SBracket b = s.bracket();
    sum += 0.5 * (b.lo + b.hi);
  }
  const double sd = std::sqrt(series_variance(2.0, 10) / replicas);
  CHECK(std::abs(sum / replicas - series_mean(2.0, 10)) < 4.0 * sd);
}

TEST_CASE("first arrival from (2,1) follows the urn law") {
  int zero = 0;
  const int n = 40000;
  RubinOptions opt;
  opt.z_terms = 4;
  for (int r = 0; r < n; ++r) {
    UniformStream u(6, stream_id(static_cast<std::uint64_t>(r), Purpose::kReplica));
    const auto choices = rubin_choices(run_rubin(2.0, 2, 1, u, opt), 1);
    REQUIRE(choices.has_value());
    zero += (*choices)[0] == 0 ? 1 : 0;
  }
  CHECK(std::abs(zero / static_cast<double>(n) - 0.8) < 4.0 * std::sqrt(0.16 / n));
}

TEST_CASE("rubin choices need enough kept partial sums") {
  UniformStream u(7, stream_id("kept", Purpose::kAuxiliary));
  const RubinClocks c = run_rubin(2.0, 2, 3, u);
  CHECK_THROWS(rubin_choices(c, 100));
  const auto first = rubin_choices(c, 4);
  REQUIRE(first.has_value());
  CHECK(first->size() == 4);
}

TEST_CASE("aggregate engine agrees with the colour-by-colour engine") {
  const std::int64_t m = 3;
  const std::int64_t n = 60;
  const int replicas = 4000;
  int explicit_hits = 0;
  int aggregate_hits = 0;
  int undecided = 0;
  for (int r = 0; r < replicas; ++r) {
    UniformStream a(8, stream_id(static_cast<std::uint64_t>(r), Purpose::kReplica));
    const PolyaOutcome o = evaluate_outcome(run_rubin(2.0, m, n, a), m);
    UniformStream b(9, stream_id(static_cast<std::uint64_t>(r), Purpose::kReplica));
    AggregateOptions opt;
    opt.min_colours = 5;
    const AggregateOutcome g = run_rubin_aggregate(2.0, m, static_cast<double>(n), b, opt);
    if (!o.decided || !g.decided) {
      ++undecided;
      continue;
    }
    explicit_hits += theorem1_event(o) ? 1 : 0;
    aggregate_hits += (g.only_zero_exceeds && g.enough_exact) ? 1 : 0;
  }
  CHECK(undecided < replicas / 100);
  const double p1 = explicit_hits / static_cast<double>(replicas);
  const double p2 = aggregate_hits / static_cast<double>(replicas);
  const double p = 0.5 * (p1 + p2);
  CHECK(std::abs(p1 - p2) < 4.5 * std::sqrt(2.0 * p * (1.0 - p) / replicas) + 1e-3);
}

TEST_CASE("aggregate engine: impossible colour count never happens") {
  AggregateOptions opt;
  opt.min_colours = 101;
  for (std::uint64_t r = 0; r < 200; ++r) {
    UniformStream u(10, stream_id(r, Purpose::kReplica));
    const AggregateOutcome g = run_rubin_aggregate(2.0, 4, 100.0, u, opt);
    CHECK_FALSE(g.enough_exact);
  }
}

TEST_CASE("binomial tail") {
  CHECK(binomial_upper_tail(10.0, 0.5, 0) == 1.0);
  CHECK(binomial_upper_tail(10.0, 0.5, 11) == 0.0);
  CHECK(binomial_upper_tail(10.0, 0.5, 10) == doctest::Approx(1.0 / 1024.0).epsilon(1e-12));
  CHECK(binomial_upper_tail(4.0, 0.3, 2) == doctest::Approx(1.0 - 0.7 * 0.7 * 0.7 * 0.7 - 4 * 0.3 * 0.7 * 0.7 * 0.7).epsilon(1e-12));
  // Poisson regime: n p = 3
  const double poisson = 1.0 - std::exp(-3.0) * (1.0 + 3.0);
  CHECK(binomial_upper_tail(3e14, 1e-14, 2) == doctest::Approx(poisson).epsilon(1e-9));
}

TEST_CASE("Wilson interval") {
  const Interval w = wilson_interval(50, 100);
  CHECK(w.lo == doctest::Approx(0.40383).epsilon(1e-4));
  CHECK(w.hi == doctest::Approx(0.59617).epsilon(1e-4));
  const Interval none = wilson_interval(0, 0);
  CHECK(none.lo == 0.0);
  CHECK(none.hi == 1.0);
  const Interval zero = wilson_interval(0, 400);
  CHECK(zero.lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zero.hi < 0.01);
}
