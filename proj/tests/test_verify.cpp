// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "warmlab/params.hpp"
#include "warmlab/series.hpp"
#include "warmlab/verify.hpp"

using namespace warmlab;

TEST_CASE("combine_status precedence") {
  const auto c = [](const char* s, bool threshold = true) {
    ReportCell r;
    r.status = threshold ? s : "report";
    return r;
  };
  CHECK(combine_status({c("pass"), c("insufficient"), c("fail")}) == "fail");
  CHECK(combine_status({c("pass"), c("insufficient")}) == "insufficient");
  CHECK(combine_status({c("pass"), c("pass")}) == "pass");
  CHECK(combine_status({c("report", false)}) == "report");
}

TEST_CASE("S concentrates in its window") {
  CHECK(verify_p_S(2.0, 1000, 6.0, 1000).verdict == "pass");
  CHECK(verify_p_S(2.0, 1000, 0.001, 300).verdict == "fail");
  CHECK(verify_p_S(2.0, 2, 6.0, 50).verdict == "report");
  CHECK_THROWS_AS(verify_p_S(2.0, 1000, 6.0, 0), std::invalid_argument);
}

TEST_CASE("Z' CDF is convex below s+") {
  const PropositionReport r = verify_p_Zincr(2.0, 20, 1.0, 25);
  REQUIRE(r.cells.front().parameters["check"] == "convexity");
  CHECK(r.cells.front().status == "pass");
  const PropositionReport thin = verify_p_Zincr(2.0, 20, 1.0, 1);
  CHECK(thin.cells.front().status == "insufficient");
  CHECK(thin.verdict != "pass");
}

TEST_CASE("large deviation input checks") {
  CHECK_THROWS_AS(verify_p_LargeDev(2.0, {10, 20}, 0), std::invalid_argument);
  CHECK_THROWS_AS(verify_p_LargeDev(2.0, {10, 10}, 100), std::invalid_argument);
  CHECK_THROWS_AS(verify_p_LargeDev(2.0, {}, 100), std::invalid_argument);
}

TEST_CASE("lemma on s and s'") {
  CHECK(verify_lemma_ss(2.0, 5, 0.1, 0.1, 2000).verdict == "pass");
  CHECK(verify_lemma_ss(2.0, 5, 0.1, 0.2, 20000).verdict == "pass");
  CHECK_THROWS_AS(verify_lemma_ss(2.0, 5, 0.2, 0.1, 100), std::invalid_argument);
}

TEST_CASE("growth bounds") {
  CHECK_THROWS_AS(verify_p_growing(2.0, 20, 0.5, 1.0, 10), std::invalid_argument);
  const PropositionReport r = verify_p_growing(2.0, 100, 0.25, 1.0, 10);
  for (const auto& c : r.cells) {
    if (c.parameters["check"] == "two_sided") CHECK(c.status == "pass");
  }
  CHECK(r.verdict == "pass");
  // the two-rate closed form agrees with the series CDF
  for (const double x : {0.01, 0.2, 1.5}) CHECK(two_rate_cdf(2.0, x) == doctest::Approx(series_cdf(2.0, 1, 2, x)).epsilon(1e-12));
}

TEST_CASE("delta shrinking: zero delta is a negative control") {
  CHECK(verify_p_delta(2.0, {10, 20, 40}, 0.0, 1.0).verdict == "fail");
  CHECK_THROWS_AS(verify_p_delta(2.0, {10, 20}, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("theorem driver") {
  Theorem1Options o;
  o.seed = 9;
  const Theorem1Report a = run_theorem1(2.0, 10, 1, o);
  const Theorem1Report b = run_theorem1(2.0, 10, 1, o);
  CHECK(a.engine == "aggregate");
  CHECK(a.event.trials == 1);
  CHECK(to_json(a) == to_json(b));
  CHECK(to_json(a)["surrogate"] == true);

  Theorem1Options small;
  small.n = 100;
  small.min_colours = 101;
  small.c1 = 1.0;
  const Theorem1Report none = run_theorem1(2.0, 3, 200, small);
  CHECK(none.engine == "explicit");
  CHECK(none.enough_exact.successes == 0);
  CHECK(none.event.successes == 0);
  CHECK_THROWS_AS(run_theorem1(2.0, 10, 0, o), std::invalid_argument);
}
