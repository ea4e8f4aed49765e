// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic facts about the weighted exponential series
//   sum_{j=first}^{last} eta_j / j^alpha,   eta_j i.i.d. Exp(1),
// which drive the Rubin embedding of the alpha-urn.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace warmlab {

/// sum_{j >= first} j^-alpha (direct summation plus an Euler-Maclaurin tail).
double series_mean(double alpha, std::int64_t first);

/// sum_{j >= first} j^-(2 alpha), the variance of the infinite series.
double series_variance(double alpha, std::int64_t first);

/// Upper bound on sum_{j > last} j^-power, namely last^(1-power)/(power-1).
double tail_power_sum_bound(double power, std::int64_t last);

/// P(sum_{j=first}^{last} eta_j / j^alpha < x).
///
/// The sum is a hypoexponential variable with rates j^alpha. The CDF is
/// computed by uniformisation of the pure-birth chain that passes through the
/// rates in order; every term of the resulting series is non-negative, so the
/// result keeps full relative precision far into the lower tail (down to
/// roughly 1e-290), where the alternating closed form is useless.
double series_cdf(double alpha, std::int64_t first, std::int64_t last, double x);

/// P(sum_{j=1}^{r} eta_j / j^alpha < x) for each r in `counts` (one pass).
/// r = 0 denotes the empty sum, whose CDF is 1 for x > 0.
std::vector<double> prefix_series_cdfs(double alpha, std::span<const std::int64_t> counts, double x);

}  // namespace warmlab
