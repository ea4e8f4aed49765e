// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace warmlab {

inline constexpr double kZ95 = 1.959964;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion. trials == 0 gives [0, 1].
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = kZ95);

/// P(Bin(n, p) >= t). n is an integer-valued double so that counts beyond
/// 2^63 are representable; for huge n and small p the Poisson limit is used.
double binomial_upper_tail(double n, double p, std::int64_t t);

}  // namespace warmlab
