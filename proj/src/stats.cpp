// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace warmlab {

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  if (successes < 0 || successes > trials) throw std::invalid_argument("wilson_interval: bad counts");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  // Keep the point estimate inside despite rounding.
  out.lo = std::min(out.lo, p);
  out.hi = std::max(out.hi, p);
  return out;
}

double binomial_upper_tail(double n, double p, std::int64_t t) {
  if (!(n >= 0.0) || !(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_upper_tail: bad arguments");
  if (t <= 0) return 1.0;
  const auto td = static_cast<double>(t);
  if (td > n || p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  if (n > 1e12 && p < 1e-6) return boost::math::gamma_p(td, n * p);
  return boost::math::ibeta(td, n - td + 1.0, p);
}

}  // namespace warmlab
