// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace warmlab {
namespace {

// Euler-Maclaurin remainder for sum_{j >= k} j^-a, k large.
double power_tail(double a, double k) {
  const double ka = std::pow(k, -a);
  return std::pow(k, 1.0 - a) / (a - 1.0) + 0.5 * ka + a * ka / (12.0 * k) -
         a * (a + 1.0) * (a + 2.0) * ka / (720.0 * k * k * k);
}

double power_sum_from(double a, std::int64_t first) {
  if (!(a > 1.0)) throw std::invalid_argument("power sum: exponent must exceed 1");
  if (first < 1) throw std::invalid_argument("power sum: first index must be positive");
  constexpr std::int64_t kDirect = 1000;
  const std::int64_t cut = std::max(first, kDirect);
  double direct = 0.0;
  // Smallest terms first.
  for (std::int64_t j = cut - 1; j >= first; --j) direct += std::pow(static_cast<double>(j), -a);
  return direct + power_tail(a, static_cast<double>(cut));
}

// Uniformised pure-birth chain with rates (first + i)^alpha, i = 0..L-1.
// Returns P(state at time x >= r) for every r in `thresholds` (each <= L).
std::vector<double> birth_chain_cdfs(double alpha, std::int64_t first,
                                     std::span<const std::int64_t> thresholds, double x) {
  std::vector<double> out(thresholds.size(), 0.0);
  if (!(x > 0.0)) return out;
  std::int64_t L = 0;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] < 0) throw std::invalid_argument("series cdf: negative term count");
    if (thresholds[i] == 0) out[i] = 1.0;
    L = std::max(L, thresholds[i]);
  }
  if (L == 0) return out;

  const auto size = static_cast<std::size_t>(L);
  std::vector<double> keep(size);  // 1 - rate_i / Lambda
  const double lambda = std::pow(static_cast<double>(first + L - 1), alpha);
  for (std::size_t i = 0; i < size; ++i) {
    keep[i] = 1.0 - std::pow(static_cast<double>(first) + static_cast<double>(i), alpha) / lambda;
  }
  const double mean = lambda * x;
  if (mean > 5.0e7) throw std::invalid_argument("series cdf: argument too large for uniformisation");
  const double log_mean = std::log(mean);

  std::vector<double> state(size + 1, 0.0);
  state[0] = 1.0;
  std::vector<double> suffix(size + 2, 0.0);
  std::vector<double> acc(thresholds.size(), 0.0);

  double log_weight = -mean;
  const auto cap = static_cast<std::int64_t>(10.0 * (mean + static_cast<double>(L))) + 10000;
  for (std::int64_t k = 0;; ++k) {
    if (k > cap) throw std::runtime_error("series cdf: uniformisation did not converge");
    const double weight = std::exp(log_weight);
    if (weight > 0.0) {
      suffix[size + 1] = 0.0;
      for (std::size_t i = size + 1; i-- > 0;) suffix[i] = suffix[i + 1] + state[i];
      for (std::size_t t = 0; t < thresholds.size(); ++t) {
        if (thresholds[t] > 0) acc[t] += weight * suffix[static_cast<std::size_t>(thresholds[t])];
      }
    }
    const auto kd = static_cast<double>(k);
    if (kd > mean && k >= L) {
      // Poisson tail beyond k, bounded by a geometric series.
      const double next = weight * mean / (kd + 1.0);
      const double bound = next / (1.0 - mean / (kd + 2.0));
      double smallest = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < thresholds.size(); ++t) {
        if (thresholds[t] > 0) smallest = std::min(smallest, acc[t]);
      }
      if (bound <= 1e-17 * smallest || bound < 1e-300) break;
    }
    // One uniformised step; the top state is absorbing.
    state[size] += state[size - 1] * (1.0 - keep[size - 1]);
    for (std::size_t i = size - 1; i > 0; --i) {
      state[i] = state[i] * keep[i] + state[i - 1] * (1.0 - keep[i - 1]);
    }
    state[0] *= keep[0];
    log_weight += log_mean - std::log(kd + 1.0);
  }
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    if (thresholds[t] > 0) out[t] = std::min(1.0, acc[t]);
  }
  return out;
}

}  // namespace

double series_mean(double alpha, std::int64_t first) { return power_sum_from(alpha, first); }

double series_variance(double alpha, std::int64_t first) { return power_sum_from(2.0 * alpha, first); }

double tail_power_sum_bound(double power, std::int64_t last) {
  if (!(power > 1.0) || last < 1) throw std::invalid_argument("tail bound: need power > 1, last >= 1");
  return std::pow(static_cast<double>(last), 1.0 - power) / (power - 1.0);
}

double series_cdf(double alpha, std::int64_t first, std::int64_t last, double x) {
  if (first < 1) throw std::invalid_argument("series_cdf: first index must be positive");
  const std::int64_t count = std::max<std::int64_t>(0, last - first + 1);
  const std::int64_t thresholds[] = {count};
  return birth_chain_cdfs(alpha, first, thresholds, x)[0];
}

std::vector<double> prefix_series_cdfs(double alpha, std::span<const std::int64_t> counts, double x) {
  return birth_chain_cdfs(alpha, 1, counts, x);
}

}  // namespace warmlab
