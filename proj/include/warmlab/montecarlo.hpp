// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Replica orchestration. Replica r of a run with seed s draws from the Philox
// stream (s, stream_id(r, kReplica)), and results are reduced in replica
// order, so estimates do not depend on the number of worker threads.
#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "json.hpp"
#include "warmlab/rng.hpp"

namespace warmlab {

struct McEstimate {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  std::int64_t undecided = 0;
  double p_hat = 0.0;  // successes / decided replicas
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t seed_base = 0;

  std::int64_t decided() const { return trials - undecided; }
  double undecided_fraction() const { return trials > 0 ? static_cast<double>(undecided) / static_cast<double>(trials) : 0.0; }
};

McEstimate make_estimate(std::int64_t successes, std::int64_t trials, std::int64_t undecided, std::uint64_t seed);

/// Adds the counts of two runs with the same parameters.
McEstimate merge(const McEstimate& a, const McEstimate& b);

enum class Verdict : std::uint8_t { kFalse = 0, kTrue = 1, kUndecided = 2 };

/// Worker count used when 0 is requested.
int default_threads();

/// Calls body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by a body is rethrown after all workers stop.
void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& body);

/// Stream of replica r.
UniformStream replica_stream(std::uint64_t seed, std::int64_t replica);

/// Runs `event` once per replica and aggregates with a Wilson interval.
McEstimate estimate_event(const std::function<Verdict(UniformStream&)>& event, std::int64_t replicas,
                          std::uint64_t seed, int threads = 0);

/// Per-replica verdicts in replica order.
std::vector<Verdict> run_replicas(const std::function<Verdict(UniformStream&)>& event, std::int64_t replicas,
                                  std::uint64_t seed, int threads = 0);

/// Z' = sum_{j=1}^{m-1} eta_j / j^alpha for one replica.
double sample_zprime(double alpha, std::int64_t m, UniformStream& source);

/// Monte Carlo estimate of P(Z' < s).
McEstimate estimate_cdf_zprime(double alpha, std::int64_t m, double s, std::int64_t samples, std::uint64_t seed,
                               int threads = 0);

nlohmann::json to_json(const McEstimate& e);
McEstimate estimate_from_json(const nlohmann::json& j);

}  // namespace warmlab
