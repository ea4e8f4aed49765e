// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "warmlab/stats.hpp"

namespace warmlab {

McEstimate make_estimate(std::int64_t successes, std::int64_t trials, std::int64_t undecided, std::uint64_t seed) {
  if (trials < 0 || successes < 0 || undecided < 0 || successes + undecided > trials) {
    throw std::invalid_argument("make_estimate: inconsistent counts");
  }
  McEstimate e;
  e.successes = successes;
  e.trials = trials;
  e.undecided = undecided;
  e.seed_base = seed;
  const std::int64_t decided = trials - undecided;
  e.p_hat = decided > 0 ? static_cast<double>(successes) / static_cast<double>(decided) : 0.0;
  const Interval ci = wilson_interval(successes, decided);
  e.ci_low = ci.lo;
  e.ci_high = ci.hi;
  return e;
}

McEstimate merge(const McEstimate& a, const McEstimate& b) {
  return make_estimate(a.successes + b.successes, a.trials + b.trials, a.undecided + b.undecided, a.seed_base);
}

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& body) {
  if (count <= 0) return;
  if (threads <= 0) threads = default_threads();
  threads = static_cast<int>(std::min<std::int64_t>(threads, count));
  if (threads == 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

UniformStream replica_stream(std::uint64_t seed, std::int64_t replica) {
  return UniformStream(seed, stream_id(static_cast<std::uint64_t>(replica), Purpose::kReplica));
}

std::vector<Verdict> run_replicas(const std::function<Verdict(UniformStream&)>& event, std::int64_t replicas,
                                  std::uint64_t seed, int threads) {
  if (replicas < 1) throw std::invalid_argument("replica count must be positive");
  std::vector<Verdict> out(static_cast<std::size_t>(replicas), Verdict::kUndecided);
  parallel_for(replicas, threads, [&](std::int64_t r) {
    UniformStream stream = replica_stream(seed, r);
    out[static_cast<std::size_t>(r)] = event(stream);
  });
  return out;
}

McEstimate estimate_event(const std::function<Verdict(UniformStream&)>& event, std::int64_t replicas,
                          std::uint64_t seed, int threads) {
  const auto verdicts = run_replicas(event, replicas, seed, threads);
  std::int64_t yes = 0;
  std::int64_t unknown = 0;
  for (const auto v : verdicts) {
    if (v == Verdict::kTrue) ++yes;
    if (v == Verdict::kUndecided) ++unknown;
  }
  return make_estimate(yes, replicas, unknown, seed);
}

double sample_zprime(double alpha, std::int64_t m, UniformStream& source) {
  double sum = 0.0;
  for (std::int64_t j = 1; j <= m - 1; ++j) {
    sum += next_exponential(source) * std::pow(static_cast<double>(j), -alpha);
  }
  return sum;
}

McEstimate estimate_cdf_zprime(double alpha, std::int64_t m, double s, std::int64_t samples, std::uint64_t seed,
                               int threads) {
  if (!(s > 0.0)) throw std::invalid_argument("estimate_cdf_zprime: s must be positive");
  if (m < 1) throw std::invalid_argument("estimate_cdf_zprime: m must be positive");
  return estimate_event(
      [&](UniformStream& u) { return sample_zprime(alpha, m, u) < s ? Verdict::kTrue : Verdict::kFalse; }, samples,
      seed, threads);
}

nlohmann::json to_json(const McEstimate& e) {
  return {{"successes", e.successes}, {"trials", e.trials},   {"undecided", e.undecided},
          {"p_hat", e.p_hat},         {"ci_low", e.ci_low},   {"ci_high", e.ci_high},
          {"seed_base", e.seed_base}};
}

McEstimate estimate_from_json(const nlohmann::json& j) {
  return make_estimate(j.at("successes").get<std::int64_t>(), j.at("trials").get<std::int64_t>(),
                       j.at("undecided").get<std::int64_t>(), j.at("seed_base").get<std::uint64_t>());
}

}  // namespace warmlab
