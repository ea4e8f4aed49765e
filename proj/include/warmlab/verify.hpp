// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Finite checks of the single-urn estimates: concentration of the winner's
// series, shape and growth of the competitor CDF, the large-deviation bound,
// the ratio trend, and the full pipeline for the urn event itself.
//
// Probabilities far below Monte Carlo resolution are evaluated with the exact
// series CDF; Monte Carlo counts are stored next to them whenever replicas
// are requested. Limits are replaced by trends over a grid of m, and such
// reports are marked as surrogates.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "warmlab/montecarlo.hpp"

namespace warmlab {

struct ReportCell {
  nlohmann::json parameters;
  std::string status;  // "pass", "fail", "insufficient" or "report"
  double margin = 0.0;
  nlohmann::json counts;
};

struct PropositionReport {
  std::string id;
  bool surrogate = false;
  std::vector<ReportCell> cells;
  std::string verdict;  // "pass", "fail", "insufficient" or "report"
  nlohmann::json summary;

  bool passed() const { return verdict == "pass"; }
};

/// Overall verdict: any fail, else any insufficient, else pass (or "report"
/// when no cell carries a threshold).
std::string combine_status(const std::vector<ReportCell>& cells);

nlohmann::json to_json(const PropositionReport& report);
std::string to_text(const PropositionReport& report);

struct VerifyOptions {
  std::uint64_t seed = 1;
  int threads = 0;
  double kappa = 20.0;
};

/// Coverage of |S - 1/((alpha-1) m^(alpha-1))| < c1 / m^(alpha-1/2); passes
/// when the Wilson lower bound reaches 0.99. Below m = 10 the cell only reports.
PropositionReport verify_p_S(double alpha, std::int64_t m, double c1, std::int64_t replicas,
                             const VerifyOptions& options = {});

/// Convexity of the CDF of Z' on [0, s+] and n P(s - m^-alpha < Z' < s) > 100
/// on [s-, s+], with n from the exact P(Z' < s-).
PropositionReport verify_p_Zincr(double alpha, std::int64_t m, double c1, std::int64_t grid_points,
                                 std::int64_t replicas = 0, const VerifyOptions& options = {});

/// P(Z'' <= 1/(10 (2m)^(alpha-1))) over an m grid; passes when it decreases.
PropositionReport verify_p_LargeDev(double alpha, const std::vector<std::int64_t>& m_grid, std::int64_t replicas,
                                    const VerifyOptions& options = {});

/// P(Z' < s') <= (s'/s)^m P(Z' < s) for s' >= s, CI-adjusted.
PropositionReport verify_lemma_ss(double alpha, std::int64_t m, double s, double s_prime, std::int64_t replicas,
                                  const VerifyOptions& options = {});

/// (a) F(x) <= e (x/y)^p F(y) for grid pairs 0 < x <= y <= s-, p = ceil(m^beta);
/// (b) the two-sided bound on P(Z^(p) < x) for p = 2, 3 with p^alpha x < 1.
PropositionReport verify_p_growing(double alpha, std::int64_t m, double beta, double c1, std::int64_t grid_points);

/// m^alpha P(Z' < (1-delta) s-) / P(Z' < s-) over an m grid; passes when it
/// decreases.
PropositionReport verify_p_delta(double alpha, const std::vector<std::int64_t>& m_grid, double delta, double c1,
                                 std::int64_t replicas = 0, const VerifyOptions& options = {});

/// P(eta_1 + eta_2 / 2^alpha < x), in closed form.
double two_rate_cdf(double alpha, double x);

struct Theorem1Options {
  double c1 = 2.0;
  double n = 0.0;                      // competitor count; 0 derives it from P(Z' < s-)
  std::int64_t min_colours = 5;
  std::int64_t explicit_limit = 2000;  // largest n simulated colour by colour
  std::int64_t zprime_samples = 0;     // 0 means one per replica
  std::uint64_t seed = 1;
  int threads = 0;
  double kappa = 20.0;
};

struct Theorem1Replica {
  bool decided = false;
  bool only_zero_exceeds = false;
  bool enough_exact = false;
  std::int64_t truncation_index = 0;
};

struct Theorem1Report {
  double alpha = 0.0;
  std::int64_t m = 0;
  double c1 = 0.0;
  double delta0 = 0.0;
  double s_minus = 0.0;
  double s_plus = 0.0;
  double p_lower = 0.0;        // exact P(Z' < s-)
  McEstimate p_lower_mc;       // Monte Carlo estimate of the same
  double n = 0.0;              // from the exact value
  double n_low = 0.0;          // from the Monte Carlo interval; 0 when it has no hits
  double n_high = 0.0;
  std::string engine;          // "explicit" or "aggregate"
  std::int64_t min_colours = 5;
  McEstimate event;
  McEstimate only_zero_exceeds;
  McEstimate enough_exact;
  std::vector<Theorem1Replica> replicas;
};

Theorem1Report run_theorem1(double alpha, std::int64_t m, std::int64_t replicas, const Theorem1Options& options = {});

nlohmann::json to_json(const Theorem1Report& report);
std::string to_text(const Theorem1Report& report);

}  // namespace warmlab
