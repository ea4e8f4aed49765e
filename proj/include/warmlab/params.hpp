// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// The scalar parameter ledger shared by the urn, the tree process and the
// analysis passes, together with the quantities derived from it.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace warmlab {

struct ParamSet {
  double alpha = 2.0;        // reinforcement exponent, > 1
  std::int64_t m = 2;        // head-start tally of the parent edge
  std::int64_t n = 2;        // arity / number of competitor colours
  std::int64_t M = 17;       // urn step budget
  double eps = 0.5;          // time-regularity slack, in (0, 1)
  double q = 0.001;          // rate decay per generation, in (0, 1)
  double delta0 = 0.0;       // density slack of the well-behaved condition
  double c1 = 6.0;           // confidence constant for the winner's series
  std::int64_t mprime = 0;   // ceil(M / (eps^2 q))
  double s_minus = 0.0;      // confidence interval for the winner's series
  double s_plus = 0.0;
};

struct Violation {
  std::string name;
  std::string detail;
  bool operator==(const Violation&) const = default;
};

/// Largest delta in (0, 1/2) with (3d/(1-2d))^alpha <= d/2, times 0.99.
double derive_delta0(double alpha);

/// (s_minus, s_plus) = (1/(alpha-1) -+ c1/sqrt(m)) / m^(alpha-1).
/// Throws std::invalid_argument when s_minus <= 0.
std::pair<double, double> derive_s_bounds(double alpha, std::int64_t m, double c1);

/// ceil(M / (eps^2 q)).
std::int64_t derive_mprime(std::int64_t M, double eps, double q);

/// ceil(100 m^alpha / p_lower). The count can exceed 2^64 for moderate m, so
/// it is carried as an integer-valued double (exact below 2^53).
double derive_n(double alpha, std::int64_t m, double p_lower);

/// Fills delta0 (when unset), mprime and the s-bounds from the primary
/// fields. s-bounds are left at zero when the given c1 makes s_minus <= 0;
/// validate() then reports it.
ParamSet complete(ParamSet params);

/// Every violated constraint, by name: "alpha", "m", "n", "M", "eps", "q",
/// "c1", "delta0", "Mmn", "qeM", "mprime", "s_bounds".
std::vector<Violation> validate(const ParamSet& params);

/// Firing-time landmarks of a vertex with rate lambda.
struct VertexTimes {
  double t0;  // eps / lambda
  double t1;  // M / (eps lambda)
};
VertexTimes vertex_times(const ParamSet& params, double lambda);

// Flat `key = value` text format. Unknown keys are rejected; missing keys keep
// the values already present in `base`.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_value_file(const std::string& path);
ParamSet apply_key_values(ParamSet base, const KeyValues& values);
std::string to_key_value_text(const ParamSet& params);

void to_json(nlohmann::json& j, const ParamSet& p);
void from_json(const nlohmann::json& j, ParamSet& p);

}  // namespace warmlab
