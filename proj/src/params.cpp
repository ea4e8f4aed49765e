// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/params.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace warmlab {
namespace {

// (3d/(1-2d))^alpha / (d/2) = 2 * 3^alpha * d^(alpha-1) / (1-2d)^alpha is
// strictly increasing on (0, 1/2), so the inequality holds exactly below the
// unique crossing.
double delta_ratio(double alpha, double d) {
  return std::pow(3.0 * d / (1.0 - 2.0 * d), alpha) / (0.5 * d);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "': not a number: " + text);
  }
  if (used != text.size()) throw std::invalid_argument("key '" + key + "': trailing text: " + text);
  return value;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "': not an integer: " + text);
  }
  if (used != text.size()) throw std::invalid_argument("key '" + key + "': trailing text: " + text);
  return value;
}

}  // namespace

double derive_delta0(double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("derive_delta0: alpha must exceed 1");
  double lo = 0.0;
  double hi = 0.5;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (delta_ratio(alpha, mid) <= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.99 * lo;
}

std::pair<double, double> derive_s_bounds(double alpha, std::int64_t m, double c1) {
  if (!(alpha > 1.0) || m < 1 || !(c1 > 0.0)) {
    throw std::invalid_argument("derive_s_bounds: need alpha > 1, m >= 1, c1 > 0");
  }
  const double scale = std::pow(static_cast<double>(m), alpha - 1.0);
  const double centre = 1.0 / (alpha - 1.0);
  const double half = c1 / std::sqrt(static_cast<double>(m));
  const double s_minus = (centre - half) / scale;
  const double s_plus = (centre + half) / scale;
  if (!(s_minus > 0.0)) {
    throw std::invalid_argument("derive_s_bounds: s_minus <= 0 (m too small for c1 = " +
                                format_double(c1) + ")");
  }
  return {s_minus, s_plus};
}

std::int64_t derive_mprime(std::int64_t M, double eps, double q) {
  if (M < 1 || !(eps > 0.0) || !(q > 0.0)) {
    throw std::invalid_argument("derive_mprime: need M >= 1, eps > 0, q > 0");
  }
  const double value = std::ceil(static_cast<double>(M) / (eps * eps * q));
  if (!(value < 9.0e18)) throw std::invalid_argument("derive_mprime: M' overflows");
  return static_cast<std::int64_t>(value);
}

double derive_n(double alpha, std::int64_t m, double p_lower) {
  if (!(p_lower > 0.0) || p_lower > 1.0) {
    throw std::invalid_argument("derive_n: p_lower must lie in (0, 1]");
  }
  return std::ceil(100.0 * std::pow(static_cast<double>(m), alpha) / p_lower);
}

ParamSet complete(ParamSet params) {
  if (params.alpha > 1.0 && params.delta0 <= 0.0) params.delta0 = derive_delta0(params.alpha);
  if (params.M >= 1 && params.eps > 0.0 && params.q > 0.0) {
    params.mprime = derive_mprime(params.M, params.eps, params.q);
  }
  params.s_minus = 0.0;
  params.s_plus = 0.0;
  if (params.alpha > 1.0 && params.m >= 1 && params.c1 > 0.0) {
    try {
      std::tie(params.s_minus, params.s_plus) = derive_s_bounds(params.alpha, params.m, params.c1);
    } catch (const std::invalid_argument&) {
    }
  }
  return params;
}

std::vector<Violation> validate(const ParamSet& p) {
  std::vector<Violation> out;
  auto fail = [&](const char* name, std::string detail) { out.push_back({name, std::move(detail)}); };

  if (!(p.alpha > 1.0)) fail("alpha", "alpha must exceed 1");
  if (p.m < 1) fail("m", "m must be positive");
  if (p.n < 1) fail("n", "n must be positive");
  if (p.M < 1) fail("M", "M must be positive");
  if (!(p.eps > 0.0 && p.eps < 1.0)) fail("eps", "eps must lie in (0,1)");
  if (!(p.q > 0.0 && p.q < 1.0)) fail("q", "q must lie in (0,1)");
  if (!(p.c1 > 0.0)) fail("c1", "c1 must be positive");
  if (!out.empty()) return out;

  if (!(p.delta0 > 0.0 && p.delta0 < 0.5)) {
    fail("delta0", "delta0 must lie in (0, 1/2)");
  } else {
    const double lhs = std::pow(3.0 * p.delta0 / (1.0 - 2.0 * p.delta0), p.alpha);
    if (!(lhs < p.delta0 / 2.0)) {
      fail("delta0", "(3 delta0/(1-2 delta0))^alpha = " + format_double(lhs) +
                         " is not below delta0/2");
    }
  }

  // Integer comparison; M > 4mn with no rounding.
  const long double four_mn = 4.0L * static_cast<long double>(p.m) * static_cast<long double>(p.n);
  if (!(static_cast<long double>(p.M) > four_mn)) {
    fail("Mmn", "M = " + std::to_string(p.M) + " is not above 4mn = " +
                    std::to_string(static_cast<long long>(four_mn)));
  }

  const double bound_a = p.eps * p.eps / static_cast<double>(p.M);
  const double bound_b = p.delta0 * p.eps * p.eps / static_cast<double>(p.n);
  if (!(p.q < std::min(bound_a, bound_b))) {
    fail("qeM", "q = " + format_double(p.q) + " is not below min(eps^2/M, delta0 eps^2/n) = " +
                    format_double(std::min(bound_a, bound_b)));
  }

  const std::int64_t expected_mprime = derive_mprime(p.M, p.eps, p.q);
  if (p.mprime != expected_mprime) {
    fail("mprime", "mprime = " + std::to_string(p.mprime) + " but ceil(M/(eps^2 q)) = " +
                       std::to_string(expected_mprime));
  }

  try {
    const auto [lo, hi] = derive_s_bounds(p.alpha, p.m, p.c1);
    if (p.s_minus != lo || p.s_plus != hi) {
      fail("s_bounds", "s_minus/s_plus do not match the closed form (" + format_double(lo) + ", " +
                           format_double(hi) + ")");
    }
  } catch (const std::invalid_argument& e) {
    fail("s_bounds", e.what());
  }
  return out;
}

VertexTimes vertex_times(const ParamSet& params, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("vertex_times: rate must be positive");
  return {params.eps / lambda, static_cast<double>(params.M) / (params.eps * lambda)};
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key or value");
    }
    out[std::move(key)] = std::move(value);
  }
  return out;
}

KeyValues read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_key_values(in);
}

ParamSet apply_key_values(ParamSet base, const KeyValues& values) {
  for (const auto& [key, value] : values) {
    if (key == "alpha") {
      base.alpha = parse_double(key, value);
    } else if (key == "m") {
      base.m = parse_int(key, value);
    } else if (key == "n") {
      base.n = parse_int(key, value);
    } else if (key == "M") {
      base.M = parse_int(key, value);
    } else if (key == "eps") {
      base.eps = parse_double(key, value);
    } else if (key == "q") {
      base.q = parse_double(key, value);
    } else if (key == "delta0") {
      base.delta0 = parse_double(key, value);
    } else if (key == "c1") {
      base.c1 = parse_double(key, value);
    } else if (key == "mprime") {
      base.mprime = parse_int(key, value);
    } else if (key == "s_minus") {
      base.s_minus = parse_double(key, value);
    } else if (key == "s_plus") {
      base.s_plus = parse_double(key, value);
    } else {
      throw std::invalid_argument("unknown parameter key: " + key);
    }
  }
  return base;
}

std::string to_key_value_text(const ParamSet& p) {
  std::ostringstream out;
  out << "alpha = " << format_double(p.alpha) << '\n'
      << "m = " << p.m << '\n'
      << "n = " << p.n << '\n'
      << "M = " << p.M << '\n'
      << "eps = " << format_double(p.eps) << '\n'
      << "q = " << format_double(p.q) << '\n'
      << "delta0 = " << format_double(p.delta0) << '\n'
      << "c1 = " << format_double(p.c1) << '\n'
      << "mprime = " << p.mprime << '\n'
      << "s_minus = " << format_double(p.s_minus) << '\n'
      << "s_plus = " << format_double(p.s_plus) << '\n';
  return out.str();
}

void to_json(nlohmann::json& j, const ParamSet& p) {
  j = nlohmann::json{{"alpha", p.alpha},   {"m", p.m},         {"n", p.n},
                     {"M", p.M},           {"eps", p.eps},     {"q", p.q},
                     {"delta0", p.delta0}, {"c1", p.c1},       {"mprime", p.mprime},
                     {"s_minus", p.s_minus}, {"s_plus", p.s_plus}};
}

void from_json(const nlohmann::json& j, ParamSet& p) {
  j.at("alpha").get_to(p.alpha);
  j.at("m").get_to(p.m);
  j.at("n").get_to(p.n);
  j.at("M").get_to(p.M);
  j.at("eps").get_to(p.eps);
  j.at("q").get_to(p.q);
  j.at("delta0").get_to(p.delta0);
  j.at("c1").get_to(p.c1);
  j.at("mprime").get_to(p.mprime);
  j.at("s_minus").get_to(p.s_minus);
  j.at("s_plus").get_to(p.s_plus);
}

}  // namespace warmlab
