// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "warmlab/params.hpp"
#include "warmlab/rubin.hpp"
#include "warmlab/series.hpp"

namespace warmlab {
namespace {

double zprime_cdf(double alpha, std::int64_t m, double x) {
  if (m <= 1) return x > 0.0 ? 1.0 : 0.0;
  return series_cdf(alpha, 1, m - 1, x);
}

std::vector<std::int64_t> sorted_grid(std::vector<std::int64_t> grid) {
  if (grid.empty()) throw std::invalid_argument("m grid is empty");
  std::sort(grid.begin(), grid.end());
  if (std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw std::invalid_argument("m grid has repeated values");
  }
  for (const auto m : grid) {
    if (m < 2) throw std::invalid_argument("m grid values must be at least 2");
  }
  return grid;
}

ReportCell cell(nlohmann::json parameters, std::string status, double margin, nlohmann::json counts = {}) {
  return {std::move(parameters), std::move(status), margin, std::move(counts)};
}

}  // namespace

std::string combine_status(const std::vector<ReportCell>& cells) {
  bool any_threshold = false;
  bool insufficient = false;
  for (const auto& c : cells) {
    if (c.status == "fail") return "fail";
    if (c.status == "insufficient") insufficient = true;
    if (c.status != "report") any_threshold = true;
  }
  if (insufficient) return "insufficient";
  return any_threshold ? "pass" : "report";
}

nlohmann::json to_json(const PropositionReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"parameters", c.parameters}, {"status", c.status}, {"margin", c.margin}, {"counts", c.counts}});
  }
  return {{"id", report.id},
          {"surrogate", report.surrogate},
          {"verdict", report.verdict},
          {"summary", report.summary},
          {"cells", cells}};
}

std::string to_text(const PropositionReport& report) {
  std::ostringstream out;
  out << report.id << (report.surrogate ? " (surrogate)" : "") << ": " << report.verdict << '\n';
  out << std::left << std::setw(14) << "status" << std::setw(16) << "margin" << "parameters\n";
  for (const auto& c : report.cells) {
    std::ostringstream margin;
    margin << std::setprecision(6) << c.margin;
    out << std::left << std::setw(14) << c.status << std::setw(16) << margin.str() << c.parameters.dump() << '\n';
  }
  return out.str();
}

PropositionReport verify_p_S(double alpha, std::int64_t m, double c1, std::int64_t replicas,
                             const VerifyOptions& options) {
  if (!(alpha > 1.0) || m < 1 || !(c1 > 0.0)) throw std::invalid_argument("verify_p_S: need alpha > 1, m >= 1, c1 > 0");
  if (replicas < 1) throw std::invalid_argument("verify_p_S: replicas must be positive");
  const double centre = 1.0 / ((alpha - 1.0) * std::pow(static_cast<double>(m), alpha - 1.0));
  const double half = c1 / std::pow(static_cast<double>(m), alpha - 0.5);
  const double lower = centre - half;
  const double upper = centre + half;
  const std::int64_t cap = m << 20;

  const McEstimate est = estimate_event(
      [&](UniformStream& u) {
        SSeries s(alpha, m, options.kappa);
        s.extend_to(4 * m, u, nullptr, 0);
        for (;;) {
          const SBracket b = s.bracket();
          if (b.lo > lower && b.hi < upper) return Verdict::kTrue;
          if (b.hi <= lower || b.lo >= upper) return Verdict::kFalse;
          if (s.last() >= cap) return Verdict::kUndecided;
          s.extend_to(std::min(2 * s.last(), cap), u, nullptr, 0);
        }
      },
      replicas, options.seed, options.threads);

  PropositionReport report;
  report.id = "p_S";
  report.surrogate = true;
  const std::string status = m < 10 ? "report" : (est.ci_low >= 0.99 ? "pass" : "fail");
  report.cells.push_back(cell({{"alpha", alpha}, {"m", m}, {"c1", c1}, {"lower", lower}, {"upper", upper}}, status,
                              est.ci_low - 0.99, to_json(est)));
  report.verdict = combine_status(report.cells);
  report.summary = {{"coverage", to_json(est)},
                    {"mean", series_mean(alpha, m)},
                    {"variance", series_variance(alpha, m)},
                    {"threshold", 0.99}};
  return report;
}

PropositionReport verify_p_Zincr(double alpha, std::int64_t m, double c1, std::int64_t grid_points,
                                 std::int64_t replicas, const VerifyOptions& options) {
  if (grid_points < 1) throw std::invalid_argument("verify_p_Zincr: need at least one grid point");
  const auto [s_minus, s_plus] = derive_s_bounds(alpha, m, c1);
  PropositionReport report;
  report.id = "p_Zincr";

  // (a) convexity of the CDF on [0, s+].
  if (grid_points < 3) {
    report.cells.push_back(cell({{"check", "convexity"}, {"grid_points", grid_points}}, "insufficient", 0.0));
  } else {
    std::vector<double> xs;
    std::vector<double> fs;
    for (std::int64_t i = 0; i < grid_points; ++i) {
      xs.push_back(s_plus * static_cast<double>(i) / static_cast<double>(grid_points - 1));
      fs.push_back(zprime_cdf(alpha, m, xs.back()));
    }
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < fs.size(); ++i) worst = std::min(worst, fs[i - 1] - 2.0 * fs[i] + fs[i + 1]);
    const double tol = 1e-12 * std::max(1e-300, fs.back());
    report.cells.push_back(cell({{"check", "convexity"}, {"grid_points", grid_points}, {"s_plus", s_plus}},
                                worst >= -tol ? "pass" : "fail", worst, {{"x", xs}, {"cdf", fs}}));
  }

  // (b) enough candidates in every window of width m^-alpha.
  const double p_lower = zprime_cdf(alpha, m, s_minus);
  const double n = derive_n(alpha, m, p_lower);
  const double width = std::pow(static_cast<double>(m), -alpha);
  const std::int64_t points = std::max<std::int64_t>(grid_points, 1);
  for (std::int64_t i = 0; i < points; ++i) {
    const double s =
        points == 1 ? s_minus : s_minus + (s_plus - s_minus) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double window = zprime_cdf(alpha, m, s) - zprime_cdf(alpha, m, s - width);
    const double value = n * window;
    report.cells.push_back(cell({{"check", "window"}, {"s", s}, {"n", n}}, value > 100.0 ? "pass" : "fail",
                                value - 100.0, {{"probability", window}, {"n_times_probability", value}}));
  }
  report.verdict = combine_status(report.cells);
  report.summary = {{"s_minus", s_minus}, {"s_plus", s_plus}, {"p_lower", p_lower}, {"n", n}};
  if (replicas > 0) {
    report.summary["p_lower_mc"] = to_json(estimate_cdf_zprime(alpha, m, s_minus, replicas, options.seed, options.threads));
    report.summary["p_upper_mc"] = to_json(estimate_cdf_zprime(alpha, m, s_plus, replicas, options.seed, options.threads));
  }
  return report;
}

PropositionReport verify_p_LargeDev(double alpha, const std::vector<std::int64_t>& m_grid, std::int64_t replicas,
                                    const VerifyOptions& options) {
  if (replicas < 1) throw std::invalid_argument("verify_p_LargeDev: replicas must be positive");
  if (!(alpha > 1.0)) throw std::invalid_argument("verify_p_LargeDev: alpha must exceed 1");
  const auto grid = sorted_grid(m_grid);
  PropositionReport report;
  report.id = "p_LargeDev";
  report.surrogate = true;

  std::vector<double> exact;
  std::vector<McEstimate> mc;
  for (const auto m : grid) {
    const double threshold = 1.0 / (10.0 * std::pow(2.0 * static_cast<double>(m), alpha - 1.0));
    exact.push_back(series_cdf(alpha, m, 2 * m, threshold));
    mc.push_back(estimate_event(
        [&](UniformStream& u) {
          double sum = 0.0;
          for (std::int64_t j = m; j <= 2 * m; ++j) sum += next_exponential(u) * std::pow(static_cast<double>(j), -alpha);
          return sum <= threshold ? Verdict::kTrue : Verdict::kFalse;
        },
        replicas, options.seed, options.threads));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::string status = "report";
    double margin = 0.0;
    if (i > 0) {
      const bool exact_down = exact[i] < exact[i - 1];
      const bool mc_down = mc[i].p_hat <= mc[i - 1].ci_high;
      if (exact[i] == 0.0 && exact[i - 1] == 0.0) {
        status = "insufficient";
      } else {
        status = exact_down && mc_down ? "pass" : "fail";
      }
      margin = exact[i - 1] - exact[i];
    }
    report.cells.push_back(cell({{"m", grid[i]}}, status, margin,
                                {{"exact_failure", exact[i]}, {"mc_failure", to_json(mc[i])}}));
  }
  // Decay rate: least-squares slope of -log(failure) against m.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int k = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(exact[i] > 0.0)) continue;
    const double x = static_cast<double>(grid[i]);
    const double y = -std::log(exact[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  report.summary = {{"fitted_rate", k >= 2 ? (k * sxy - sx * sy) / (k * sxx - sx * sx) : 0.0}, {"fit_points", k}};
  report.verdict = combine_status(report.cells);
  return report;
}

PropositionReport verify_lemma_ss(double alpha, std::int64_t m, double s, double s_prime, std::int64_t replicas,
                                  const VerifyOptions& options) {
  if (!(s > 0.0)) throw std::invalid_argument("verify_lemma_ss: s must be positive");
  if (s_prime < s) throw std::invalid_argument("verify_lemma_ss: s' must not be below s");
  if (replicas < 1) throw std::invalid_argument("verify_lemma_ss: replicas must be positive");
  if (m < 2) throw std::invalid_argument("verify_lemma_ss: m must be at least 2");
  const auto both = run_replicas(
      [&](UniformStream& u) {
        const double z = sample_zprime(alpha, m, u);
        // Encode (z < s, z < s') in one verdict: z < s implies z < s'.
        if (z < s) return Verdict::kTrue;
        return z < s_prime ? Verdict::kUndecided : Verdict::kFalse;
      },
      replicas, options.seed, options.threads);
  std::int64_t below_s = 0;
  std::int64_t below_sp = 0;
  for (const auto v : both) {
    if (v == Verdict::kTrue) ++below_s;
    if (v != Verdict::kFalse) ++below_sp;
  }
  const McEstimate p = make_estimate(below_s, replicas, 0, options.seed);
  const McEstimate pp = make_estimate(below_sp, replicas, 0, options.seed);
  const double factor = std::pow(s_prime / s, static_cast<double>(m));
  const double lhs = pp.ci_low;
  const double rhs = factor * p.ci_high;
  const double exact_s = zprime_cdf(alpha, m, s);
  const double exact_sp = zprime_cdf(alpha, m, s_prime);

  PropositionReport report;
  report.id = "lemma_ss";
  report.cells.push_back(cell({{"alpha", alpha}, {"m", m}, {"s", s}, {"s_prime", s_prime}}, lhs <= rhs ? "pass" : "fail",
                              rhs - lhs,
                              {{"below_s", to_json(p)},
                               {"below_s_prime", to_json(pp)},
                               {"factor", factor},
                               {"exact_below_s", exact_s},
                               {"exact_below_s_prime", exact_sp}}));
  report.verdict = combine_status(report.cells);
  report.summary = {{"exact_holds", exact_sp <= factor * exact_s}};
  return report;
}

double two_rate_cdf(double alpha, double x) {
  if (!(x > 0.0)) return 0.0;
  const double b = std::pow(2.0, alpha);
  return (-b * std::expm1(-x) + std::expm1(-b * x)) / (b - 1.0);
}

PropositionReport verify_p_growing(double alpha, std::int64_t m, double beta, double c1, std::int64_t grid_points) {
  if (!(alpha > 1.0)) throw std::invalid_argument("verify_p_growing: alpha must exceed 1");
  if (!(beta > 0.0) || !(beta < (alpha - 1.0) / alpha)) {
    throw std::invalid_argument("verify_p_growing: beta must lie in (0, (alpha-1)/alpha)");
  }
  if (grid_points < 1) throw std::invalid_argument("verify_p_growing: need at least one grid point");
  const auto [s_minus, s_plus] = derive_s_bounds(alpha, m, c1);
  (void)s_plus;
  const auto p = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(m), beta)));

  PropositionReport report;
  report.id = "p_growing";
  std::vector<double> xs;
  std::vector<double> fs;
  for (std::int64_t i = 1; i <= grid_points; ++i) {
    xs.push_back(s_minus * static_cast<double>(i) / static_cast<double>(grid_points));
    fs.push_back(zprime_cdf(alpha, m, xs.back()));
  }
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i; j < xs.size(); ++j) {
      const double bound = std::numbers::e * std::pow(xs[i] / xs[j], static_cast<double>(p)) * fs[j];
      if (bound > 0.0) worst = std::min(worst, (bound - fs[i]) / bound);
    }
  }
  const bool growth_ok = !(worst < -1e-12);
  report.cells.push_back(cell({{"check", "growth"}, {"m", m}, {"p", p}, {"s_minus", s_minus}},
                              growth_ok ? "pass" : "fail", std::isfinite(worst) ? worst : 0.0,
                              {{"x", xs}, {"cdf", fs}}));

  for (const std::int64_t q : {2, 3}) {
    const double factorial = q == 2 ? 2.0 : 6.0;
    const double scale = std::pow(static_cast<double>(q), alpha);
    for (const double frac : {0.01, 0.05, 0.1, 0.5, 0.9}) {
      const double x = frac / scale;
      const double truth = q == 2 ? two_rate_cdf(alpha, x) : series_cdf(alpha, 1, q, x);
      const double upper = std::pow(x, static_cast<double>(q)) * std::pow(factorial, alpha - 1.0);
      const double lower = upper * std::exp(-scale * x);
      const bool ok = truth >= lower - 1e-12 && truth <= upper + 1e-12;
      report.cells.push_back(cell({{"check", "two_sided"}, {"p", q}, {"x", x}}, ok ? "pass" : "fail",
                                  std::min(truth - lower, upper - truth),
                                  {{"cdf", truth}, {"lower", lower}, {"upper", upper}}));
    }
  }
  report.verdict = combine_status(report.cells);
  report.summary = {{"p", p}, {"beta", beta}};
  return report;
}

PropositionReport verify_p_delta(double alpha, const std::vector<std::int64_t>& m_grid, double delta, double c1,
                                 std::int64_t replicas, const VerifyOptions& options) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("verify_p_delta: delta must lie in [0, 1)");
  const auto grid = sorted_grid(m_grid);
  PropositionReport report;
  report.id = "p_delta";
  report.surrogate = true;
  const double beta = (alpha - 1.0) / (2.0 * alpha);
  std::vector<double> ratio;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::int64_t m = grid[i];
    const double s_minus = derive_s_bounds(alpha, m, c1).first;
    const double full = zprime_cdf(alpha, m, s_minus);
    const double shrunk = zprime_cdf(alpha, m, (1.0 - delta) * s_minus);
    const double power = std::pow(static_cast<double>(m), alpha);
    ratio.push_back(full > 0.0 ? power * shrunk / full : std::numeric_limits<double>::quiet_NaN());
    nlohmann::json counts{{"p_full", full},
                          {"p_shrunk", shrunk},
                          {"ratio", ratio.back()},
                          {"envelope", power * std::numbers::e *
                                           std::pow(1.0 - delta, std::pow(static_cast<double>(m), beta))}};
    if (replicas > 0) {
      counts["mc_full"] = to_json(estimate_cdf_zprime(alpha, m, s_minus, replicas, options.seed, options.threads));
      if (delta > 0.0) {
        counts["mc_shrunk"] =
            to_json(estimate_cdf_zprime(alpha, m, (1.0 - delta) * s_minus, replicas, options.seed, options.threads));
      }
    }
    std::string status = "report";
    double margin = 0.0;
    if (!std::isfinite(ratio.back())) {
      status = "insufficient";
    } else if (i > 0 && std::isfinite(ratio[i - 1])) {
      status = ratio[i] < ratio[i - 1] ? "pass" : "fail";
      margin = ratio[i - 1] - ratio[i];
    }
    report.cells.push_back(cell({{"m", m}, {"delta", delta}, {"s_minus", s_minus}}, status, margin, counts));
  }
  report.verdict = combine_status(report.cells);
  report.summary = {{"ratios", ratio}, {"envelope_beta", beta}};
  return report;
}

Theorem1Report run_theorem1(double alpha, std::int64_t m, std::int64_t replicas, const Theorem1Options& options) {
  if (replicas < 1) throw std::invalid_argument("run_theorem1: replicas must be positive");
  Theorem1Report r;
  r.alpha = alpha;
  r.m = m;
  r.c1 = options.c1;
  r.min_colours = options.min_colours;
  r.delta0 = derive_delta0(alpha);
  std::tie(r.s_minus, r.s_plus) = derive_s_bounds(alpha, m, options.c1);
  r.p_lower = zprime_cdf(alpha, m, r.s_minus);
  if (!(r.p_lower > 0.0)) throw std::runtime_error("run_theorem1: P(Z' < s-) underflows");
  r.n = options.n > 0.0 ? std::floor(options.n) : derive_n(alpha, m, r.p_lower);

  const std::int64_t samples = options.zprime_samples > 0 ? options.zprime_samples : replicas;
  r.p_lower_mc = estimate_cdf_zprime(alpha, m, r.s_minus, samples, options.seed ^ 0x5a5a5a5aULL, options.threads);
  if (r.p_lower_mc.successes > 0) {
    r.n_low = derive_n(alpha, m, std::min(1.0, r.p_lower_mc.ci_high));
    r.n_high = derive_n(alpha, m, r.p_lower_mc.ci_low > 0.0 ? r.p_lower_mc.ci_low : r.p_lower_mc.p_hat);
  }

  const bool explicit_engine = r.n <= static_cast<double>(options.explicit_limit);
  r.engine = explicit_engine ? "explicit" : "aggregate";
  r.replicas.assign(static_cast<std::size_t>(replicas), {});
  parallel_for(replicas, options.threads, [&](std::int64_t i) {
    UniformStream stream = replica_stream(options.seed, i);
    Theorem1Replica& out = r.replicas[static_cast<std::size_t>(i)];
    if (explicit_engine) {
      RubinOptions ro;
      ro.kappa = options.kappa;
      const RubinClocks clocks = run_rubin(alpha, m, static_cast<std::int64_t>(r.n), stream, ro);
      const PolyaOutcome o = evaluate_outcome(clocks, m);
      out.decided = o.decided;
      out.only_zero_exceeds = o.only_zero_exceeds;
      out.enough_exact = static_cast<std::int64_t>(o.exact_m_minus_1.size()) >= options.min_colours;
      out.truncation_index = clocks.truncation_index;
    } else {
      AggregateOptions ao;
      ao.kappa = options.kappa;
      ao.min_colours = options.min_colours;
      const AggregateOutcome o = run_rubin_aggregate(alpha, m, r.n, stream, ao);
      out.decided = o.decided;
      out.only_zero_exceeds = o.only_zero_exceeds;
      out.enough_exact = o.enough_exact;
      out.truncation_index = o.truncation_index;
    }
  });

  std::int64_t undecided = 0, both = 0, zero = 0, enough = 0;
  for (const auto& x : r.replicas) {
    if (!x.decided) {
      ++undecided;
      continue;
    }
    zero += x.only_zero_exceeds ? 1 : 0;
    enough += x.enough_exact ? 1 : 0;
    both += (x.only_zero_exceeds && x.enough_exact) ? 1 : 0;
  }
  r.event = make_estimate(both, replicas, undecided, options.seed);
  r.only_zero_exceeds = make_estimate(zero, replicas, undecided, options.seed);
  r.enough_exact = make_estimate(enough, replicas, undecided, options.seed);
  return r;
}

nlohmann::json to_json(const Theorem1Report& r) {
  return {{"alpha", r.alpha},
          {"m", r.m},
          {"c1", r.c1},
          {"delta0", r.delta0},
          {"s_minus", r.s_minus},
          {"s_plus", r.s_plus},
          {"p_lower", r.p_lower},
          {"p_lower_mc", to_json(r.p_lower_mc)},
          {"n", r.n},
          {"n_range", {r.n_low, r.n_high}},
          {"engine", r.engine},
          {"min_colours", r.min_colours},
          {"event", to_json(r.event)},
          {"only_zero_exceeds", to_json(r.only_zero_exceeds)},
          {"enough_exact", to_json(r.enough_exact)},
          {"undecided_fraction", r.event.undecided_fraction()},
          {"surrogate", true}};
}

std::string to_text(const Theorem1Report& r) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "alpha=" << r.alpha << " m=" << r.m << " c1=" << r.c1 << " n=" << r.n << " (" << r.engine << ")\n";
  auto row = [&](const char* name, const McEstimate& e) {
    out << std::left << std::setw(20) << name << std::setw(12) << e.p_hat << '[' << e.ci_low << ", " << e.ci_high
        << "]\n";
  };
  row("event", r.event);
  row("only_zero_exceeds", r.only_zero_exceeds);
  row("enough_exact", r.enough_exact);
  out << "undecided fraction  " << r.event.undecided_fraction() << '\n';
  return out.str();
}

}  // namespace warmlab
