// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
#include <unistd.h>

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "crystal_oracle.hpp"
#include "warmlab/analysis.hpp"
#include "warmlab/cli.hpp"
#include "warmlab/graph.hpp"
#include "warmlab/manifest.hpp"
#include "warmlab/montecarlo.hpp"
#include "warmlab/params.hpp"
#include "warmlab/rubin.hpp"
#include "warmlab/series.hpp"
#include "warmlab/urn.hpp"
#include "warmlab/verify.hpp"
#include "warmlab/warm.hpp"

using namespace warmlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double total_variation(const std::map<std::string, double>& p, const std::map<std::string, double>& q) {
  std::map<std::string, double> diff = p;
  for (const auto& [k, v] : q) diff[k] -= v;
  double tv = 0.0;
  for (const auto& [k, v] : diff) tv += std::abs(v);
  return tv / 2.0;
}

// 1. sequential urn from (2,1) against the product of selection probabilities
Outcome urn_exactness() {
  const auto start = Clock::now();
  constexpr int kSteps = 6;
  constexpr std::int64_t kReplicas = 100000;
  std::map<std::string, double> exact;
  for (int mask = 0; mask < (1 << kSteps); ++mask) {
    std::array<double, 2> tally{2.0, 1.0};
    double prob = 1.0;
    std::string key;
    for (int s = 0; s < kSteps; ++s) {
      const int c = (mask >> s) & 1;
      prob *= tally[c] * tally[c] / (tally[0] * tally[0] + tally[1] * tally[1]);
      tally[c] += 1.0;
      key += static_cast<char>('0' + c);
    }
    exact[key] = prob;
  }
  std::vector<std::string> keys(kReplicas);
  const UrnState init{{2, 1}, 0};
  parallel_for(kReplicas, 0, [&](std::int64_t r) {
    UniformStream u = replica_stream(101, r);
    const UrnTrace t = run_sequential(init, 2.0, kSteps, u);
    std::string key;
    for (const auto c : t.choices) key += static_cast<char>('0' + c);
    keys[static_cast<std::size_t>(r)] = key;
  });
  std::map<std::string, double> empirical;
  for (const auto& k : keys) empirical[k] += 1.0 / kReplicas;
  const double tv = total_variation(empirical, exact);
  const double secs = seconds_since(start);
  return {tv <= 0.01 && secs < 10.0 && exact.size() == 64, fmt("TV %.5f (<= 0.01), %.2f s (< 10 s)", tv, secs)};
}

std::string set_key(const std::vector<std::int32_t>& choices, std::int64_t m, std::int64_t n) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n + 1), 0);
  for (const auto c : choices) ++counts[static_cast<std::size_t>(c)];
  std::string key = "{";
  for (std::int64_t k = 1; k <= n; ++k) {
    if (counts[static_cast<std::size_t>(k)] == m - 1) key += std::to_string(k) + ",";
  }
  return key + "}";
}

// 2. law of the exactly-(m-1) colour set over the first 10 events, both engines
Outcome engine_coupling() {
  constexpr std::int64_t m = 3;
  constexpr std::int64_t n = 2;
  constexpr std::int64_t kEvents = 10;
  constexpr std::int64_t kReplicas = 100000;
  std::vector<std::string> seq(kReplicas);
  std::vector<std::string> rub(kReplicas);
  std::atomic<std::int64_t> undecided{0};
  RubinOptions opt;
  opt.z_terms = kEvents;
  parallel_for(kReplicas, 0, [&](std::int64_t r) {
    UniformStream a = replica_stream(202, r);
    seq[static_cast<std::size_t>(r)] = set_key(run_sequential(head_start_state(m, n), 2.0, kEvents, a).choices, m, n);
    UniformStream b = replica_stream(303, r);
    const auto choices = rubin_choices(run_rubin(2.0, m, n, b, opt), kEvents);
    if (!choices) {
      ++undecided;
      return;
    }
    rub[static_cast<std::size_t>(r)] = set_key(*choices, m, n);
  });
  std::map<std::string, double> ps;
  std::map<std::string, double> pr;
  const double decided = static_cast<double>(kReplicas - undecided.load());
  for (const auto& k : seq) ps[k] += 1.0 / kReplicas;
  for (const auto& k : rub) {
    if (!k.empty()) pr[k] += 1.0 / decided;
  }
  const double tv = total_variation(ps, pr);
  const double frac = static_cast<double>(undecided.load()) / kReplicas;
  return {tv <= 0.02 && frac < 0.01, fmt("TV %.5f (<= 0.02), undecided %.4f (< 0.01)", tv, frac)};
}

// 3. symmetric start (1,1)
Outcome symmetry() {
  constexpr std::int64_t kReplicas = 100000;
  const McEstimate seq = estimate_event(
      [](UniformStream& u) {
        return run_sequential(UrnState{{1, 1}, 0}, 2.0, 1, u).choices[0] == 0 ? Verdict::kTrue : Verdict::kFalse;
      },
      kReplicas, 404);
  const McEstimate rub = estimate_event(
      [](UniformStream& u) {
        const auto c = rubin_choices(run_rubin(2.0, 1, 1, u), 1);
        if (!c) return Verdict::kUndecided;
        return (*c)[0] == 0 ? Verdict::kTrue : Verdict::kFalse;
      },
      kReplicas, 505);
  const double ds = std::abs(seq.p_hat - 0.5);
  const double dr = std::abs(rub.p_hat - 0.5);
  return {ds <= 0.006 && dr <= 0.006 && rub.undecided == 0,
          fmt("sequential %.5f, rubin %.5f (|p - 1/2| <= 0.006)", seq.p_hat, rub.p_hat)};
}

// 4. coverage of the S interval
Outcome s_coverage() {
  const auto start = Clock::now();
  const PropositionReport r = verify_p_S(2.0, 1000, 6.0, 10000, {.seed = 606});
  const double secs = seconds_since(start);
  const auto& c = r.cells.front().counts;
  return {r.passed() && secs < 30.0,
          fmt("coverage %s, ci_low %s (>= 0.99), %.2f s (< 30 s)", c.value("p_hat", nlohmann::json()).dump().c_str(),
              c.value("ci_low", nlohmann::json()).dump().c_str(), secs)};
}

// 5. two-sided bound for p = 2
Outcome two_term_bounds() {
  bool ok = true;
  std::string detail;
  for (const double x : {0.01, 0.05, 0.1}) {
    const double f = two_rate_cdf(2.0, x);
    const double cross = series_cdf(2.0, 1, 2, x);
    const double hi = x * x * 2.0;
    const double lo = hi * std::exp(-4.0 * x);
    const bool in = f >= lo - 1e-12 && f <= hi + 1e-12 && std::abs(f - cross) <= 1e-12;
    ok = ok && in && 4.0 * x < 1.0;
    detail += fmt("x=%.2f: %.6e in [%.6e, %.6e]; ", x, f, lo, hi);
  }
  return {ok, detail};
}

// 6. s versus s'
Outcome lemma_ss() {
  const PropositionReport r = verify_lemma_ss(2.0, 5, 0.1, 0.2, 1000000, {.seed = 707});
  return {r.passed(), "margin " + std::to_string(r.cells.front().margin) + ", verdict " + r.verdict};
}

// 7. no disconnect violation on T3 depth 3
Outcome disconnect() {
  constexpr std::int64_t kReplicas = 10000;
  const Graph g = build_tree(3, 3, 0.5);
  std::atomic<std::int64_t> checks{0};
  std::atomic<std::int64_t> violations{0};
  std::atomic<std::int64_t> events{0};
  parallel_for(kReplicas, 0, [&](std::int64_t r) {
    WarmConfig c;
    c.graph = &g;
    c.horizon = 20.0;
    c.seed = mix64(808 + static_cast<std::uint64_t>(r));
    const WarmTrajectory t = simulate(c);
    events += static_cast<std::int64_t>(t.events.size());
    for (std::size_t v = 0; v < g.size(); ++v) {
      const Vertex& x = g.vertex(static_cast<VertexId>(v));
      // the last child needs its own children: depth <= D - 2
      if (x.parent == kNoVertex || x.depth > 1) continue;
      ++checks;
      if (check_disconnect(t, static_cast<VertexId>(v)).violated) ++violations;
    }
  });
  return {violations.load() == 0 && checks.load() > 0,
          fmt("%lld violations in %lld checks over %lld replicas (%lld events)", static_cast<long long>(violations.load()),
              static_cast<long long>(checks.load()), static_cast<long long>(kReplicas),
              static_cast<long long>(events.load()))};
}

// 8. crystal builder against the recursive derivation
Outcome crystal() {
  const Graph g = build_tree(3, 4, 0.5);
  UniformStream u(909, stream_id("acceptance-crystal", Purpose::kAuxiliary));
  int mismatches = 0;
  std::int64_t nodes = 0;
  for (int i = 0; i < 1000; ++i) {
    const GoodnessReport r = testing::random_report(g, u, 0.5 + 0.45 * u.next());
    for (const auto root : g.vertex(0).children) {
      const CrystalTree t = build_crystal_tree(r, root);
      nodes += static_cast<std::int64_t>(t.nodes.size());
      if (!testing::same_tree(g, r, t)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%d mismatches over 1000 reports (%lld crystal nodes)", mismatches,
                               static_cast<long long>(nodes))};
}

// 9. replay from manifests with a different thread count
Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / ("warmlab-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(base);
  const std::vector<std::vector<std::string>> commands{
      {"urn", "simulate", "--m", "3", "--c1", "1", "--n", "40", "--replicas", "2000"},
      {"urn", "simulate", "--m", "10", "--replicas", "500"},
      {"urn", "verify", "--prop", "lemma_ss", "--m", "5", "--replicas", "20000"},
      {"warm", "--n", "3", "--depth", "3", "--horizon", "10", "--replicas", "200", "--trajectories", "3"},
  };
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const fs::path first = base / ("run" + std::to_string(i));
    const fs::path second = base / ("replay" + std::to_string(i));
    auto args = commands[i];
    args.insert(args.end(), {"--threads", "1", "--out", first.string()});
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    const int again = run_cli({"replay", (first / kManifestName).string(), "--threads", "4", "--out", second.string()},
                              out, err);
    const bool same = code == kExitOk && again == kExitOk &&
                      read_manifest(first / kManifestName).outputs == read_manifest(second / kManifestName).outputs;
    ok = ok && same;
    detail += commands[i][0] + (commands[i][0] == "urn" ? " " + commands[i][1] : "") + (same ? " same; " : " DIFFERS; ");
  }
  fs::remove_all(base);
  return {ok, detail};
}

// 10. full pipeline trend
Outcome theorem_trend() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  for (const std::int64_t m : {10, 20, 30}) {
    Theorem1Options o;
    o.seed = 1000 + static_cast<std::uint64_t>(m);
    const Theorem1Report r = run_theorem1(2.0, m, 10000, o);
    const double undecided = r.event.undecided_fraction();
    ok = ok && undecided < 0.05;
    detail += fmt("m=%lld n=%.3g only_zero_exceeds %.4f [%.4f, %.4f] |set|>=5 %.4f [%.4f, %.4f] undecided %.4f; ",
                  static_cast<long long>(m), r.n, r.only_zero_exceeds.p_hat, r.only_zero_exceeds.ci_low,
                  r.only_zero_exceeds.ci_high, r.enough_exact.p_hat, r.enough_exact.ci_low, r.enough_exact.ci_high,
                  undecided);
  }
  const double secs = seconds_since(start);
  ok = ok && secs < 300.0;
  return {ok, detail + fmt("%.1f s (< 300 s)", secs)};
}

// 11. negative controls
Outcome negative_controls() {
  const PropositionReport delta = verify_p_delta(2.0, {10, 20, 40}, 0.0, 2.0);
  Theorem1Options o;
  o.seed = 1111;
  const Theorem1Report probe = run_theorem1(2.0, 10, 1, o);
  o.min_colours = static_cast<std::int64_t>(probe.n) + 1;
  const Theorem1Report r = run_theorem1(2.0, 10, 2000, o);
  const bool ok = delta.verdict == "fail" && r.enough_exact.successes == 0 && r.event.successes == 0 &&
                  r.enough_exact.decided() > 0;
  return {ok, "p_delta(delta=0) " + delta.verdict + fmt(", impossible threshold P = %.4f over %lld decided",
                                                           r.event.p_hat, static_cast<long long>(r.event.decided()))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 urn exactness", urn_exactness},
      {"2 engine coupling", engine_coupling},
      {"3 symmetry", symmetry},
      {"4 S coverage", s_coverage},
      {"5 two-term bounds", two_term_bounds},
      {"6 s versus s'", lemma_ss},
      {"7 disconnect invariant", disconnect},
      {"8 crystal oracle", crystal},
      {"9 determinism", determinism},
      {"10 theorem trend", theorem_trend},
      {"11 negative controls", negative_controls},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %-24s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
