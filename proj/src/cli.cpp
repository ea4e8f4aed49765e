// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "warmlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "warmlab/analysis.hpp"
#include "warmlab/manifest.hpp"
#include "warmlab/montecarlo.hpp"
#include "warmlab/params.hpp"
#include "warmlab/rng.hpp"
#include "warmlab/urn.hpp"
#include "warmlab/verify.hpp"
#include "warmlab/warm.hpp"

namespace warmlab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags whose value names an input file; the file text is stored in the
// manifest so that a replay does not depend on it.
const std::set<std::string> kFileFlags = {"--config", "--composite"};
// Flags that do not change data outputs and are left out of the manifest.
const std::set<std::string> kVolatileFlags = {"--out", "--threads"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Values of the shared flags, bound directly to CLI11.
struct Flags {
  double alpha = 2.0;
  std::int64_t m = 2;
  std::int64_t n = 2;
  std::int64_t M = 17;
  double eps = 0.5;
  double q = 0.001;
  double c1 = 6.0;
  std::uint64_t seed = 1;
  std::int64_t replicas = 1000;
  double horizon = 10.0;
  std::int32_t depth = 2;
  int threads = 0;
  std::string out = "warmlab-out";
  std::string config;
  std::map<std::string, std::vector<CLI::Option*>> options;

  bool given(const std::string& name) const {
    const auto it = options.find(name);
    if (it == options.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), [](const CLI::Option* o) { return o->count() > 0; });
  }
};

void add_common(CLI::App* app, Flags& f) {
  auto add = [&](const std::string& name, auto& target, const std::string& help) {
    f.options[name].push_back(app->add_option("--" + name, target, help));
  };
  add("alpha", f.alpha, "reinforcement exponent");
  add("m", f.m, "head-start tally");
  add("n", f.n, "competitor colours / tree arity");
  add("M", f.M, "urn step budget");
  add("eps", f.eps, "time-regularity slack");
  add("q", f.q, "rate decay per generation");
  add("c1", f.c1, "confidence constant");
  add("seed", f.seed, "base seed");
  add("replicas", f.replicas, "replica count");
  add("horizon", f.horizon, "simulation horizon");
  add("depth", f.depth, "tree depth");
  add("threads", f.threads, "worker threads (0 = all cores)");
  add("out", f.out, "output directory");
  add("config", f.config, "key = value parameter file");
}

struct Settings {
  ParamSet params;
  std::uint64_t seed = 1;
  std::int64_t replicas = 1000;
  double horizon = 10.0;
  std::int32_t depth = 2;
  int threads = 0;
  fs::path out;
  std::set<std::string> explicit_keys;  // set by a flag or the config file
};

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T x{};
  in >> x;
  if (!in || !(in >> std::ws).eof()) throw UsageError("bad value for " + key + ": " + value);
  return x;
}

Settings resolve(const Flags& f) {
  Settings s;
  if (!f.config.empty()) {
    KeyValues kv;
    try {
      kv = read_key_value_file(f.config);
    } catch (const std::exception& e) {
      throw UsageError(f.config + ": " + e.what());
    }
    for (auto it = kv.begin(); it != kv.end();) {
      const auto& [key, value] = *it;
      s.explicit_keys.insert(key);
      if (key == "seed") {
        s.seed = parse_number<std::uint64_t>(key, value);
      } else if (key == "replicas") {
        s.replicas = parse_number<std::int64_t>(key, value);
      } else if (key == "horizon") {
        s.horizon = parse_number<double>(key, value);
      } else if (key == "depth") {
        s.depth = parse_number<std::int32_t>(key, value);
      } else if (key == "threads") {
        s.threads = parse_number<int>(key, value);
      } else {
        ++it;
        continue;
      }
      it = kv.erase(it);
    }
    try {
      s.params = apply_key_values(s.params, kv);
    } catch (const std::exception& e) {
      throw UsageError(f.config + ": " + e.what());
    }
  }
  auto take = [&](const char* name, auto& target, const auto& value) {
    if (f.given(name)) {
      target = value;
      s.explicit_keys.insert(name);
    }
  };
  take("alpha", s.params.alpha, f.alpha);
  take("m", s.params.m, f.m);
  take("n", s.params.n, f.n);
  take("M", s.params.M, f.M);
  take("eps", s.params.eps, f.eps);
  take("q", s.params.q, f.q);
  take("c1", s.params.c1, f.c1);
  take("seed", s.seed, f.seed);
  take("replicas", s.replicas, f.replicas);
  take("horizon", s.horizon, f.horizon);
  take("depth", s.depth, f.depth);
  take("threads", s.threads, f.threads);
  s.out = f.out;
  if (s.replicas < 1) throw UsageError("replicas must be positive");
  return s;
}

json settings_json(const Settings& s) {
  return {{"params", s.params},
          {"run", {{"seed", s.seed}, {"replicas", s.replicas}, {"horizon", s.horizon}, {"depth", s.depth}}}};
}

// Output directory bookkeeping: every data file goes through write() so the
// manifest lists exactly what this run produced.
class Run {
 public:
  Run(std::string command, const std::vector<std::string>& args, fs::path out)
      : out_(std::move(out)) {
    manifest_.command = std::move(command);
    manifest_.started = utc_timestamp();
    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string& a = args[i];
      const auto eq = a.find('=');
      const std::string name = a.rfind("--", 0) == 0 ? a.substr(0, eq) : std::string();
      const bool inline_value = eq != std::string::npos && !name.empty();
      if (kVolatileFlags.count(name) != 0) {
        if (!inline_value) ++i;
        continue;
      }
      manifest_.arguments.push_back(a);
      if (kFileFlags.count(name) != 0) {
        const std::string value = inline_value ? a.substr(eq + 1) : (i + 1 < args.size() ? args[i + 1] : "");
        if (!value.empty()) files_[name] = read_text(value);
      }
    }
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw UsageError("cannot create " + out_.string() + ": " + ec.message());
  }

  void write(const std::string& rel, const std::string& content) {
    const fs::path path = out_ / rel;
    fs::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << content;
    if (!file) throw std::runtime_error("cannot write " + path.string());
    written_.push_back(rel);
  }

  void finish(json config, std::uint64_t seed) {
    if (!files_.empty()) config["files"] = files_;
    manifest_.config = std::move(config);
    manifest_.seed = seed;
    for (const auto& rel : written_) manifest_.outputs[rel] = sha256_file(out_ / rel);
    manifest_.finished = utc_timestamp();
    write_manifest(out_, manifest_);
  }

 private:
  fs::path out_;
  RunManifest manifest_;
  std::map<std::string, std::string> files_;
  std::vector<std::string> written_;
};

std::string estimate_csv_row(const std::string& name, const McEstimate& e) {
  return name + ',' + std::to_string(e.successes) + ',' + std::to_string(e.trials) + ',' +
         std::to_string(e.undecided) + ',' + fmt(e.p_hat) + ',' + fmt(e.ci_low) + ',' + fmt(e.ci_high) + '\n';
}
constexpr const char* kEstimateHeader = "quantity,successes,trials,undecided,p_hat,ci_low,ci_high\n";

bool is_estimate(const json& j) {
  return j.is_object() && j.contains("successes") && j.contains("trials") && j.contains("undecided");
}

// ---------------------------------------------------------------- params

int cmd_params(const Flags& f, const std::vector<std::string>& args, std::ostream& out) {
  Settings s = resolve(f);
  s.params = complete(s.params);
  const auto violations = validate(s.params);
  Run run("params", args, s.out);
  const std::string table = to_key_value_text(s.params);
  out << table;
  json verdict{{"ok", violations.empty()}, {"violations", json::array()}};
  for (const auto& v : violations) {
    verdict["violations"].push_back({{"name", v.name}, {"detail", v.detail}});
    out << "violation " << v.name << ": " << v.detail << '\n';
  }
  if (violations.empty()) out << "ok\n";
  run.write("params.txt", table);
  run.write("validation.json", verdict.dump(2) + '\n');
  run.finish(settings_json(s), s.seed);
  return violations.empty() ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------- urn

struct UrnFlags {
  std::string engine = "rubin";
  std::int64_t steps = 0;
  std::int64_t min_colours = 5;
  double max_undecided = 0.05;
  double kappa = 20.0;
  std::string prop;
  std::vector<std::int64_t> m_grid{10, 20, 40};
  double delta = -1.0;
  double beta = 0.25;
  std::int64_t grid = 20;
  double s = 0.1;
  double s_prime = 0.2;
};

int urn_simulate_rubin(const Settings& s, const UrnFlags& u, Run& run, std::ostream& out) {
  Theorem1Options opt;
  if (s.explicit_keys.count("c1") != 0) opt.c1 = s.params.c1;
  if (s.explicit_keys.count("n") != 0) opt.n = static_cast<double>(s.params.n);
  opt.min_colours = u.min_colours;
  opt.seed = s.seed;
  opt.threads = s.threads;
  opt.kappa = u.kappa;
  Theorem1Report report;
  try {
    report = run_theorem1(s.params.alpha, s.params.m, s.replicas, opt);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  std::string lines;
  for (std::size_t i = 0; i < report.replicas.size(); ++i) {
    const auto& r = report.replicas[i];
    lines += json{{"replica", i},
                  {"decided", r.decided},
                  {"only_zero_exceeds", r.only_zero_exceeds},
                  {"enough_exact", r.enough_exact},
                  {"truncation_index", r.truncation_index}}
                 .dump() +
             '\n';
  }
  json summary{{"engine", report.engine},
               {"derived",
                {{"alpha", report.alpha},
                 {"m", report.m},
                 {"c1", report.c1},
                 {"delta0", report.delta0},
                 {"s_minus", report.s_minus},
                 {"s_plus", report.s_plus},
                 {"p_lower", report.p_lower},
                 {"n", report.n},
                 {"min_colours", report.min_colours}}},
               {"estimates",
                {{"event", to_json(report.event)},
                 {"only_zero_exceeds", to_json(report.only_zero_exceeds)},
                 {"enough_exact", to_json(report.enough_exact)},
                 {"p_lower_mc", to_json(report.p_lower_mc)}}},
               {"n_range", {report.n_low, report.n_high}}};
  std::string csv = kEstimateHeader;
  csv += estimate_csv_row("event", report.event);
  csv += estimate_csv_row("only_zero_exceeds", report.only_zero_exceeds);
  csv += estimate_csv_row("enough_exact", report.enough_exact);
  csv += estimate_csv_row("p_lower_mc", report.p_lower_mc);
  run.write("outcomes.jsonl", lines);
  run.write("summary.json", summary.dump(2) + '\n');
  run.write("summary.csv", csv);
  out << to_text(report);
  return report.event.undecided_fraction() > u.max_undecided ? kExitCap : kExitOk;
}

int urn_simulate_sequential(const Settings& s, const UrnFlags& u, Run& run, std::ostream& out) {
  const std::int64_t steps = u.steps > 0 ? u.steps : s.params.M;
  if (s.params.m < 1 || s.params.n < 1 || !(s.params.alpha > 0.0)) throw ValidationError("need m >= 1, n >= 1, alpha > 0");
  const UrnState initial = head_start_state(s.params.m, s.params.n);
  struct Row {
    std::int64_t exact = 0;
    bool event = false;
    std::int32_t first = 0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(s.replicas));
  parallel_for(s.replicas, s.threads, [&](std::int64_t r) {
    UniformStream stream = replica_stream(s.seed, r);
    const UrnTrace trace = run_sequential(initial, s.params.alpha, steps, stream);
    Row& row = rows[static_cast<std::size_t>(r)];
    row.exact = static_cast<std::int64_t>(exact_colours(trace, s.params.m).size());
    row.event = corollary_event(trace, s.params.m, u.min_colours);
    row.first = trace.choices.empty() ? -1 : trace.choices.front();
  });
  std::string lines;
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    hits += rows[i].event ? 1 : 0;
    lines += json{{"replica", i}, {"exact_colours", rows[i].exact}, {"event", rows[i].event}, {"first", rows[i].first}}
                 .dump() +
             '\n';
  }
  const McEstimate est = make_estimate(hits, s.replicas, 0, s.seed);
  json summary{{"engine", "sequential"},
               {"derived", {{"alpha", s.params.alpha}, {"m", s.params.m}, {"n", s.params.n}, {"steps", steps},
                            {"min_colours", u.min_colours}}},
               {"estimates", {{"event", to_json(est)}}}};
  run.write("outcomes.jsonl", lines);
  run.write("summary.json", summary.dump(2) + '\n');
  run.write("summary.csv", std::string(kEstimateHeader) + estimate_csv_row("event", est));
  out << "event " << fmt(est.p_hat) << " [" << fmt(est.ci_low) << ", " << fmt(est.ci_high) << "]\n";
  return kExitOk;
}

int cmd_urn_simulate(const Flags& f, const UrnFlags& u, const std::vector<std::string>& args, std::ostream& out) {
  const Settings s = resolve(f);
  Run run("urn simulate", args, s.out);
  const int code = u.engine == "sequential" ? urn_simulate_sequential(s, u, run, out) : urn_simulate_rubin(s, u, run, out);
  json config = settings_json(s);
  config["urn"] = {{"engine", u.engine}, {"steps", u.steps}, {"min_colours", u.min_colours}, {"kappa", u.kappa}};
  run.finish(config, s.seed);
  return code;
}

int verify_theorem1_trend(const Settings& s, const UrnFlags& u, Run& run, std::ostream& out) {
  json rows = json::array();
  std::string csv = "m,n,engine,quantity,successes,trials,undecided,p_hat,ci_low,ci_high\n";
  for (const auto m : u.m_grid) {
    Theorem1Options opt;
    if (s.explicit_keys.count("c1") != 0) opt.c1 = s.params.c1;
    opt.min_colours = u.min_colours;
    opt.seed = s.seed;
    opt.threads = s.threads;
    opt.kappa = u.kappa;
    Theorem1Report r;
    try {
      r = run_theorem1(s.params.alpha, m, s.replicas, opt);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    rows.push_back(to_json(r));
    const std::string prefix = std::to_string(m) + ',' + fmt(r.n) + ',' + r.engine + ',';
    csv += prefix + estimate_csv_row("event", r.event);
    csv += prefix + estimate_csv_row("only_zero_exceeds", r.only_zero_exceeds);
    csv += prefix + estimate_csv_row("enough_exact", r.enough_exact);
    out << to_text(r);
  }
  run.write("trend.json", json{{"id", "theorem1"}, {"surrogate", true}, {"verdict", "report"}, {"rows", rows}}.dump(2) + '\n');
  run.write("trend.csv", csv);
  return kExitOk;
}

int cmd_urn_verify(const Flags& f, const UrnFlags& u, const std::vector<std::string>& args, std::ostream& out) {
  Settings s = resolve(f);
  Run run("urn verify", args, s.out);
  json config = settings_json(s);
  config["verify"] = {{"prop", u.prop},   {"m_grid", u.m_grid}, {"delta", u.delta},     {"beta", u.beta},
                      {"grid", u.grid},   {"s", u.s},           {"s_prime", u.s_prime}, {"min_colours", u.min_colours},
                      {"kappa", u.kappa}};
  if (u.prop == "theorem1") {
    const int code = verify_theorem1_trend(s, u, run, out);
    run.finish(config, s.seed);
    return code;
  }
  const VerifyOptions opt{s.seed, s.threads, u.kappa};
  const ParamSet& p = s.params;
  PropositionReport report;
  try {
    if (u.prop == "p_S") {
      report = verify_p_S(p.alpha, p.m, p.c1, s.replicas, opt);
    } else if (u.prop == "p_Zincr") {
      report = verify_p_Zincr(p.alpha, p.m, p.c1, u.grid, s.replicas, opt);
    } else if (u.prop == "p_LargeDev") {
      report = verify_p_LargeDev(p.alpha, u.m_grid, s.replicas, opt);
    } else if (u.prop == "lemma_ss") {
      report = verify_lemma_ss(p.alpha, p.m, u.s, u.s_prime, s.replicas, opt);
    } else if (u.prop == "p_growing") {
      report = verify_p_growing(p.alpha, p.m, u.beta, p.c1, u.grid);
    } else {
      const double delta = u.delta >= 0.0 ? u.delta : (p.alpha - 1.0) / (20.0 * std::pow(2.0, p.alpha));
      report = verify_p_delta(p.alpha, u.m_grid, delta, p.c1, 0, opt);
    }
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  std::string csv = "status,margin,parameters\n";
  for (const auto& c : report.cells) {
    std::string params = c.parameters.dump();
    std::replace(params.begin(), params.end(), ',', ';');
    csv += c.status + ',' + fmt(c.margin) + ',' + params + '\n';
  }
  const std::string text = to_text(report);
  run.write("report.json", to_json(report).dump(2) + '\n');
  run.write("report.txt", text);
  run.write("cells.csv", csv);
  run.finish(config, s.seed);
  out << text;
  return report.verdict == "fail" ? kExitValidation : kExitOk;
}

// ---------------------------------------------------------------- warm

struct WarmFlags {
  std::string composite;
  std::int64_t trajectories = 10;
  std::int64_t uniform_limit = 1 << 16;
  std::int64_t event_cap = 50'000'000;
};

struct WarmReplica {
  std::uint64_t seed = 0;
  std::int64_t events = 0;
  bool cap_hit = false;
  std::int64_t vertices = 0;  // non-root
  std::int64_t time_good = 0;
  std::int64_t polya_good = 0;
  std::int64_t tree_good = 0;
  std::int64_t crystal_nodes = 0;
  std::int64_t disconnect_checked = 0;
  std::int64_t disconnect_violated = 0;
  std::int64_t edges = 0;
  std::int64_t surviving = 0;
  std::vector<std::int64_t> offspring;
  std::map<std::string, std::string> files;
};

std::uint64_t warm_replica_seed(std::uint64_t seed, std::int64_t r) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(r) + 0x9e3779b97f4a7c15ULL));
}

int cmd_warm(const Flags& f, const WarmFlags& w, const std::vector<std::string>& args, std::ostream& out) {
  Settings s = resolve(f);
  if (!(s.horizon > 0.0)) throw UsageError("horizon must be positive");
  if (w.trajectories < 0 || w.uniform_limit < 1 || w.event_cap < 1) throw UsageError("bad warm option");
  std::vector<TreeBlock> blocks;
  if (!w.composite.empty()) {
    std::istringstream in(read_text(w.composite));
    try {
      blocks = parse_blocks(in);
    } catch (const std::exception& e) {
      throw UsageError(w.composite + ": " + e.what());
    }
  } else {
    blocks.push_back({static_cast<std::int32_t>(s.params.n), s.params.q, s.depth});
  }
  Graph graph;
  try {
    graph = build_composite(blocks);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  const ParamSet params = complete(s.params);
  Run run("warm", args, s.out);

  std::vector<WarmReplica> results(static_cast<std::size_t>(s.replicas));
  parallel_for(s.replicas, s.threads, [&](std::int64_t r) {
    WarmReplica& res = results[static_cast<std::size_t>(r)];
    WarmConfig cfg;
    cfg.graph = &graph;
    cfg.alpha = params.alpha;
    cfg.horizon = s.horizon;
    cfg.seed = res.seed = warm_replica_seed(s.seed, r);
    cfg.record_uniforms = r < w.trajectories;
    cfg.event_cap = w.event_cap;
    const WarmTrajectory traj = simulate(cfg);
    res.events = static_cast<std::int64_t>(traj.events.size());
    res.cap_hit = traj.cap_hit;

    const GoodnessReport report = build_goodness_report(traj, params, {w.uniform_limit});
    std::vector<CrystalTree> trees;
    for (std::size_t v = 0; v < graph.size(); ++v) {
      const Vertex& vx = graph.vertex(static_cast<VertexId>(v));
      if (vx.parent == kNoVertex) continue;
      const auto& g = report.vertices[v];
      ++res.vertices;
      res.time_good += g.time_good ? 1 : 0;
      res.polya_good += g.polya_good ? 1 : 0;
      res.tree_good += g.tree_good ? 1 : 0;
      if (vx.depth == 1) trees.push_back(build_crystal_tree(report, static_cast<VertexId>(v)));
      if (vx.depth <= graph.blocks()[static_cast<std::size_t>(vx.block)].depth - 2) {
        ++res.disconnect_checked;
        res.disconnect_violated += check_disconnect(traj, static_cast<VertexId>(v)).violated ? 1 : 0;
      }
    }
    for (const auto& t : trees) {
      res.crystal_nodes += static_cast<std::int64_t>(t.nodes.size());
      for (const auto& [v, c] : t.offspring) {
        const Vertex& vx = graph.vertex(v);
        if (vx.depth < graph.blocks()[static_cast<std::size_t>(vx.block)].depth) res.offspring.push_back(c);
      }
    }
    res.edges = static_cast<std::int64_t>(graph.edges().size());
    for (std::size_t e = 0; e < graph.edges().size(); ++e) {
      res.surviving += surviving(traj, static_cast<EdgeId>(e), params.eps) ? 1 : 0;
    }
    if (r < w.trajectories) {
      char name[32];
      std::snprintf(name, sizeof name, "trajectories/r%06lld", static_cast<long long>(r));
      std::ostringstream events, tallies;
      write_events_csv(events, traj);
      write_tallies_csv(tallies, traj);
      json crystal = json::array();
      for (const auto& t : trees) crystal.push_back(to_json(t, graph));
      res.files[std::string(name) + "/events.csv"] = events.str();
      res.files[std::string(name) + "/tallies.csv"] = tallies.str();
      res.files[std::string(name) + "/goodness.json"] = to_json(report).dump(2) + '\n';
      res.files[std::string(name) + "/crystal.json"] = crystal.dump(2) + '\n';
    }
  });

  WarmReplica total;
  std::int64_t cap_hits = 0;
  std::string csv =
      "replica,seed,events,cap_hit,time_good,polya_good,tree_good,crystal_nodes,disconnect_checked,"
      "disconnect_violated,surviving_edges\n";
  for (std::size_t r = 0; r < results.size(); ++r) {
    auto& x = results[r];
    csv += std::to_string(r) + ',' + std::to_string(x.seed) + ',' + std::to_string(x.events) + ',' +
           (x.cap_hit ? "1" : "0") + ',' + std::to_string(x.time_good) + ',' + std::to_string(x.polya_good) + ',' +
           std::to_string(x.tree_good) + ',' + std::to_string(x.crystal_nodes) + ',' +
           std::to_string(x.disconnect_checked) + ',' + std::to_string(x.disconnect_violated) + ',' +
           std::to_string(x.surviving) + '\n';
    total.events += x.events;
    cap_hits += x.cap_hit ? 1 : 0;
    total.vertices += x.vertices;
    total.time_good += x.time_good;
    total.polya_good += x.polya_good;
    total.tree_good += x.tree_good;
    total.crystal_nodes += x.crystal_nodes;
    total.disconnect_checked += x.disconnect_checked;
    total.disconnect_violated += x.disconnect_violated;
    total.edges += x.edges;
    total.surviving += x.surviving;
    total.offspring.insert(total.offspring.end(), x.offspring.begin(), x.offspring.end());
    for (const auto& [rel, content] : x.files) run.write(rel, content);
  }
  const GwStatistics gw = gw_statistics_from_counts(total.offspring);
  json histogram = json::object();
  for (const auto& [k, c] : gw.histogram) histogram[std::to_string(k)] = c;
  json block_json = json::array();
  for (const auto& b : blocks) block_json.push_back({{"n", b.n}, {"q", b.q}, {"depth", b.depth}});
  const json summary{
      {"graph", {{"vertices", graph.size()}, {"edges", graph.edges().size()}, {"blocks", block_json}}},
      {"horizon", s.horizon},
      {"estimates",
       {{"time_good", to_json(make_estimate(total.time_good, total.vertices, 0, s.seed))},
        {"polya_good", to_json(make_estimate(total.polya_good, total.vertices, 0, s.seed))},
        {"tree_good", to_json(make_estimate(total.tree_good, total.vertices, 0, s.seed))},
        {"disconnect_violated", to_json(make_estimate(total.disconnect_violated, total.disconnect_checked, 0, s.seed))},
        {"surviving", to_json(make_estimate(total.surviving, total.edges, 0, s.seed))}}},
      {"counts",
       {{"replicas", s.replicas},
        {"events", total.events},
        {"cap_hit", cap_hits},
        {"crystal_nodes", total.crystal_nodes},
        {"offspring_histogram", histogram}}},
      {"gw", to_json(gw)}};

  std::ostringstream adjacency, offspring;
  write_adjacency(adjacency, graph);
  write_histogram_csv(offspring, gw);
  run.write("graph.txt", adjacency.str());
  run.write("replicas.csv", csv);
  run.write("offspring.csv", offspring.str());
  run.write("summary.json", summary.dump(2) + '\n');
  json config = settings_json(s);
  config["warm"] = {{"blocks", block_json},
                    {"trajectories", w.trajectories},
                    {"uniform_limit", w.uniform_limit},
                    {"event_cap", w.event_cap}};
  run.finish(config, s.seed);

  out << "replicas " << s.replicas << ", vertices " << graph.size() << ", events " << total.events << '\n';
  out << "tree-good fraction " << fmt(total.vertices > 0 ? static_cast<double>(total.tree_good) / total.vertices : 0.0)
      << ", disconnect violations " << total.disconnect_violated << " / " << total.disconnect_checked << '\n';
  if (cap_hits > 0) {
    out << "event cap hit in " << cap_hits << " replicas\n";
    return kExitCap;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct Input {
  std::string path;
  RunManifest manifest;
  json summary;
};

Input load_input(const std::string& path) {
  const fs::path p(path);
  const fs::path dir = fs::is_directory(p) ? p : p.parent_path();
  const fs::path summary = fs::is_directory(p) ? p / "summary.json" : p;
  Input in;
  in.path = path;
  try {
    in.manifest = read_manifest(dir / kManifestName);
    in.summary = json::parse(read_text(summary));
  } catch (const std::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  return in;
}

json comparable_config(json config) {
  if (config.contains("run")) config["run"].erase("seed");
  return config;
}

json merge_json(const json& a, const json& b, const std::string& path, bool counts, std::vector<std::string>& unmerged) {
  if (is_estimate(a) && is_estimate(b)) return to_json(merge(estimate_from_json(a), estimate_from_json(b)));
  if (a.is_object() && b.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : a.items()) {
      const std::string sub = path + "/" + k;
      out[k] = b.contains(k) ? merge_json(v, b[k], sub, counts || k == "counts", unmerged) : v;
    }
    for (const auto& [k, v] : b.items()) {
      if (!a.contains(k)) out[k] = v;
    }
    return out;
  }
  if (counts && a.is_number_integer() && b.is_number_integer()) return a.get<std::int64_t>() + b.get<std::int64_t>();
  if (a == b) return a;
  unmerged.push_back(path);
  return nullptr;
}

void collect_estimates(const json& j, const std::string& path, std::string& csv) {
  if (is_estimate(j)) {
    csv += estimate_csv_row(path, estimate_from_json(j));
    return;
  }
  if (!j.is_object()) return;
  for (const auto& [k, v] : j.items()) collect_estimates(v, path.empty() ? k : path + "." + k, csv);
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir, const std::vector<std::string>& args,
               std::ostream& out, std::ostream& err) {
  if (inputs.empty()) throw UsageError("report needs at least one input");
  std::vector<Input> loaded;
  for (const auto& p : inputs) loaded.push_back(load_input(p));
  const Input& first = loaded.front();
  std::set<std::uint64_t> seeds;
  for (const auto& in : loaded) {
    if (in.manifest.command != first.manifest.command) {
      throw UsageError("inputs come from different commands: '" + first.manifest.command + "' vs '" +
                       in.manifest.command + "'");
    }
    const json a = comparable_config(first.manifest.config);
    const json b = comparable_config(in.manifest.config);
    if (a != b) {
      err << "parameter mismatch between " << first.path << " and " << in.path << ":\n"
          << json::diff(a, b).dump(2) << '\n';
      throw UsageError("refusing to merge runs with different parameters");
    }
    if (!seeds.insert(in.manifest.seed).second) {
      throw UsageError("seed " + std::to_string(in.manifest.seed) + " appears twice; the runs would overlap");
    }
  }
  std::vector<std::string> unmerged;
  json merged = first.summary;
  for (std::size_t i = 1; i < loaded.size(); ++i) merged = merge_json(merged, loaded[i].summary, "", false, unmerged);
  if (merged.contains("counts") && merged["counts"].contains("offspring_histogram")) {
    std::vector<std::int64_t> counts;
    for (const auto& [k, c] : merged["counts"]["offspring_histogram"].items()) {
      counts.insert(counts.end(), static_cast<std::size_t>(c.get<std::int64_t>()), std::stoll(k));
    }
    merged["gw"] = to_json(gw_statistics_from_counts(counts));
  }
  std::sort(unmerged.begin(), unmerged.end());
  unmerged.erase(std::unique(unmerged.begin(), unmerged.end()), unmerged.end());

  std::string csv = kEstimateHeader;
  collect_estimates(merged, "", csv);
  std::ostringstream text;
  text << "merged " << loaded.size() << " runs of '" << first.manifest.command << "'\n";
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);
  while (std::getline(rows, line)) text << "  " << line << '\n';
  if (!unmerged.empty()) {
    text << "fields that differ between inputs (left empty):";
    for (const auto& u : unmerged) text << ' ' << u;
    text << '\n';
  }

  Run run("report", args, out_dir);
  json seeds_json = json::array();
  for (const auto& in : loaded) seeds_json.push_back(in.manifest.seed);
  run.write("merged.json",
            json{{"command", first.manifest.command}, {"seeds", seeds_json}, {"summary", merged}, {"unmerged", unmerged}}
                    .dump(2) +
                '\n');
  run.write("merged.csv", csv);
  run.write("merged.txt", text.str());
  run.finish({{"inputs", inputs}, {"config", comparable_config(first.manifest.config)}}, first.manifest.seed);
  out << text.str();
  return kExitOk;
}

// ---------------------------------------------------------------- replay

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, int threads, bool threads_given,
               std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  try {
    manifest = read_manifest(manifest_path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  std::vector<std::string> args = manifest.arguments;
  const json files = manifest.config.value("files", json::object());
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string a = args[i];
    const auto eq = a.find('=');
    const std::string name = a.substr(0, eq);
    if (!files.contains(name)) continue;
    const std::string text = files[name].get<std::string>();
    const fs::path tmp = fs::temp_directory_path() / ("warmlab-replay-" + sha256_hex(text).substr(0, 16) + ".cfg");
    std::ofstream(tmp, std::ios::binary) << text;
    if (eq != std::string::npos) {
      args[i] = name + "=" + tmp.string();
    } else if (i + 1 < args.size()) {
      args[++i] = tmp.string();
    }
  }
  args.push_back("--out");
  args.push_back(out_dir);
  if (threads_given) {
    args.push_back("--threads");
    args.push_back(std::to_string(threads));
  }
  const int code = run_cli(args, out, err);
  RunManifest again;
  try {
    again = read_manifest(fs::path(out_dir) / kManifestName);
  } catch (const std::exception& e) {
    err << "replay produced no manifest: " << e.what() << '\n';
    return code == kExitOk ? kExitValidation : code;
  }
  bool same = again.outputs.size() == manifest.outputs.size();
  for (const auto& [rel, digest] : manifest.outputs) {
    const auto it = again.outputs.find(rel);
    const bool match = it != again.outputs.end() && it->second == digest;
    same = same && match;
    out << (match ? "identical " : "differs   ") << rel << '\n';
  }
  for (const auto& [rel, digest] : again.outputs) {
    if (manifest.outputs.count(rel) == 0) out << "new       " << rel << '\n';
  }
  out << (same ? "replay reproduced all outputs\n" : "replay outputs differ\n");
  return same ? code : kExitValidation;
}

}  // namespace

std::vector<TreeBlock> parse_blocks(std::istream& in) {
  std::vector<TreeBlock> blocks;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    TreeBlock b;
    if (!(fields >> b.n)) {
      if ((fields.clear(), fields >> std::ws).eof()) continue;
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'n q depth'");
    }
    if (!(fields >> b.q >> b.depth) || !(fields >> std::ws).eof()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'n q depth'");
    }
    blocks.push_back(b);
  }
  if (blocks.empty()) throw std::invalid_argument("no blocks");
  return blocks;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"warmlab: reinforcement urns and WARM processes on trees", "warmlab"};
  app.require_subcommand(1);

  Flags pf, sf, vf, wf;
  UrnFlags uf;
  WarmFlags warm_flags;
  std::vector<std::string> report_inputs;
  std::string report_out = "warmlab-report";
  std::string replay_manifest;
  std::string replay_out = "warmlab-replay";
  int replay_threads = 0;

  auto* params = app.add_subcommand("params", "print the completed parameter set and validate it");
  add_common(params, pf);

  auto* urn = app.add_subcommand("urn", "single-urn simulation and checks");
  urn->require_subcommand(1);
  auto* simulate_cmd = urn->add_subcommand("simulate", "simulate the head-start urn");
  add_common(simulate_cmd, sf);
  simulate_cmd->add_option("--engine", uf.engine, "rubin (default) or sequential")
      ->check(CLI::IsMember({"rubin", "sequential"}));
  simulate_cmd->add_option("--steps", uf.steps, "sequential engine: steps (default M)");
  simulate_cmd->add_option("--min-colours", uf.min_colours, "colours required at exactly m-1");
  simulate_cmd->add_option("--max-undecided", uf.max_undecided, "exit 3 above this undecided fraction");
  simulate_cmd->add_option("--kappa", uf.kappa, "tail-bound constant");

  auto* verify_cmd = urn->add_subcommand("verify", "finite checks of the urn estimates");
  add_common(verify_cmd, vf);
  verify_cmd->add_option("--prop", uf.prop, "check id")
      ->required()
      ->check(CLI::IsMember({"p_S", "p_Zincr", "p_LargeDev", "lemma_ss", "p_growing", "p_delta", "theorem1"}));
  verify_cmd->add_option("--m-grid", uf.m_grid, "m values for trend checks")->delimiter(',');
  verify_cmd->add_option("--delta", uf.delta, "shrink factor for p_delta (default (alpha-1)/(20 2^alpha))");
  verify_cmd->add_option("--beta", uf.beta, "growth exponent for p_growing");
  verify_cmd->add_option("--grid", uf.grid, "grid points");
  verify_cmd->add_option("--s", uf.s, "lemma_ss: s");
  verify_cmd->add_option("--s-prime", uf.s_prime, "lemma_ss: s'");
  verify_cmd->add_option("--min-colours", uf.min_colours, "theorem1: colours required at exactly m-1");
  verify_cmd->add_option("--kappa", uf.kappa, "tail-bound constant");

  auto* warm_cmd = app.add_subcommand("warm", "simulate WARM on a tree or a chain of trees and analyse it");
  add_common(warm_cmd, wf);
  warm_cmd->add_option("--composite", warm_flags.composite, "block file: one 'n q depth' line per tree");
  warm_cmd->add_option("--trajectories", warm_flags.trajectories, "replicas whose full trajectories are written");
  warm_cmd->add_option("--uniform-limit", warm_flags.uniform_limit, "selection uniforms examined per vertex");
  warm_cmd->add_option("--event-cap", warm_flags.event_cap, "firing events per replica before giving up");

  auto* report_cmd = app.add_subcommand("report", "merge runs with identical parameters");
  report_cmd->add_option("inputs", report_inputs, "run directories or summary.json files");
  report_cmd->add_option("--out", report_out, "output directory");

  auto* replay_cmd = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  replay_cmd->add_option("manifest", replay_manifest, "run.json")->required();
  auto* replay_out_opt = replay_cmd->add_option("--out", replay_out, "output directory");
  auto* replay_threads_opt = replay_cmd->add_option("--threads", replay_threads, "worker threads");
  (void)replay_out_opt;

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (params->parsed()) return cmd_params(pf, args, out);
    if (simulate_cmd->parsed()) return cmd_urn_simulate(sf, uf, args, out);
    if (verify_cmd->parsed()) return cmd_urn_verify(vf, uf, args, out);
    if (warm_cmd->parsed()) return cmd_warm(wf, warm_flags, args, out);
    if (report_cmd->parsed()) return cmd_report(report_inputs, report_out, args, out, err);
    if (replay_cmd->parsed()) {
      return cmd_replay(replay_manifest, replay_out, replay_threads, replay_threads_opt->count() > 0, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "invalid: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace warmlab
