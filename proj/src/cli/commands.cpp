#include "cli/commands.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mutualsec/design.hpp"
#include "mutualsec/error.hpp"
#include "mutualsec/exec.hpp"
#include "mutualsec/rng.hpp"
#include "mutualsec/serialize.hpp"
#include "mutualsec/sim.hpp"
#include "mutualsec/strategy.hpp"

namespace mutualsec::cli {

namespace ser = mutualsec::json;

namespace {

json env_json(const Environment& e) {
  return json{{"p_bar", e.p_high}, {"p_low", e.p_low}, {"c", e.c}, {"beta", e.beta}};
}

json mon_json(const MonitoringModel& m) {
  if (m.kind() == MonitoringModel::Kind::rational) return json{{"model", "rational"}, {"w0", m.w0()}};
  json pts = json::array();
  for (const auto& [t, e] : m.points()) pts.push_back(json::array({t, e}));
  return json{{"model", "tabulated"}, {"points", pts}};
}

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string label_string(const std::vector<AsIndex>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + std::to_string(v[k] + 1);
  return s;
}

Behavior parse_behavior(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "must be a behavior name");
  try {
    return behavior_from_string(v.get<std::string>());
  } catch (const InvalidArgument& e) {
    throw ConfigError(field, e.what());
  }
}

// Design used by simulate: "optimal" (default) or an explicit {T, p0, p1}.
std::optional<RatingDesign> simulation_design(const RunConfig& cfg, const json& sec, const Subset& subset,
                                              std::string& diagnostic) {
  const json d = sec.value("design", json("optimal"));
  if (d.is_string()) {
    if (d.get<std::string>() != "optimal") throw ConfigError("simulate.design", "expected \"optimal\" or {T, p0, p1}");
    const DesignResult r = optimal_design(cfg.env, cfg.mon, cfg.traffic(), subset);
    if (!r.feasible) {
      diagnostic = r.diagnostic;
      return std::nullopt;
    }
    return r.design();
  }
  if (!d.is_object()) throw ConfigError("simulate.design", "expected \"optimal\" or {T, p0, p1}");
  RatingDesign rd{get_double(d, "T", "simulate.design"), get_double(d, "p0", "simulate.design"),
                  get_double(d, "p1", "simulate.design"), subset};
  try {
    rd.validate(cfg.env, cfg.traffic().size());
  } catch (const InvalidArgument& e) {
    throw ConfigError("simulate.design", e.what());
  }
  return rd;
}

BehaviorProfile parse_profile(const json& sec, std::size_t n) {
  BehaviorProfile prof = BehaviorProfile::uniform(n, Behavior::compliant);
  if (sec.contains("behavior")) {
    const json& b = sec.at("behavior");
    if (b.is_array()) {
      if (b.size() != n) throw ConfigError("simulate.behavior", "needs one entry per AS");
      for (std::size_t i = 0; i < n; ++i) prof.set(i, parse_behavior(b[i], "simulate.behavior"));
    } else {
      prof = BehaviorProfile::uniform(n, parse_behavior(b, "simulate.behavior"));
    }
  }
  if (sec.contains("deviators")) {
    for (const auto& d : sec.at("deviators")) {
      const std::size_t as = get_count(d, "as", "simulate.deviators");
      if (as < 1 || as > n) throw ConfigError("simulate.deviators.as", "label out of range");
      const Behavior kind = parse_behavior(d.value("behavior", json("persistent_deviator")), "simulate.deviators.behavior");
      prof.set(as - 1, kind, get_count(d, "at", "simulate.deviators", 0));
    }
  }
  return prof;
}

CommandOutput simulate_profile(const RunConfig& cfg, const json& sec) {
  const TrafficMatrix& tm = cfg.traffic();
  const Subset subset = cfg.subset();
  CommandOutput out;
  std::string diag;
  auto design = simulation_design(cfg, sec, subset, diag);
  if (!design) {
    out.code = kInfeasible;
    out.doc = json{{"command", "simulate"}, {"feasible", false}, {"diagnostic", diag}};
    return out;
  }
  const BehaviorProfile prof = parse_profile(sec, tm.size());
  const std::size_t horizon = get_count(sec, "horizon", "simulate", 1000);
  const std::size_t seeds = get_count(sec, "seeds", "simulate", 1);
  const bool series = sec.value("series", false);
  if (horizon < 1) throw ConfigError("simulate.horizon", "must be at least 1");
  if (seeds < 1) throw ConfigError("simulate.seeds", "must be at least 1");

  json runs = json::array();
  std::vector<SimReport> reports;
  if (seeds == 1) {
    reports.push_back(simulate(*design, prof, cfg.env, cfg.mon, tm, SimOptions{horizon, cfg.seed, series}));
  } else {
    reports = simulate_many(*design, prof, cfg.env, cfg.mon, tm, horizon, seeds, cfg.seed).runs;
  }
  std::vector<double> costs;
  for (const auto& r : reports) {
    runs.push_back(ser::to_json(r));
    costs.push_back(r.avg_cost);
  }
  double mean = 0.0;
  for (double c : costs) mean += c;
  mean /= static_cast<double>(costs.size());

  RatingDesign d = *design;
  double analytic = std::numeric_limits<double>::quiet_NaN();
  if (ic_violations(d, cfg.env, cfg.mon, tm).empty()) analytic = security_cost(d, cfg.env, cfg.mon, tm);
  out.doc = json{{"command", "simulate"},
                 {"mode", "profile"},
                 {"design", {{"T", d.T}, {"p0", d.p0}, {"p1", d.p1}, {"subset", ser::subset_to_json(d.subset)}}},
                 {"mean_avg_cost", mean},
                 {"analytic_cost_if_compliant", nullable(analytic)},
                 {"runs", runs}};

  if (sec.contains("series_out") && !reports.front().time_series.empty()) {
    std::ofstream f(sec.at("series_out").get<std::string>());
    if (!f) throw ConfigError("simulate.series_out", "cannot write file");
    io::write_time_series_csv(f, reports.front().time_series);
  }
  out.csv = [reports](io::CsvWriter& w) {
    if (reports.size() == 1 && !reports.front().time_series.empty()) {
      w.header({"period", "total_cost", "trigger_fired", "mean_rating"});
      for (const auto& r : reports.front().time_series) {
        w.field(r.period).field(r.total_cost).field(r.trigger_fired).field(r.mean_rating);
        w.end_row();
      }
      return;
    }
    w.header({"run", "seed", "avg_cost", "punishment_fraction"});
    for (std::size_t k = 0; k < reports.size(); ++k) {
      w.field(k).field(std::to_string(reports[k].seed)).field(reports[k].avg_cost).field(reports[k].punishment_fraction);
      w.end_row();
    }
  };
  return out;
}

CommandOutput simulate_benchmarks(const RunConfig& cfg, const json& sec) {
  const TrafficMatrix& tm = cfg.traffic();
  const Subset subset = cfg.subset();
  const std::size_t horizon = get_count(sec, "horizon", "simulate", 10000);
  std::vector<BenchmarkKind> kinds{BenchmarkKind::no_otc, BenchmarkKind::rating_independent,
                                   BenchmarkKind::worst_best, BenchmarkKind::optimal};
  if (sec.contains("benchmarks")) {
    kinds.clear();
    for (const auto& k : sec.at("benchmarks")) {
      try {
        kinds.push_back(benchmark_from_string(k.get<std::string>()));
      } catch (const InvalidArgument& e) {
        throw ConfigError("simulate.benchmarks", e.what());
      }
    }
  }
  std::optional<RatingDesign> fixed;
  if (sec.contains("fixed")) {
    const json& f = sec.at("fixed");
    fixed = RatingDesign{get_double(f, "T", "simulate.fixed"), get_double(f, "p0", "simulate.fixed"),
                         get_double(f, "p1", "simulate.fixed"), subset};
  }
  std::vector<double> w0s;
  if (sec.contains("w0_grid")) w0s = get_doubles(sec, "w0_grid", "simulate");

  struct Row {
    double w0;
    BenchmarkResult r;
  };
  std::vector<Row> rows;
  auto run_all = [&](const MonitoringModel& mon, double w0) {
    for (BenchmarkKind k : kinds) {
      if (k == BenchmarkKind::fixed && !fixed) throw ConfigError("simulate.fixed", "fixed benchmark needs {T, p0, p1}");
      rows.push_back(Row{w0, run_benchmark(k, cfg.env, mon, tm, subset, horizon, cfg.seed, fixed ? &*fixed : nullptr)});
    }
  };
  if (w0s.empty()) {
    run_all(cfg.mon, cfg.mon.kind() == MonitoringModel::Kind::rational ? cfg.mon.w0() : 0.0);
  } else {
    for (double w0 : w0s) {
      if (!(w0 > 0.0)) throw ConfigError("simulate.w0_grid", "entries must be positive");
      run_all(MonitoringModel::rational(w0), w0);
    }
  }

  CommandOutput out;
  json arr = json::array();
  for (const auto& row : rows)
    arr.push_back(json{{"w0", row.w0},
                       {"benchmark", to_string(row.r.kind)},
                       {"compliant_play", row.r.compliant_play},
                       {"T", row.r.design.T},
                       {"p0", row.r.design.p0},
                       {"p1", row.r.design.p1},
                       {"analytic_cost", row.r.analytic_cost},
                       {"sim_avg_cost", row.r.report.avg_cost}});
  out.doc = json{{"command", "simulate"}, {"mode", "benchmark"}, {"horizon", horizon}, {"rows", arr}};
  out.csv = [rows](io::CsvWriter& w) {
    w.header({"w0", "benchmark", "compliant_play", "T", "p0", "p1", "analytic_cost", "sim_avg_cost"});
    for (const auto& row : rows) {
      w.field(row.w0).field(to_string(row.r.kind)).field(row.r.compliant_play).field(row.r.design.T);
      w.field(row.r.design.p0).field(row.r.design.p1).field(row.r.analytic_cost).field(row.r.report.avg_cost);
      w.end_row();
    }
  };
  return out;
}

CommandOutput simulate_comparison(const RunConfig& cfg, const json& sec) {
  const TrafficMatrix& tm = cfg.traffic();
  const double T = get_double(sec, "T", "simulate", 1.0);
  const std::size_t horizon = get_count(sec, "horizon", "simulate", 2000);
  const std::size_t seeds = get_count(sec, "seeds", "simulate", 10);
  const std::vector<double> betas = get_doubles(sec, "beta_grid", "simulate");
  for (double b : betas)
    if (!(b > 0.0)) throw ConfigError("simulate.beta_grid", "entries must be positive");
  if (!(T > 0.0)) throw ConfigError("simulate.T", "must be positive");
  std::vector<SchemeKind> kinds{SchemeKind::tft, SchemeKind::trigger, SchemeKind::rating};
  if (sec.contains("schemes")) {
    kinds.clear();
    for (const auto& k : sec.at("schemes")) {
      try {
        kinds.push_back(scheme_from_string(k.get<std::string>()));
      } catch (const InvalidArgument& e) {
        throw ConfigError("simulate.schemes", e.what());
      }
    }
  }
  CommandOutput out;
  if (std::find(kinds.begin(), kinds.end(), SchemeKind::tft) != kinds.end() && !one_way_pairs(tm).empty())
    out.warnings.push_back("some AS pairs exchange traffic in one direction only; tit-for-tat cannot retaliate there");

  struct Row {
    SchemeKind kind;
    ComparisonRow r;
  };
  std::vector<Row> rows;
  for (std::size_t k = 0; k < kinds.size(); ++k)
    for (const auto& r : run_strategy_comparison(kinds[k], cfg.env, cfg.mon, tm, T, horizon, seeds, betas,
                                                 derive_seed(cfg.seed, k)))
      rows.push_back(Row{kinds[k], r});

  json arr = json::array();
  for (const auto& row : rows)
    arr.push_back(json{{"scheme", to_string(row.kind)},
                       {"beta", row.r.beta},
                       {"mean_avg_cost", row.r.mean_avg_cost},
                       {"stderr_avg_cost", row.r.stderr_avg_cost},
                       {"punishment_fraction", row.r.mean_punishment_fraction},
                       {"rating_feasible", row.r.rating_feasible}});
  out.doc = json{{"command", "simulate"}, {"mode", "comparison"}, {"T", T}, {"horizon", horizon},
                 {"seeds", seeds}, {"rows", arr}};
  out.csv = [rows](io::CsvWriter& w) {
    w.header({"scheme", "beta", "mean_avg_cost", "stderr_avg_cost", "punishment_fraction", "rating_feasible"});
    for (const auto& row : rows) {
      w.field(to_string(row.kind)).field(row.r.beta).field(row.r.mean_avg_cost).field(row.r.stderr_avg_cost);
      w.field(row.r.mean_punishment_fraction).field(row.r.rating_feasible);
      w.end_row();
    }
  };
  return out;
}

CommandOutput simulate_deviation(const RunConfig& cfg, const json& sec) {
  const TrafficMatrix& tm = cfg.traffic();
  const Subset subset = cfg.subset();
  CommandOutput out;
  std::string diag;
  auto design = simulation_design(cfg, sec, subset, diag);
  if (!design) {
    out.code = kInfeasible;
    out.doc = json{{"command", "simulate"}, {"feasible", false}, {"diagnostic", diag}};
    return out;
  }
  const std::size_t horizon = get_count(sec, "horizon", "simulate", 60);
  const std::size_t seeds = get_count(sec, "seeds", "simulate", 2000);
  std::vector<AsIndex> targets = subset.members();
  if (sec.contains("as")) {
    const std::size_t a = get_count(sec, "as", "simulate");
    if (a < 1 || a > tm.size()) throw ConfigError("simulate.as", "label out of range");
    targets = {a - 1};
  }
  struct Row {
    AsIndex as;
    DeviationGain g;
  };
  std::vector<Row> rows;
  for (AsIndex i : targets)
    rows.push_back(Row{i, deviation_gain(*design, cfg.env, cfg.mon, tm, i, horizon, seeds, cfg.seed)});
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back(json{{"as", r.as + 1},
                       {"compliant_utility", r.g.compliant_utility},
                       {"deviant_utility", r.g.deviant_utility},
                       {"gain", r.g.gain},
                       {"gain_stderr", r.g.gain_stderr}});
  out.doc = json{{"command", "simulate"},
                 {"mode", "deviation"},
                 {"design", {{"T", design->T}, {"p0", design->p0}, {"p1", design->p1}}},
                 {"horizon", horizon},
                 {"seeds", seeds},
                 {"rows", arr}};
  out.csv = [rows](io::CsvWriter& w) {
    w.header({"as", "compliant_utility", "deviant_utility", "gain", "gain_stderr"});
    for (const auto& r : rows) {
      w.field(r.as + 1).field(r.g.compliant_utility).field(r.g.deviant_utility).field(r.g.gain).field(r.g.gain_stderr);
      w.end_row();
    }
  };
  return out;
}

struct SweepPoint {
  std::size_t index = 0;
  std::optional<double> w0, beta;
  std::optional<std::size_t> d, n;
  DesignResult design;
  double first_best = 0.0;
};

}  // namespace

CommandOutput cmd_design(const RunConfig& cfg) {
  const TrafficMatrix& tm = cfg.traffic();
  const Subset p = cfg.subset();
  if (p.empty()) throw ConfigError("subset", "must not be empty");
  const DesignResult d = optimal_design(cfg.env, cfg.mon, tm, p);
  const double jfb = first_best(cfg.env, tm);
  const AssumptionReport rep = validate_assumptions(cfg.env, cfg.mon, tm, p);

  CommandOutput out;
  out.code = d.feasible ? kOk : kInfeasible;
  out.doc = json{{"command", "design"},
                 {"environment", env_json(cfg.env)},
                 {"monitoring", mon_json(cfg.mon)},
                 {"design", ser::to_json(d)},
                 {"J_first_best", jfb},
                 {"fds_sufficient", fds_sufficient(cfg.env, cfg.mon, tm)},
                 {"assumptions", ser::to_json(rep)}};
  if (d.feasible) {
    const BetaRegion br = ic_region_beta_max(d.design(), cfg.env, cfg.mon, d.critical_traffic);
    out.doc["ic_region"] = json{{"beta_max", nullable(br.beta_max)},
                                {"beta_sup", nullable(br.beta_sup)},
                                {"beta_unbounded", std::isinf(br.beta_sup)},
                                {"zero_period_condition", br.unbounded_condition}};
  }
  if (!rep.all_pass())
    out.warnings.push_back("model assumptions not all satisfied; see the assumptions section of the output");
  out.csv = [d, jfb](io::CsvWriter& w) {
    w.header({"feasible", "critical_traffic", "binding_as", "T_star", "p0_star", "p1_star", "g_star", "J_star",
              "J_first_best", "diagnostic"});
    w.field(d.feasible).field(d.critical_traffic).field(d.binding_as + 1).field(d.T_star).field(d.p0_star);
    w.field(d.p1_star).field(d.g_star).field(d.J_star).field(jfb).field(d.diagnostic);
    w.end_row();
  };
  return out;
}

CommandOutput cmd_mct(const RunConfig& cfg) {
  const json sec = cfg.section("mct");
  const std::size_t limit = get_count(sec, "limit", "mct", kDefaultMctLimit);
  MctReport r;
  try {
    r = has_mct(cfg.traffic(), limit);
  } catch (const InvalidArgument& e) {
    throw ConfigError("mct.limit", e.what());
  }
  CommandOutput out;
  out.doc = json{{"command", "mct"}, {"report", ser::to_json(r)}};
  out.csv = [r](io::CsvWriter& w) {
    w.header({"holds", "full_critical", "witness", "witness_critical", "subsets_checked"});
    w.field(r.holds).field(r.full_critical).field(r.witness ? r.witness->label() : std::string());
    w.field(r.witness ? r.witness_critical : 0.0).field(std::to_string(r.subsets_checked));
    w.end_row();
  };
  return out;
}

CommandOutput cmd_id(const RunConfig& cfg) {
  CommandOutput out;
  StrategyResult r;
  try {
    r = iterative_deletion(cfg.env, cfg.mon, cfg.traffic());
  } catch (const Infeasible& e) {
    out.code = kInfeasible;
    out.doc = json{{"command", "id"}, {"feasible", false}, {"diagnostic", e.what()}};
    return out;
  }
  out.warnings = r.warnings;
  out.doc = json{{"command", "id"},
                 {"environment", env_json(cfg.env)},
                 {"monitoring", mon_json(cfg.mon)},
                 {"J_first_best", first_best(cfg.env, cfg.traffic())},
                 {"result", ser::to_json(r)}};
  const IdTrace trace = *r.trace;
  out.csv = [trace](io::CsvWriter& w) {
    w.header({"iteration", "subset", "critical_traffic", "deleted", "evaluated", "feasible", "J_star", "p0_star",
              "T_star", "chosen", "skip_reason"});
    for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
      const auto& it = trace.iterations[k];
      const bool feas = it.design && it.design->feasible;
      w.field(k + 1).field(it.subset.label()).field(it.critical_traffic).field(label_string(it.critical));
      w.field(it.evaluated).field(feas);
      if (feas) {
        w.field(it.design->J_star).field(it.design->p0_star).field(it.design->T_star);
      } else {
        w.field("").field("").field("");
      }
      w.field(trace.chosen && *trace.chosen == k).field(it.skip_reason);
      w.end_row();
    }
  };
  return out;
}

CommandOutput cmd_bruteforce(const RunConfig& cfg) {
  const json sec = cfg.section("bruteforce");
  const std::size_t cap = get_count(sec, "cap", "bruteforce", kDefaultBruteForceCap);
  StrategyResult r;
  try {
    r = brute_force_optimal(cfg.env, cfg.mon, cfg.traffic(), cap);
  } catch (const InvalidArgument& e) {
    throw ConfigError("bruteforce.cap", e.what());
  }
  CommandOutput out;
  out.doc = json{{"command", "bruteforce"},
                 {"environment", env_json(cfg.env)},
                 {"monitoring", mon_json(cfg.mon)},
                 {"result", ser::to_json(r)}};
  out.csv = [r](io::CsvWriter& w) {
    w.header({"subset", "J", "undeployed_outbound", "evaluations"});
    w.field(r.subset.label()).field(r.J).field(r.undeployed_outbound).field(std::to_string(r.evaluations));
    w.end_row();
  };
  return out;
}

CommandOutput cmd_threshold(const RunConfig& cfg) {
  const json sec = cfg.section("threshold");
  const std::size_t l = get_count(sec, "l", "threshold", 1);
  const double lambda0 = get_double(sec, "lambda0", "threshold", 1.0);
  const std::size_t K_max = get_count(sec, "K_max", "threshold", 30);
  if (l < 1) throw ConfigError("threshold.l", "must be at least 1");
  if (K_max <= 2 || K_max <= l) throw ConfigError("threshold.K_max", "must exceed both 2 and l");
  if (!(lambda0 > 0.0)) throw ConfigError("threshold.lambda0", "must be positive");
  const ThresholdResult r = core_periphery_threshold(cfg.env, cfg.mon, l, lambda0, K_max);
  CommandOutput out;
  out.doc = json{{"command", "threshold"},
                 {"environment", env_json(cfg.env)},
                 {"monitoring", mon_json(cfg.mon)},
                 {"result", ser::to_json(r)}};
  out.csv = [r](io::CsvWriter& w) {
    w.header({"K", "N", "J_full", "J_core", "difference", "closed_form", "g_full", "g_core", "full_wins"});
    for (const auto& row : r.rows) {
      w.field(row.K).field(row.N).field(row.J_full).field(row.J_core).field(row.difference);
      w.field(row.closed_form).field(row.g_full).field(row.g_core).field(row.J_full <= row.J_core);
      w.end_row();
    }
  };
  return out;
}

CommandOutput cmd_simulate(const RunConfig& cfg) {
  const json sec = cfg.section("simulate");
  const std::string mode = sec.value("mode", std::string("profile"));
  if (mode == "profile") return simulate_profile(cfg, sec);
  if (mode == "benchmark") return simulate_benchmarks(cfg, sec);
  if (mode == "comparison") return simulate_comparison(cfg, sec);
  if (mode == "deviation") return simulate_deviation(cfg, sec);
  throw ConfigError("simulate.mode", "unknown mode '" + mode + "' (profile, benchmark, comparison, deviation)");
}

CommandOutput cmd_sweep(const RunConfig& cfg) {
  const json sec = cfg.section("sweep");
  if (!sec.contains("axes") || !sec.at("axes").is_object()) throw ConfigError("sweep.axes", "missing");
  const json& axes = sec.at("axes");
  for (auto it = axes.begin(); it != axes.end(); ++it)
    if (it.key() != "w0" && it.key() != "d" && it.key() != "n" && it.key() != "beta")
      throw ConfigError("sweep.axes." + it.key(), "unknown axis (w0, d, n, beta)");

  auto doubles = [&](const char* k) {
    return axes.contains(k) ? get_doubles(axes, k, "sweep.axes") : std::vector<double>{};
  };
  auto counts = [&](const char* k) {
    std::vector<std::size_t> v;
    if (!axes.contains(k)) return v;
    for (double x : get_doubles(axes, k, "sweep.axes")) {
      if (x < 0 || x != std::floor(x)) throw ConfigError(std::string("sweep.axes.") + k, "entries must be integers");
      v.push_back(static_cast<std::size_t>(x));
    }
    return v;
  };
  const auto w0s = doubles("w0");
  const auto betas = doubles("beta");
  const auto ds = counts("d");
  const auto ns = counts("n");

  // Cartesian product, w0 outermost and beta innermost.
  std::vector<SweepPoint> points;
  const std::size_t nw = std::max<std::size_t>(1, w0s.size()), nd = std::max<std::size_t>(1, ds.size()),
                    nn = std::max<std::size_t>(1, ns.size()), nb = std::max<std::size_t>(1, betas.size());
  for (std::size_t a = 0; a < nw; ++a)
    for (std::size_t b = 0; b < nd; ++b)
      for (std::size_t c = 0; c < nn; ++c)
        for (std::size_t e = 0; e < nb; ++e) {
          SweepPoint p;
          p.index = points.size();
          if (!w0s.empty()) p.w0 = w0s[a];
          if (!ds.empty()) p.d = ds[b];
          if (!ns.empty()) p.n = ns[c];
          if (!betas.empty()) p.beta = betas[e];
          points.push_back(p);
        }

  std::vector<std::exception_ptr> errors(points.size());
  auto eval = [&](std::size_t k) {
    try {
      SweepPoint& p = points[k];
      json doc = cfg.doc;
      if (p.w0) {
        doc["monitoring"]["model"] = "rational";
        doc["monitoring"]["w0"] = *p.w0;
      }
      if (p.beta) doc["environment"]["beta"] = *p.beta;
      if (p.d) doc["topology"]["d"] = *p.d;
      if (p.n) doc["topology"]["n"] = *p.n;
      if (p.n) doc.erase("subset");
      RunConfig local = build_config(std::move(doc), cfg.base_dir);
      p.design = optimal_design(local.env, local.mon, local.traffic(), local.subset());
      p.first_best = first_best(local.env, local.traffic());
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const auto total = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
  for (std::int64_t k = 0; k < total; ++k) eval(static_cast<std::size_t>(k));
  for (const auto& e : errors)
    if (e) {
      try {
        std::rethrow_exception(e);
      } catch (const nlohmann::json::exception& je) {
        throw ConfigError("sweep", je.what());
      }
    }

  CommandOutput out;
  json arr = json::array();
  for (const auto& p : points) {
    json row{{"index", p.index},
             {"w0", p.w0 ? json(*p.w0) : json(nullptr)},
             {"d", p.d ? json(*p.d) : json(nullptr)},
             {"n", p.n ? json(*p.n) : json(nullptr)},
             {"beta", p.beta ? json(*p.beta) : json(nullptr)},
             {"design", ser::to_json(p.design)},
             {"J_first_best", p.first_best}};
    row["normalized_cost"] = p.design.feasible ? json(p.design.J_star / p.first_best) : json(nullptr);
    arr.push_back(std::move(row));
  }
  out.doc = json{{"command", "sweep"}, {"rows", arr}};
  out.csv = [points](io::CsvWriter& w) {
    w.header({"index", "w0", "d", "n", "beta", "feasible", "critical_traffic", "T_star", "p0_star", "p1_star",
              "g_star", "J_star", "J_first_best", "normalized_cost"});
    for (const auto& p : points) {
      w.field(p.index);
      if (p.w0) w.field(*p.w0); else w.field("");
      if (p.d) w.field(*p.d); else w.field("");
      if (p.n) w.field(*p.n); else w.field("");
      if (p.beta) w.field(*p.beta); else w.field("");
      const auto& d = p.design;
      w.field(d.feasible).field(d.critical_traffic);
      if (d.feasible) {
        w.field(d.T_star).field(d.p0_star).field(d.p1_star).field(d.g_star).field(d.J_star);
      } else {
        for (int k = 0; k < 5; ++k) w.field("");
      }
      w.field(p.first_best);
      if (d.feasible) w.field(d.J_star / p.first_best); else w.field("");
      w.end_row();
    }
  };
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Incentive-compatible rating systems for OTC deployment in AS collections", "mutualsec"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::optional<std::string> out_path;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::vector<std::string> sets;
  int threads = 0;
  app.add_option("--config", config_path, "JSON run manifest");
  app.add_option("--out", out_path, "Write the result here instead of stdout");
  app.add_option("--seed", seed, "Base seed for Monte Carlo runs");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--set", sets, "Override a manifest field, e.g. --set environment.beta=0.4");
  app.add_option("--threads", threads, "Thread cap for parallel kernels (default: MUTUALSEC_THREADS)");

  using Fn = CommandOutput (*)(const RunConfig&);
  const std::vector<std::tuple<const char*, const char*, Fn>> commands{
      {"design", "Optimal rating system for the configured subset", &cmd_design},
      {"mct", "Check the maximal-critical-traffic property", &cmd_mct},
      {"id", "Iterative deletion search with the full trace", &cmd_id},
      {"bruteforce", "Exhaustive search over all deployments", &cmd_bruteforce},
      {"threshold", "Core-periphery size threshold for full deployment", &cmd_threshold},
      {"simulate", "Monte Carlo simulation of the repeated game", &cmd_simulate},
      {"sweep", "Optimal designs over grids of w0, d, n and beta", &cmd_sweep},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

  try {
    std::vector<std::string> args;
    for (int k = argc - 1; k > 0; --k) args.emplace_back(argv[k]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kConfigError;
  }
  if (threads > 0) set_thread_count(threads);

  try {
    RunConfig cfg = load_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt, sets);
    if (seed) cfg.seed = *seed;
    CommandOutput result;
    for (const auto& [name, help, fn] : commands)
      if (app.got_subcommand(name)) result = fn(cfg);

    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    std::ofstream file;
    std::ostream* dest = &out;
    if (out_path) {
      file.open(*out_path);
      if (!file) throw ConfigError("--out", "cannot write " + *out_path);
      dest = &file;
    }
    if (format == "csv" && result.csv) {
      io::CsvWriter w(*dest);
      result.csv(w);
    } else {
      *dest << result.doc.dump(2) << '\n';
    }
    if (result.code == kInfeasible) {
      std::string why = result.doc.value("diagnostic", std::string());
      if (why.empty() && result.doc.contains("design")) why = result.doc["design"].value("diagnostic", std::string());
      err << "infeasible: " << why << '\n';
    }
    return result.code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace mutualsec::cli
