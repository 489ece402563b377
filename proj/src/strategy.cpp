#include "mutualsec/strategy.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mutualsec/error.hpp"

namespace mutualsec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double outbound_outside(const TrafficAggregates& agg, const Subset& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < agg.outbound.size(); ++i)
    if (!p.contains(i)) s += agg.outbound[i];
  return s;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::vector<std::string> assumption_warnings(const Environment& env, const MonitoringModel& mon,
                                             const TrafficMatrix& tm) {
  std::vector<std::string> w;
  const auto rep = validate_assumptions(env, mon, tm, Subset::all(tm.size()));
  if (!rep.monitoring.pass) w.push_back("monitoring error model: " + rep.monitoring.detail);
  if (!rep.deployment_pays.pass) w.push_back("deployment cost: " + rep.deployment_pays.detail);
  if (!rep.social_benefit.pass)
    w.push_back("individual deployment not socially beneficial (" + rep.social_benefit.detail +
                "); the deletion path may miss the optimum");
  return w;
}

bool relatively_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// True if deployment a (cost ja) is preferred over b (cost jb).
bool prefer(double ja, const Subset& a, double jb, const Subset& b) {
  if (!relatively_equal(ja, jb)) return ja < jb;
  if (a.size() != b.size()) return a.size() > b.size();
  return a.members() < b.members();
}

double design_cost(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm, std::uint64_t mask,
                   const TrafficAggregates& agg) {
  const std::size_t n = tm.size();
  if (mask == 0) {
    double s = 0.0;
    for (double m : agg.outbound) s += m;
    return env.p_high * s;
  }
  const DesignResult r = optimal_design(env, mon, tm, Subset::from_mask(n, mask));
  return r.feasible ? r.J_star : kInf;
}

}  // namespace

StrategyResult iterative_deletion(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm) {
  env.validate();
  const std::size_t n = tm.size();
  const TrafficAggregates agg = aggregates(tm);

  StrategyResult out;
  out.warnings = assumption_warnings(env, mon, tm);
  IdTrace trace;

  Subset p = Subset::all(n);
  double best_evaluated_critical = -kInf;
  double best_J = kInf;
  while (!p.empty()) {
    const CriticalTraffic ct = critical_traffic(tm, p);
    IdIteration it;
    it.subset = p;
    it.critical_traffic = ct.value;
    it.critical = ct.critical;

    if (ct.value > best_evaluated_critical) {
      it.evaluated = true;
      it.design = optimal_design(env, mon, tm, p);
      ++out.evaluations;
      best_evaluated_critical = ct.value;
      if (it.design->feasible && it.design->J_star < best_J) {
        best_J = it.design->J_star;
        trace.chosen = trace.iterations.size();
      }
    } else {
      it.skip_reason = "critical traffic " + fmt(ct.value) + " does not exceed " + fmt(best_evaluated_critical) +
                       " of an evaluated superset; a nested subset without larger critical traffic costs more";
    }
    trace.iterations.push_back(std::move(it));
    p = p.without(ct.critical);
  }

  if (!trace.chosen) {
    std::string msg = "no evaluated subset admits an incentive-compatible design";
    if (!trace.iterations.empty() && trace.iterations.front().design)
      msg += " (full deployment: " + trace.iterations.front().design->diagnostic + ")";
    throw Infeasible(msg);
  }
  const IdIteration& best = trace.iterations[*trace.chosen];
  out.subset = best.subset;
  out.design = best.design;
  out.J = best.design->J_star;
  out.undeployed_outbound = outbound_outside(agg, best.subset);
  out.trace = std::move(trace);
  return out;
}

StrategyResult brute_force_optimal(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm,
                                   std::size_t cap, Exec exec) {
  env.validate();
  const std::size_t n = tm.size();
  if (n > cap || n >= 63)
    throw InvalidArgument("brute force limited to " + std::to_string(cap) + " ASs, got " + std::to_string(n));
  const TrafficAggregates agg = aggregates(tm);
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> costs(count);

  if (exec == Exec::parallel) {
    const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
    for (std::int64_t m = 0; m < total; ++m)
      costs[static_cast<std::size_t>(m)] = design_cost(env, mon, tm, static_cast<std::uint64_t>(m), agg);
  } else {
    for (std::uint64_t m = 0; m < count; ++m) costs[m] = design_cost(env, mon, tm, m, agg);
  }

  std::uint64_t best = 0;
  Subset best_set = Subset::none(n);
  for (std::uint64_t m = 1; m < count; ++m) {
    if (!std::isfinite(costs[m])) continue;
    Subset s = Subset::from_mask(n, m);
    if (prefer(costs[m], s, costs[best], best_set)) {
      best = m;
      best_set = std::move(s);
    }
  }

  StrategyResult out;
  out.subset = best_set;
  out.J = costs[best];
  out.evaluations = count - 1;
  out.undeployed_outbound = outbound_outside(agg, best_set);
  if (best != 0) out.design = optimal_design(env, mon, tm, best_set);
  return out;
}

std::optional<StrategyResult> mct_shortcut(const Environment& env, const MonitoringModel& mon,
                                           const TrafficMatrix& tm, std::size_t mct_limit) {
  const auto rep = validate_assumptions(env, mon, tm, Subset::all(tm.size()));
  if (!rep.social_benefit.pass) return std::nullopt;
  if (!has_mct(tm, mct_limit).holds) return std::nullopt;
  const Subset full = Subset::all(tm.size());
  StrategyResult out;
  out.subset = full;
  out.design = optimal_design(env, mon, tm, full);
  out.J = out.design->J_star;
  out.evaluations = 1;
  return out;
}

ThresholdResult core_periphery_threshold(const Environment& env, const MonitoringModel& mon, std::size_t l,
                                         double lambda0, std::size_t K_max, Exec exec) {
  env.validate();
  if (l < 1) throw InvalidArgument("l must be at least 1");
  if (K_max <= 2) throw InvalidArgument("K_max must exceed 2");
  if (l >= K_max) throw InvalidArgument("l must be smaller than K_max");
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw InvalidArgument("lambda0 must be positive");

  ThresholdResult res;
  res.l = l;
  res.lambda0 = lambda0;
  // Rows only exist for K > l (the topology needs l < K).
  const std::size_t K_first = std::max<std::size_t>(3, l + 1);
  if (K_first > K_max) throw InvalidArgument("no admissible K in range");
  res.rows.resize(K_max - K_first + 1);

  const double dl = static_cast<double>(l);
  const double margin = env.quality_gap() * dl * lambda0 - dl * env.c;

  auto fill = [&](std::size_t idx) {
    const std::size_t K = K_first + idx;
    const double dK = static_cast<double>(K);
    ThresholdRow& row = res.rows[idx];
    row.K = K;
    row.N = (1 + l) * K;
    const TrafficMatrix tm = core_periphery(K, l, lambda0);
    const DesignResult full = optimal_design(env, mon, tm, Subset::all(row.N));
    const DesignResult core = optimal_design(env, mon, tm, core_set(K, l));
    row.full_feasible = full.feasible;
    row.core_feasible = core.feasible;
    row.J_full = full.feasible ? full.J_star : kInf;
    row.J_core = core.feasible ? core.J_star : kInf;
    row.g_full = full.feasible ? full.g_star : kInf;
    row.g_core = core.feasible ? core.g_star : kInf;
    row.difference = row.J_full - row.J_core;
    row.closed_form = full.feasible ? dK * (row.g_full * env.c * (dK + 2.0 * dl - dl / (dK - 1.0) - 2.0) - margin)
                                    : std::numeric_limits<double>::quiet_NaN();
  };

  if (exec == Exec::parallel) {
    const auto total = static_cast<std::int64_t>(res.rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
    for (std::int64_t k = 0; k < total; ++k) fill(static_cast<std::size_t>(k));
  } else {
    for (std::size_t k = 0; k < res.rows.size(); ++k) fill(k);
  }

  for (const auto& row : res.rows)
    if (row.full_feasible && row.core_feasible)
      res.max_closed_form_gap = std::max(res.max_closed_form_gap, std::abs(row.closed_form - row.difference));

  if (!(margin > 0.0)) {
    res.regime = "core_always";
    return res;
  }
  for (const auto& row : res.rows) {
    if (row.J_full > row.J_core) {
      res.K_star = row.K;
      res.N_star = row.N;
      res.regime = "threshold";
      return res;
    }
  }
  res.regime = "not_within_range";
  return res;
}

}  // namespace mutualsec
