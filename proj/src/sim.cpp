#include "mutualsec/sim.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mutualsec/error.hpp"
#include "mutualsec/rng.hpp"

namespace mutualsec {

namespace {

struct Named {
  const char* name;
  int value;
};

constexpr Named kBehaviors[] = {
    {"compliant", static_cast<int>(Behavior::compliant)},
    {"persistent_deviator", static_cast<int>(Behavior::persistent_deviator)},
    {"one_shot_deviator", static_cast<int>(Behavior::one_shot_deviator)},
    {"tit_for_tat", static_cast<int>(Behavior::tit_for_tat)},
    {"grim_trigger", static_cast<int>(Behavior::grim_trigger)},
    {"never_deploy", static_cast<int>(Behavior::never_deploy)},
    {"always_deploy", static_cast<int>(Behavior::always_deploy)},
};

constexpr Named kBenchmarks[] = {
    {"no_otc", static_cast<int>(BenchmarkKind::no_otc)},
    {"rating_independent", static_cast<int>(BenchmarkKind::rating_independent)},
    {"worst_best", static_cast<int>(BenchmarkKind::worst_best)},
    {"fixed", static_cast<int>(BenchmarkKind::fixed)},
    {"optimal", static_cast<int>(BenchmarkKind::optimal)},
};

constexpr Named kSchemes[] = {
    {"tft", static_cast<int>(SchemeKind::tft)},
    {"trigger", static_cast<int>(SchemeKind::trigger)},
    {"rating", static_cast<int>(SchemeKind::rating)},
};

template <std::size_t N>
const char* name_of(const Named (&table)[N], int v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "unknown";
}

template <std::size_t N>
int value_of(const Named (&table)[N], const std::string& s, const char* what) {
  for (const auto& e : table)
    if (s == e.name) return e.value;
  std::string known;
  for (const auto& e : table) known += std::string(known.empty() ? "" : ", ") + e.name;
  throw InvalidArgument(std::string("unknown ") + what + " '" + s + "' (expected one of " + known + ")");
}

void mean_and_stderr(const std::vector<double>& xs, double& mean, double& se) {
  mean = 0.0;
  se = 0.0;
  if (xs.empty()) return;
  double sum = 0.0;
  for (double x : xs) sum += x;
  mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

template <class F>
void for_each_index(std::size_t count, Exec exec, F&& body) {
  if (exec == Exec::parallel && count > 1) {
    const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
    for (std::int64_t k = 0; k < total; ++k) body(static_cast<std::size_t>(k));
  } else {
    for (std::size_t k = 0; k < count; ++k) body(k);
  }
}

double no_otc_cost(const Environment& env, const TrafficMatrix& tm) { return env.p_high * tm.total(); }

RatingDesign flat_design(const Subset& subset, double T, double quality) {
  return RatingDesign{T, quality, quality, subset};
}

}  // namespace

std::string to_string(Behavior b) { return name_of(kBehaviors, static_cast<int>(b)); }
Behavior behavior_from_string(const std::string& s) {
  return static_cast<Behavior>(value_of(kBehaviors, s, "behavior"));
}
std::string to_string(BenchmarkKind k) { return name_of(kBenchmarks, static_cast<int>(k)); }
BenchmarkKind benchmark_from_string(const std::string& s) {
  return static_cast<BenchmarkKind>(value_of(kBenchmarks, s, "benchmark"));
}
std::string to_string(SchemeKind k) { return name_of(kSchemes, static_cast<int>(k)); }
SchemeKind scheme_from_string(const std::string& s) {
  return static_cast<SchemeKind>(value_of(kSchemes, s, "scheme"));
}

BehaviorProfile BehaviorProfile::uniform(std::size_t n, Behavior b) {
  BehaviorProfile p;
  p.kinds.assign(n, b);
  p.deviate_at.assign(n, 0);
  return p;
}

BehaviorProfile& BehaviorProfile::set(AsIndex i, Behavior b, std::size_t at) {
  if (i >= kinds.size()) throw InvalidArgument("behavior profile index out of range");
  kinds[i] = b;
  deviate_at[i] = at;
  return *this;
}

SimReport simulate(const RatingDesign& design, const BehaviorProfile& profile, const Environment& env,
                   const MonitoringModel& mon, const TrafficMatrix& tm, const SimOptions& opt) {
  env.validate();
  const std::size_t n = tm.size();
  if (opt.horizon < 1) throw InvalidArgument("horizon must be at least 1 period");
  if (profile.kinds.size() != n || profile.deviate_at.size() != n)
    throw InvalidArgument("behavior profile has " + std::to_string(profile.kinds.size()) + " entries for " +
                          std::to_string(n) + " ASs");
  design.validate(env, n);

  const double T = design.T;
  const double eps = mon.error(T);
  const double delta = std::exp(-env.beta * T);
  const bool any_tft = std::find(profile.kinds.begin(), profile.kinds.end(), Behavior::tit_for_tat) != profile.kinds.end();
  const double tft_weight = delta * (1.0 - 2.0 * eps) * env.quality_gap();

  SimState st;
  st.ratings.assign(n, 1);
  st.grudges.assign(any_tft ? n * n : 0, 0);
  st.rng.seed(opt.seed);
  std::vector<char> next_grudges(st.grudges.size(), 0);

  SimReport rep;
  rep.horizon = opt.horizon;
  rep.T = T;
  rep.seed = opt.seed;
  rep.avg_cost_per_as.assign(n, 0.0);
  rep.discounted_utility.assign(n, 0.0);
  rep.rating_high_fraction.assign(n, 0.0);
  if (opt.record_series) rep.time_series.reserve(opt.horizon);

  std::vector<char> act(n), filtered(n * n);
  std::vector<double> unf(n), hi(n), lo(n);
  std::vector<std::size_t> high_periods(n, 0);
  std::size_t punished = 0;
  double weight = 1.0;

  for (std::size_t t = 0; t < opt.horizon; ++t) {
    st.period = t;
    const bool fired = st.trigger_fired;
    if (fired) ++punished;
    std::size_t high_now = 0;
    for (std::size_t i = 0; i < n; ++i) {
      high_now += static_cast<std::size_t>(st.ratings[i]);
      high_periods[i] += static_cast<std::size_t>(st.ratings[i]);
    }

    for (std::size_t i = 0; i < n; ++i) {
      const bool rec = design.subset.contains(i);
      bool a = rec;
      switch (profile.kinds[i]) {
        case Behavior::compliant: break;
        case Behavior::persistent_deviator: a = !rec; break;
        case Behavior::one_shot_deviator: a = (t == profile.deviate_at[i]) ? !rec : rec; break;
        case Behavior::grim_trigger: a = fired ? false : rec; break;
        case Behavior::never_deploy: a = false; break;
        case Behavior::always_deploy: a = true; break;
        case Behavior::tit_for_tat: {
          double avertable = 0.0;
          for (std::size_t j = 0; j < n; ++j)
            if (j != i && !st.grudges[j * n + i]) avertable += tm(j, i);
          a = tft_weight * avertable >= env.c;
          break;
        }
      }
      act[i] = a;
    }

    // Expected recovery cost grouped by the quality applied to each unit of traffic.
    double U = 0.0, H = 0.0, L = 0.0;
    std::size_t deployed = 0;
    std::fill(unf.begin(), unf.end(), 0.0);
    std::fill(hi.begin(), hi.end(), 0.0);
    std::fill(lo.begin(), lo.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      deployed += static_cast<std::size_t>(act[i]);
      const bool tft = profile.kinds[i] == Behavior::tit_for_tat;
      for (std::size_t j = 0; j < n; ++j) {
        const double rate = tm(i, j);
        const bool f = act[i] && !(tft && st.grudges[i * n + j]);
        filtered[i * n + j] = f;
        if (rate == 0.0) continue;
        if (!f) {
          U += rate;
          unf[j] += rate;
        } else if (st.ratings[j]) {
          H += rate;
          hi[j] += rate;
        } else {
          L += rate;
          lo[j] += rate;
        }
      }
    }
    const double total_rate =
        env.p_high * U + design.p1 * H + design.p0 * L + env.c * static_cast<double>(deployed);
    const double k = static_cast<double>(t + 1);
    rep.avg_cost += (total_rate - rep.avg_cost) / k;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = env.p_high * unf[j] + design.p1 * hi[j] + design.p0 * lo[j] + (act[j] ? env.c : 0.0);
      rep.avg_cost_per_as[j] += (r - rep.avg_cost_per_as[j]) / k;
      rep.discounted_utility[j] -= weight * r * T;
    }
    weight *= delta;

    if (opt.record_series)
      rep.time_series.push_back(SeriesRow{t, total_rate * T, fired,
                                          static_cast<double>(high_now) / static_cast<double>(n)});

    // Public compliance signals become next period's ratings.
    for (std::size_t i = 0; i < n; ++i) {
      const bool complied = static_cast<bool>(act[i]) == design.subset.contains(i);
      const bool flip = uniform01(st.rng) < eps;
      const int s = (complied != flip) ? 1 : 0;
      st.ratings[i] = s;
      if (s == 0) st.trigger_fired = true;
    }

    if (any_tft) {
      std::fill(next_grudges.begin(), next_grudges.end(), 0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j || tm(i, j) == 0.0 || profile.kinds[j] != Behavior::tit_for_tat) continue;
          const bool unfiltered = !filtered[i * n + j];
          const bool flip = uniform01(st.rng) < eps;
          next_grudges[j * n + i] = unfiltered != flip;
        }
      st.grudges.swap(next_grudges);
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    rep.rating_high_fraction[i] = static_cast<double>(high_periods[i]) / static_cast<double>(opt.horizon);
  rep.punishment_fraction = static_cast<double>(punished) / static_cast<double>(opt.horizon);
  return rep;
}

MonteCarloSummary simulate_many(const RatingDesign& design, const BehaviorProfile& profile, const Environment& env,
                                const MonitoringModel& mon, const TrafficMatrix& tm, std::size_t horizon,
                                std::size_t seeds, std::uint64_t base_seed, Exec exec) {
  if (seeds < 1) throw InvalidArgument("seeds must be at least 1");
  MonteCarloSummary out;
  out.runs.resize(seeds);
  // Validate once up front so worker threads never throw.
  design.validate(env, tm.size());
  env.validate();
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1 period");
  if (profile.size() != tm.size()) throw InvalidArgument("behavior profile size does not match the AS collection");

  for_each_index(seeds, exec, [&](std::size_t k) {
    out.runs[k] = simulate(design, profile, env, mon, tm, SimOptions{horizon, derive_seed(base_seed, k), false});
  });

  const std::size_t n = tm.size();
  std::vector<double> costs, punish;
  out.mean_discounted_utility.assign(n, 0.0);
  out.mean_rating_high_fraction.assign(n, 0.0);
  for (const auto& r : out.runs) {
    costs.push_back(r.avg_cost);
    punish.push_back(r.punishment_fraction);
    for (std::size_t i = 0; i < n; ++i) {
      out.mean_discounted_utility[i] += r.discounted_utility[i];
      out.mean_rating_high_fraction[i] += r.rating_high_fraction[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.mean_discounted_utility[i] /= static_cast<double>(seeds);
    out.mean_rating_high_fraction[i] /= static_cast<double>(seeds);
  }
  double unused = 0.0;
  mean_and_stderr(costs, out.mean_avg_cost, out.stderr_avg_cost);
  mean_and_stderr(punish, out.mean_punishment_fraction, unused);
  return out;
}

DeviationGain deviation_gain(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
                             const TrafficMatrix& tm, AsIndex i, std::size_t horizon, std::size_t seeds,
                             std::uint64_t base_seed, Exec exec) {
  const std::size_t n = tm.size();
  if (i >= n) throw InvalidArgument("AS index out of range");
  if (seeds < 1) throw InvalidArgument("seeds must be at least 1");
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1 period");
  env.validate();
  design.validate(env, n);

  const BehaviorProfile honest = BehaviorProfile::uniform(n, Behavior::compliant);
  BehaviorProfile deviant = honest;
  deviant.set(i, Behavior::persistent_deviator);

  std::vector<double> comp(seeds), dev(seeds);
  for_each_index(seeds, exec, [&](std::size_t k) {
    const SimOptions opt{horizon, derive_seed(base_seed, k), false};
    comp[k] = simulate(design, honest, env, mon, tm, opt).discounted_utility[i];
    dev[k] = simulate(design, deviant, env, mon, tm, opt).discounted_utility[i];
  });

  DeviationGain g;
  g.per_seed_gain.resize(seeds);
  for (std::size_t k = 0; k < seeds; ++k) g.per_seed_gain[k] = dev[k] - comp[k];
  double unused = 0.0;
  mean_and_stderr(comp, g.compliant_utility, unused);
  mean_and_stderr(dev, g.deviant_utility, unused);
  mean_and_stderr(g.per_seed_gain, g.gain, g.gain_stderr);
  return g;
}

bool binding_design_at(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm,
                       const Subset& p, double T, RatingDesign& out) {
  env.validate();
  if (!(T > 0.0)) throw InvalidArgument("rating period T must be positive");
  if (p.empty()) return false;
  const double nu = critical_traffic(tm, p).value;
  const double eps = mon.error(T);
  if (!(nu > 0.0) || eps >= 0.5) return false;
  const double p0 = std::exp(env.beta * T) * env.c / ((1.0 - 2.0 * eps) * nu) + env.p_low;
  if (p0 > env.p_high) return false;
  out = RatingDesign{T, p0, env.p_low, p};
  return true;
}

BenchmarkResult run_benchmark(BenchmarkKind kind, const Environment& env, const MonitoringModel& mon,
                              const TrafficMatrix& tm, const Subset& subset, std::size_t horizon,
                              std::uint64_t seed, const RatingDesign* fixed) {
  env.validate();
  const std::size_t n = tm.size();
  if (subset.universe() != n) throw InvalidArgument("benchmark subset does not match the AS collection");
  BenchmarkResult res;
  res.kind = kind;

  switch (kind) {
    case BenchmarkKind::no_otc:
      res.design = flat_design(Subset::none(n), 1.0, env.p_high);
      break;
    case BenchmarkKind::rating_independent:
      // Equal qualities for both ratings: deploying earns nothing, so nobody does.
      res.design = flat_design(subset, 1.0, env.p_low);
      break;
    case BenchmarkKind::worst_best: {
      if (subset.empty()) {
        res.design = flat_design(subset, 1.0, env.p_high);
        break;
      }
      const DesignResult opt = optimal_design(env, mon, tm, subset);
      if (opt.feasible) {
        res.design = RatingDesign{opt.T_star, env.p_high, env.p_low, subset};
        res.compliant_play = ic_violations(res.design, env, mon, tm).empty();
      } else {
        res.design = RatingDesign{1.0, env.p_high, env.p_low, subset};
      }
      break;
    }
    case BenchmarkKind::fixed:
      if (fixed == nullptr) throw InvalidArgument("fixed benchmark needs a design");
      res.design = *fixed;
      res.design.validate(env, n);
      res.compliant_play = ic_violations(res.design, env, mon, tm).empty();
      break;
    case BenchmarkKind::optimal: {
      if (subset.empty()) {
        res.design = flat_design(subset, 1.0, env.p_high);
        break;
      }
      const DesignResult opt = optimal_design(env, mon, tm, subset);
      if (opt.feasible) {
        res.design = opt.design();
        res.compliant_play = true;
      } else {
        res.design = RatingDesign{1.0, env.p_high, env.p_low, subset};
      }
      break;
    }
  }

  const BehaviorProfile profile =
      BehaviorProfile::uniform(n, res.compliant_play ? Behavior::compliant : Behavior::never_deploy);
  res.analytic_cost = res.compliant_play ? security_cost(res.design, env, mon, tm) : no_otc_cost(env, tm);
  res.report = simulate(res.design, profile, env, mon, tm, SimOptions{horizon, seed, false});
  return res;
}

std::vector<ComparisonRow> run_strategy_comparison(SchemeKind kind, const Environment& env,
                                                   const MonitoringModel& mon, const TrafficMatrix& tm, double T,
                                                   std::size_t horizon, std::size_t seeds,
                                                   const std::vector<double>& beta_grid, std::uint64_t base_seed,
                                                   Exec exec) {
  if (!(T > 0.0)) throw InvalidArgument("rating period T must be positive");
  const std::size_t n = tm.size();
  const Subset full = Subset::all(n);
  std::vector<ComparisonRow> rows;
  rows.reserve(beta_grid.size());
  for (std::size_t b = 0; b < beta_grid.size(); ++b) {
    Environment e = env;
    e.beta = beta_grid[b];
    e.validate();
    ComparisonRow row;
    row.beta = e.beta;

    RatingDesign design = flat_design(full, T, e.p_low);
    BehaviorProfile profile = BehaviorProfile::uniform(n, Behavior::compliant);
    switch (kind) {
      case SchemeKind::tft: profile = BehaviorProfile::uniform(n, Behavior::tit_for_tat); break;
      case SchemeKind::trigger: profile = BehaviorProfile::uniform(n, Behavior::grim_trigger); break;
      case SchemeKind::rating:
        row.rating_feasible = binding_design_at(e, mon, tm, full, T, design);
        if (!row.rating_feasible) profile = BehaviorProfile::uniform(n, Behavior::never_deploy);
        break;
    }
    const MonteCarloSummary mc =
        simulate_many(design, profile, e, mon, tm, horizon, seeds, derive_seed(base_seed, b), exec);
    row.mean_avg_cost = mc.mean_avg_cost;
    row.stderr_avg_cost = mc.stderr_avg_cost;
    row.mean_punishment_fraction = mc.mean_punishment_fraction;
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::pair<AsIndex, AsIndex>> one_way_pairs(const TrafficMatrix& tm) {
  std::vector<std::pair<AsIndex, AsIndex>> out;
  for (std::size_t i = 0; i < tm.size(); ++i)
    for (std::size_t j = 0; j < tm.size(); ++j)
      if (i != j && tm(i, j) > 0.0 && tm(j, i) == 0.0) out.emplace_back(i, j);
  return out;
}

}  // namespace mutualsec
