#include "mutualsec/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mutualsec/error.hpp"
#include "mutualsec/optimize.hpp"

namespace mutualsec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite_in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

// e^{beta T} / (1 - 2 eps(T)): the smallest (p0 - p1) nu_crit / c that keeps
// the critical AS compliant at period T.
double required_ratio(const Environment& env, const MonitoringModel& mon, double T) {
  const double eps = mon.error(T);
  if (eps >= 0.5) return kInf;
  return std::exp(env.beta * T) / (1.0 - 2.0 * eps);
}

double loss_factor_or_inf(const Environment& env, const MonitoringModel& mon, double T) {
  const double eps = mon.error(T);
  if (eps >= 0.5) return kInf;
  return std::exp(env.beta * T) * eps / (1.0 - 2.0 * eps);
}

std::string as_list(const std::vector<AsIndex>& v) {
  std::ostringstream os;
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << "AS " << v[k] + 1;
  return os.str();
}

}  // namespace

void Environment::validate() const {
  if (!finite_in_unit(p_high)) throw InvalidArgument("p_bar (p_high) must lie in [0, 1]");
  if (!finite_in_unit(p_low)) throw InvalidArgument("p_low must lie in [0, 1]");
  if (p_low > p_high) throw InvalidArgument("p_low must not exceed p_bar (p_high)");
  if (!std::isfinite(c) || c <= 0.0) throw InvalidArgument("c must be positive");
  if (!std::isfinite(beta) || beta <= 0.0) throw InvalidArgument("beta must be positive");
}

// ---------------------------------------------------------------------------

MonitoringModel MonitoringModel::rational(double w0) {
  if (!std::isfinite(w0) || w0 <= 0.0) throw InvalidArgument("w0 must be positive");
  MonitoringModel m;
  m.kind_ = Kind::rational;
  m.w0_ = w0;
  return m;
}

MonitoringModel MonitoringModel::tabulated(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw InvalidArgument("monitoring curve needs at least one point");
  if (points.front().first != 0.0) throw InvalidArgument("monitoring curve must start at T = 0");
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!finite_in_unit(points[k].second)) throw InvalidArgument("monitoring error values must lie in [0, 1]");
    if (!std::isfinite(points[k].first)) throw InvalidArgument("monitoring curve periods must be finite");
    if (k > 0 && !(points[k].first > points[k - 1].first))
      throw InvalidArgument("monitoring curve periods must be strictly increasing");
  }
  MonitoringModel m;
  m.kind_ = Kind::tabulated;
  m.w0_ = 0.0;
  m.points_ = std::move(points);
  return m;
}

MonitoringModel MonitoringModel::perfect() { return tabulated({{0.0, 0.0}}); }

double MonitoringModel::error(double T) const {
  if (kind_ == Kind::rational) return w0_ / (std::max(T, 0.0) + 2.0 * w0_);
  const auto& pts = points_;
  if (pts.size() == 1 || T <= pts.front().first) return pts.front().second;
  if (T >= pts.back().first) {
    const auto& a = pts[pts.size() - 2];
    const auto& b = pts.back();
    const double slope = (b.second - a.second) / (b.first - a.first);
    return std::max(0.0, b.second + slope * (T - b.first));
  }
  auto it = std::upper_bound(pts.begin(), pts.end(), T,
                             [](double t, const std::pair<double, double>& p) { return t < p.first; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (T - a.first) / (b.first - a.first);
  return a.second + w * (b.second - a.second);
}

MonitoringModel::Validity MonitoringModel::check() const {
  constexpr double tol = 1e-12;
  Validity v;
  std::ostringstream detail;

  // Sample points: the table knots (exact for a piecewise-linear curve) or a
  // log grid spanning the scale of w0.
  std::vector<double> ts{0.0};
  if (kind_ == Kind::tabulated) {
    for (const auto& p : points_)
      if (p.first > 0.0) ts.push_back(p.first);
    const double last = points_.back().first;
    ts.push_back(last + std::max(1.0, last));
  } else {
    for (double t : optimize::log_grid(w0_ * 1e-4, w0_ * 1e6, 512)) ts.push_back(t);
  }

  const double e0 = error(0.0);
  if (e0 > 0.5 + tol) {
    v.bounded_at_zero = false;
    detail << "eps(0) = " << e0 << " exceeds 0.5; ";
  }
  double prev_slope = -kInf;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double ea = error(ts[k]), eb = error(ts[k + 1]);
    if (eb > ea + tol) {
      v.non_increasing = false;
      detail << "eps increases between T = " << ts[k] << " and " << ts[k + 1] << "; ";
    }
    const double slope = (eb - ea) / (ts[k + 1] - ts[k]);
    if (slope < prev_slope - tol * std::max(1.0, std::abs(prev_slope))) {
      v.convex = false;
      detail << "eps is not convex near T = " << ts[k] << "; ";
    }
    prev_slope = slope;
  }
  if (kind_ == Kind::tabulated) {
    const bool zero_tail = points_.back().second == 0.0;
    bool falling_tail = false;
    if (points_.size() >= 2) {
      const auto& a = points_[points_.size() - 2];
      const auto& b = points_.back();
      falling_tail = b.second < a.second;
    }
    if (!zero_tail && !falling_tail) {
      v.vanishes = false;
      detail << "eps does not decay to 0; ";
    }
  }
  v.detail = detail.str();
  return v;
}

void RatingDesign::validate(const Environment& env, std::size_t n) const {
  if (!std::isfinite(T) || T <= 0.0) throw InvalidArgument("rating period T must be positive");
  if (!(env.p_low <= p1 && p1 <= p0 && p0 <= env.p_high))
    throw InvalidArgument("filtering qualities must satisfy p_low <= p1 <= p0 <= p_bar");
  if (subset.universe() != n) throw InvalidArgument("design subset does not match the AS collection");
}

// ---------------------------------------------------------------------------

double efficiency_loss_factor(const Environment& env, const MonitoringModel& mon, double T) {
  if (!(T > 0.0)) throw InvalidArgument("rating period T must be positive");
  const double eps = mon.error(T);
  if (eps >= 0.5) throw InvalidArgument("efficiency loss factor undefined for eps(T) >= 0.5");
  return std::exp(env.beta * T) * eps / (1.0 - 2.0 * eps);
}

PeriodInterval feasible_period_interval(const Environment& env, const MonitoringModel& mon, double nu_crit) {
  env.validate();
  PeriodInterval out;
  const double ratio = env.quality_gap() * nu_crit / env.c;
  if (!(ratio > 1.0) || !std::isfinite(ratio)) return out;

  // required_ratio(T) >= e^{beta T}, so nothing beyond t_cap can be feasible.
  const double t_cap = std::log(ratio) / env.beta;
  auto h = [&](double T) { return required_ratio(env, mon, T); };
  auto ok = [&](double T) { return h(T) <= ratio; };

  const auto best = optimize::bracketed_minimum(h, t_cap * 1e-9, t_cap, 1024, 1e-12);
  if (!(best.fx <= ratio)) return out;

  out.empty = false;
  out.hi = ok(t_cap) ? t_cap : optimize::bisect_boundary(ok, best.x, t_cap);

  const double eps0 = mon.error(0.0);
  const double h0 = eps0 < 0.5 ? 1.0 / (1.0 - 2.0 * eps0) : kInf;
  if (h0 <= ratio) {
    out.lo = 0.0;
    out.lo_open = true;
  } else {
    out.lo = optimize::bisect_boundary(ok, best.x, 0.0);
  }
  return out;
}

BetaRegion ic_region_beta_max(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
                              double nu_crit) {
  env.validate();
  if (!(design.p0 > design.p1)) throw InvalidArgument("IC region needs p0 > p1");
  if (!(nu_crit > 0.0)) throw InvalidArgument("IC region needs positive critical traffic");
  if (!(design.T > 0.0)) throw InvalidArgument("rating period T must be positive");

  BetaRegion r;
  const double arg = (1.0 - 2.0 * mon.error(design.T)) * (design.p0 - design.p1) * nu_crit / env.c;
  r.beta_max = arg > 1.0 ? std::log(arg) / design.T : 0.0;

  const double widest = env.quality_gap() * nu_crit / env.c;
  r.unbounded_condition = mon.error(0.0) <= 0.5 * (1.0 - env.c / (env.quality_gap() * nu_crit));
  if ((1.0 - 2.0 * mon.error(0.0)) * widest > 1.0) {
    r.beta_sup = kInf;
    return r;
  }
  auto neg_bound = [&](double T) {
    const double a = (1.0 - 2.0 * mon.error(T)) * widest;
    if (a <= 0.0) return kInf;
    return -std::log(a) / T;
  };
  const auto best = optimize::bracketed_minimum(neg_bound, 1e-9, 1e9, 4096, 1e-10);
  r.beta_sup = std::max(0.0, -best.fx);
  return r;
}

double ic_margin(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
                 const TrafficMatrix& tm, AsIndex i) {
  if (i >= tm.size()) throw InvalidArgument("AS index out of range");
  if (!design.subset.contains(i)) return kInf;
  const double eps = mon.error(design.T);
  const double nu = inbound_within(tm, design.subset, i);
  return (1.0 - 2.0 * eps) * std::exp(-env.beta * design.T) * (design.p0 - design.p1) * nu / env.c - 1.0;
}

bool ic_check(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
              const TrafficMatrix& tm, AsIndex i) {
  return ic_margin(design, env, mon, tm, i) >= -kIcTolerance;
}

std::vector<AsIndex> ic_violations(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
                                   const TrafficMatrix& tm) {
  std::vector<AsIndex> bad;
  for (AsIndex i : design.subset.members())
    if (!ic_check(design, env, mon, tm, i)) bad.push_back(i);
  return bad;
}

DesignResult optimal_design(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm,
                            const Subset& p) {
  env.validate();
  if (p.empty()) throw InvalidArgument("optimal design needs a nonempty recommended subset");
  const CriticalTraffic ct = critical_traffic(tm, p);

  DesignResult res;
  res.subset = p;
  res.critical_traffic = ct.value;
  res.binding_as = ct.critical.front();

  if (!(ct.value > 0.0)) {
    res.diagnostic = "zero_critical_traffic: AS " + std::to_string(res.binding_as + 1) +
                     " receives no traffic from the recommended subset";
    return res;
  }
  const PeriodInterval interval = feasible_period_interval(env, mon, ct.value);
  if (interval.empty) {
    res.diagnostic = "empty_ic_region: no period admits p0 <= p_bar keeping AS " +
                     std::to_string(res.binding_as + 1) + " compliant";
    return res;
  }
  res.period_lo = interval.lo;
  res.period_hi = interval.hi;

  const double lo = interval.lo_open ? interval.hi * 1e-9 : interval.lo;
  auto g = [&](double T) { return loss_factor_or_inf(env, mon, T); };
  const auto best = optimize::bracketed_minimum(g, lo, interval.hi, 1024, 1e-9);

  const double T = best.x;
  const double eps = mon.error(T);
  res.feasible = true;
  res.T_star = T;
  res.g_star = best.fx;
  res.p1_star = env.p_low;
  res.p0_star = std::min(env.p_high, std::exp(env.beta * T) * env.c / ((1.0 - 2.0 * eps) * ct.value) + env.p_low);

  const TrafficAggregates agg = aggregates(tm);
  double inside = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < tm.size(); ++i) (p.contains(i) ? inside : outside) += agg.outbound[i];
  res.J_star = (env.p_low + res.g_star * env.c / ct.value) * inside + env.p_high * outside +
               static_cast<double>(p.size()) * env.c;
  return res;
}

double security_cost(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
                     const TrafficMatrix& tm) {
  env.validate();
  design.validate(env, tm.size());
  const auto bad = ic_violations(design, env, mon, tm);
  if (!bad.empty()) throw NotIncentiveCompatible("design is not incentive compatible for " + as_list(bad));

  const double eps = mon.error(design.T);
  const TrafficAggregates agg = aggregates(tm);
  double inside = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < tm.size(); ++i) (design.subset.contains(i) ? inside : outside) += agg.outbound[i];
  return ((1.0 - eps) * design.p1 + eps * design.p0) * inside + env.p_high * outside +
         static_cast<double>(design.subset.size()) * env.c;
}

double first_best(const Environment& env, const TrafficMatrix& tm) {
  return env.p_low * tm.total() + static_cast<double>(tm.size()) * env.c;
}

bool fds_sufficient(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm) {
  const DesignResult full = optimal_design(env, mon, tm, Subset::all(tm.size()));
  if (!full.feasible) return false;
  const TrafficAggregates agg = aggregates(tm);
  double total = 0.0;
  for (double m : agg.outbound) total += m;
  const double min_out = *std::min_element(agg.outbound.begin(), agg.outbound.end());
  if (!(total > 0.0)) return false;
  const double bound = (env.quality_gap() * min_out - env.c) / total * full.critical_traffic / env.c;
  return full.g_star <= bound;
}

AssumptionReport validate_assumptions(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm,
                                      const Subset& p) {
  env.validate();
  AssumptionReport rep;
  const std::size_t n = tm.size();
  const TrafficAggregates agg = aggregates(tm);

  const auto validity = mon.check();
  rep.monitoring.pass = validity.ok();
  rep.monitoring.detail = validity.ok() ? "monitoring error is non-increasing, convex, vanishing, eps(0) <= 0.5"
                                        : validity.detail;

  for (std::size_t i = 0; i < n; ++i)
    if (!(env.c < env.quality_gap() * std::max(agg.inbound[i], agg.outbound[i])))
      rep.deployment_pays.violating.push_back(i);
  rep.deployment_pays.pass = rep.deployment_pays.violating.empty();
  rep.deployment_pays.detail = rep.deployment_pays.pass
                                   ? "deployment cost below the largest attainable benefit for every AS"
                                   : "deployment never pays for " + as_list(rep.deployment_pays.violating);

  const DesignResult full = optimal_design(env, mon, tm, Subset::all(n));
  if (!full.feasible) {
    rep.social_benefit.pass = false;
    rep.social_benefit.detail = "full deployment admits no IC design (" + full.diagnostic + ")";
  } else {
    double tightest = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = agg.outbound[i];
      const double bound =
          mu > 0.0 ? (env.quality_gap() * mu - env.c) * full.critical_traffic / (env.c * mu) : -kInf;
      tightest = std::min(tightest, bound);
      if (full.g_star > bound) rep.social_benefit.violating.push_back(i);
    }
    rep.social_benefit.pass = rep.social_benefit.violating.empty();
    std::ostringstream os;
    os << "g*_N = " << full.g_star << (rep.social_benefit.pass ? " <= " : " > ") << "bound " << tightest;
    rep.social_benefit.detail = os.str();
  }

  if (!p.empty()) {
    const auto ct = critical_traffic(tm, p);
    const double bound = ct.value > 0.0 ? 0.5 * (1.0 - env.c / (env.quality_gap() * ct.value)) : -kInf;
    rep.subset_region.pass = mon.error(0.0) <= bound;
    std::ostringstream os;
    os << "eps(0) = " << mon.error(0.0) << (rep.subset_region.pass ? " <= " : " > ") << bound
       << " for subset " << p.label();
    rep.subset_region.detail = os.str();
  } else {
    rep.subset_region.detail = "empty subset";
  }
  return rep;
}

}  // namespace mutualsec
