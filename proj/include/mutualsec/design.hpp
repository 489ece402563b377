#pragma once

// Environment, monitoring model and the optimal rating-system design for a
// fixed recommended strategy.
//
// A rating system recommends that the ASs of a subset P deploy outbound
// traffic control (OTC). Deploying senders filter traffic with quality p1
// towards high-rated receivers and p0 towards low-rated ones; ratings are
// refreshed every T time units from a monitoring signal that errs with
// probability eps(T). The design problem picks (T, p0, p1) to minimize the
// collection's security cost per unit time subject to every AS in P
// preferring compliance. For a binary rating set the optimum is closed form:
// p1 = p_low, p0 binds the incentive constraint of the critical AS, and T
// minimizes the efficiency loss factor g(T) = e^{beta T} eps / (1 - 2 eps)
// over the periods for which such a p0 does not exceed p_high.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mutualsec/network.hpp"

namespace mutualsec {

struct Environment {
  double p_high = 0.3;  // malware probability of unfiltered traffic
  double p_low = 0.05;  // best achievable filtering quality
  double c = 0.3;       // OTC deployment cost per unit time (recovery cost normalized to 1)
  double beta = 0.2;    // discount rate; one period of length T is discounted by e^{-beta T}

  // Throws InvalidArgument naming the offending field.
  void validate() const;
  double quality_gap() const noexcept { return p_high - p_low; }
};

// Monitoring error eps(T): probability that the signal about one AS in one
// period reports the opposite of what it did.
class MonitoringModel {
 public:
  enum class Kind { rational, tabulated };

  // eps(T) = w0 / (T + 2 w0), w0 > 0.
  static MonitoringModel rational(double w0);
  // Piecewise-linear curve through (T, eps) points with strictly increasing
  // T starting at T = 0. Beyond the last point the final segment is
  // continued and clamped at zero.
  static MonitoringModel tabulated(std::vector<std::pair<double, double>> points);
  // eps identically zero.
  static MonitoringModel perfect();

  Kind kind() const noexcept { return kind_; }
  double w0() const noexcept { return w0_; }
  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

  double error(double period) const;

  // Numerical check of: eps non-increasing, eps convex, eps -> 0, eps(0) <= 0.5.
  struct Validity {
    bool non_increasing = true;
    bool convex = true;
    bool vanishes = true;
    bool bounded_at_zero = true;
    std::string detail;
    bool ok() const noexcept { return non_increasing && convex && vanishes && bounded_at_zero; }
  };
  Validity check() const;

 private:
  Kind kind_ = Kind::rational;
  double w0_ = 0.1;
  std::vector<std::pair<double, double>> points_;
};

struct RatingDesign {
  double T = 1.0;
  double p0 = 0.3;  // quality towards low-rated receivers
  double p1 = 0.05; // quality towards high-rated receivers
  Subset subset;    // ASs recommended to deploy

  // Checks p_low <= p1 <= p0 <= p_high, T > 0 and the subset universe.
  void validate(const Environment& env, std::size_t n) const;
};

struct DesignResult {
  bool feasible = false;
  std::string diagnostic;  // why an infeasible result has no design
  Subset subset;
  double critical_traffic = 0.0;
  AsIndex binding_as = 0;
  double T_star = 0.0;
  double p0_star = 0.0;
  double p1_star = 0.0;
  double g_star = 0.0;
  double J_star = 0.0;
  double period_lo = 0.0;  // feasible period interval searched
  double period_hi = 0.0;

  RatingDesign design() const { return RatingDesign{T_star, p0_star, p1_star, subset}; }
};

// e^{beta T} eps(T) / (1 - 2 eps(T)). Throws when T <= 0 or eps(T) >= 0.5.
double efficiency_loss_factor(const Environment& env, const MonitoringModel& mon, double T);

struct PeriodInterval {
  bool empty = true;
  double lo = 0.0;      // 0 with lo_open = true means the interval starts at 0+
  bool lo_open = false;
  double hi = 0.0;
  bool contains(double T) const noexcept { return !empty && T <= hi && (lo_open ? T > lo : T >= lo); }
};

// Periods T > 0 with e^{beta T} / (1 - 2 eps(T)) <= (p_high - p_low) nu_crit / c,
// i.e. those for which some p0 <= p_high makes the critical AS comply.
PeriodInterval feasible_period_interval(const Environment& env, const MonitoringModel& mon, double nu_crit);

struct BetaRegion {
  double beta_max = 0.0;        // largest beta keeping the given (T, p0, p1) IC; 0 if none
  double beta_sup = 0.0;        // sup over T with the widest quality gap; +inf if unbounded
  bool unbounded_condition = false;  // eps(0) <= (1 - c / ((p_high - p_low) nu_crit)) / 2
};

BetaRegion ic_region_beta_max(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
                              double nu_crit);

// (1 - 2 eps) e^{-beta T} (p0 - p1) nu_i(P) / c - 1; nonnegative iff AS i complies.
// +inf for ASs outside P, which are never tempted.
double ic_margin(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
                 const TrafficMatrix& tm, AsIndex i);

// Relative slack granted to the binding constraint when checking compliance.
inline constexpr double kIcTolerance = 1e-9;

bool ic_check(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
              const TrafficMatrix& tm, AsIndex i);

// Members of the design's subset whose incentive constraint fails.
std::vector<AsIndex> ic_violations(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
                                   const TrafficMatrix& tm);

// Optimal (T, p0, p1) for the recommended subset p. Infeasible results carry
// a diagnostic ("zero_critical_traffic" or "empty_ic_region") instead of
// throwing. Throws InvalidArgument on an empty subset.
DesignResult optimal_design(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm,
                            const Subset& p);

// Cost per unit time of a compliant collection under `design`:
// [(1-eps) p1 + eps p0] sum_{P} mu + p_high sum_{not P} mu + |P| c.
// Throws NotIncentiveCompatible listing the violating ASs.
double security_cost(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
                     const TrafficMatrix& tm);

// Cost with every AS deploying and filtering at p_low: p_low sum mu + N c.
double first_best(const Environment& env, const TrafficMatrix& tm);

// Sufficient condition for full deployment being the optimal recommendation.
bool fds_sufficient(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm);

struct AssumptionCheck {
  bool pass = true;
  std::string detail;
  std::vector<AsIndex> violating;
};

struct AssumptionReport {
  AssumptionCheck monitoring;      // eps monotone, convex, vanishing, eps(0) <= 1/2
  AssumptionCheck deployment_pays; // c < (p_high - p_low) max(nu_i, mu_i) for all i
  AssumptionCheck social_benefit;  // g*_N <= min_i ((p_high-p_low) mu_i - c) nu(N) / (c mu_i)
  AssumptionCheck subset_region;   // eps(0) bound giving every beta an IC design for P
  bool all_pass() const noexcept { return monitoring.pass && deployment_pays.pass && social_benefit.pass; }
};

AssumptionReport validate_assumptions(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm,
                                      const Subset& p);

}  // namespace mutualsec
