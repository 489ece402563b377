#pragma once

// Search over recommended strategies: which subset of ASs should be asked to
// deploy OTC so that the optimal rating system for that subset has the
// lowest security cost.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mutualsec/design.hpp"
#include "mutualsec/exec.hpp"
#include "mutualsec/network.hpp"

namespace mutualsec {

struct IdIteration {
  Subset subset;
  double critical_traffic = 0.0;
  std::vector<AsIndex> critical;  // deleted before the next iteration
  bool evaluated = false;
  std::optional<DesignResult> design;  // set when evaluated
  std::string skip_reason;             // set when skipped
};

struct IdTrace {
  std::vector<IdIteration> iterations;
  std::optional<std::size_t> chosen;  // index into iterations
};

struct StrategyResult {
  Subset subset;                       // empty for the no-deployment outcome
  std::optional<DesignResult> design;  // absent for the no-deployment outcome
  double J = 0.0;
  double undeployed_outbound = 0.0;    // total outbound traffic of ASs outside the subset
  std::optional<IdTrace> trace;        // iterative deletion only
  std::uint64_t evaluations = 0;       // designs computed
  std::vector<std::string> warnings;
};

// Starts from the full collection and repeatedly removes every AS attaining
// the critical traffic. A subset is evaluated only when its critical traffic
// exceeds that of every subset evaluated earlier on the path; the others are
// nested in an evaluated subset without a larger critical traffic and cannot
// be cheaper. Throws Infeasible when no evaluated subset admits a design.
StrategyResult iterative_deletion(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm);

inline constexpr std::size_t kDefaultBruteForceCap = 16;

// Exhaustive search over all 2^N deployments, the empty one included (cost
// p_high * sum mu). Ties go to the larger subset, then the lexicographically
// smaller one. Throws InvalidArgument when N exceeds `cap`.
StrategyResult brute_force_optimal(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm,
                                   std::size_t cap = kDefaultBruteForceCap, Exec exec = Exec::parallel);

// Full deployment when the collection has the MCT property and individual
// deployment is socially beneficial; no answer otherwise.
std::optional<StrategyResult> mct_shortcut(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm,
                                           std::size_t mct_limit = kDefaultMctLimit);

struct ThresholdRow {
  std::size_t K = 0;
  std::size_t N = 0;
  bool full_feasible = false;
  bool core_feasible = false;
  double J_full = 0.0;       // +inf when infeasible
  double J_core = 0.0;
  double g_full = 0.0;
  double g_core = 0.0;
  double difference = 0.0;   // J_full - J_core
  double closed_form = 0.0;  // K [g c (K + 2l - l/(K-1) - 2) - ((p_high-p_low) l lambda0 - l c)] with g = g_full
};

struct ThresholdResult {
  std::size_t K_star = 0;
  std::size_t N_star = 0;
  // "threshold": K_star found; "core_always": full deployment has no IC
  // design, so K_star = 0; "not_within_range": full deployment wins for every K.
  std::string regime;
  std::size_t l = 0;
  double lambda0 = 0.0;
  std::vector<ThresholdRow> rows;  // K = 3..K_max
  double max_closed_form_gap = 0.0;
};

// Compares full deployment with core-only deployment on restricted
// core-periphery collections for K = 3..K_max.
ThresholdResult core_periphery_threshold(const Environment& env, const MonitoringModel& mon, std::size_t l,
                                         double lambda0, std::size_t K_max, Exec exec = Exec::parallel);

}  // namespace mutualsec
