#pragma once

// Repeated-game simulator. Each period every AS acts according to its
// behavior, senders pick filtering qualities from the receivers' ratings, the
// collection pays the expected recovery cost of the traffic plus deployment
// costs, and the monitor draws one noisy compliance signal per AS that becomes
// its rating for the next period. Only the signals (and, for tit-for-tat,
// pairwise observations) are random.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mutualsec/design.hpp"
#include "mutualsec/exec.hpp"
#include "mutualsec/network.hpp"

namespace mutualsec {

enum class Behavior {
  compliant,            // deploy iff recommended
  persistent_deviator,  // always do the opposite of the recommendation
  one_shot_deviator,    // deviate in a single period, comply otherwise
  tit_for_tat,          // pairwise retaliation, see below
  grim_trigger,         // comply until any public signal reports a deviation, then never deploy
  never_deploy,
  always_deploy,
};

std::string to_string(Behavior b);
Behavior behavior_from_string(const std::string& s);

struct BehaviorProfile {
  std::vector<Behavior> kinds;
  std::vector<std::size_t> deviate_at;  // period of the one-shot deviation, per AS

  static BehaviorProfile uniform(std::size_t n, Behavior b);
  BehaviorProfile& set(AsIndex i, Behavior b, std::size_t at = 0);
  std::size_t size() const noexcept { return kinds.size(); }
};

struct SimState {
  std::vector<int> ratings;  // 1 high, 0 low; everyone starts high
  std::size_t period = 0;
  // grudges[j * n + i] != 0: j retaliates against i during this period.
  std::vector<char> grudges;
  bool trigger_fired = false;  // absorbing
  std::mt19937_64 rng;
};

struct SeriesRow {
  std::size_t period = 0;
  double total_cost = 0.0;  // cost incurred during the period
  bool trigger_fired = false;
  double mean_rating = 0.0;  // at the start of the period

  friend bool operator==(const SeriesRow&, const SeriesRow&) = default;
};

struct SimReport {
  std::size_t horizon = 0;
  double T = 0.0;
  std::uint64_t seed = 0;
  double avg_cost = 0.0;                    // collection cost per unit time
  std::vector<double> avg_cost_per_as;      // per unit time
  std::vector<double> discounted_utility;   // minus discounted cost, per AS
  std::vector<double> rating_high_fraction; // per AS
  double punishment_fraction = 0.0;         // periods spent after the trigger fired
  std::vector<SeriesRow> time_series;       // filled when requested

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

struct SimOptions {
  std::size_t horizon = 1000;
  std::uint64_t seed = 1;
  bool record_series = false;
};

// Tit-for-tat: AS j sends unfiltered traffic to i for one period whenever its
// last observation of i's traffic read "unfiltered"; observations err with
// probability eps(T). A tit-for-tat AS i deploys iff the retaliation it can
// still avert outweighs the deployment cost:
//   e^{-beta T} (1 - 2 eps) (p_high - p_low) sum_{j not holding a grudge against i} lambda_ji >= c.
// Throws InvalidArgument on horizon 0 or a profile/design size mismatch.
SimReport simulate(const RatingDesign& design, const BehaviorProfile& profile, const Environment& env,
                   const MonitoringModel& mon, const TrafficMatrix& tm, const SimOptions& opt);

struct MonteCarloSummary {
  std::vector<SimReport> runs;  // in seed-index order
  double mean_avg_cost = 0.0;
  double stderr_avg_cost = 0.0;
  double mean_punishment_fraction = 0.0;
  std::vector<double> mean_discounted_utility;
  std::vector<double> mean_rating_high_fraction;
};

// Runs `seeds` replications with seeds derive_seed(base_seed, k).
MonteCarloSummary simulate_many(const RatingDesign& design, const BehaviorProfile& profile, const Environment& env,
                                const MonitoringModel& mon, const TrafficMatrix& tm, std::size_t horizon,
                                std::size_t seeds, std::uint64_t base_seed, Exec exec = Exec::parallel);

struct DeviationGain {
  double compliant_utility = 0.0;  // mean over seeds
  double deviant_utility = 0.0;
  double gain = 0.0;               // deviant - compliant
  double gain_stderr = 0.0;
  std::vector<double> per_seed_gain;
};

// AS i plays persistent deviation against an otherwise compliant collection;
// both runs of a pair share the seed.
DeviationGain deviation_gain(const RatingDesign& design, const Environment& env, const MonitoringModel& mon,
                             const TrafficMatrix& tm, AsIndex i, std::size_t horizon, std::size_t seeds,
                             std::uint64_t base_seed, Exec exec = Exec::parallel);

enum class BenchmarkKind { no_otc, rating_independent, worst_best, fixed, optimal };

std::string to_string(BenchmarkKind k);
BenchmarkKind benchmark_from_string(const std::string& s);

struct BenchmarkResult {
  BenchmarkKind kind = BenchmarkKind::no_otc;
  RatingDesign design;
  bool compliant_play = false;  // false: everyone plays never-deploy
  double analytic_cost = 0.0;   // expected cost per unit time of the play above
  SimReport report;
};

// no_otc: nobody deploys. rating_independent: p0 = p1, so nobody has a reason
// to deploy. worst_best: p1 = p_low, p0 = p_high with T minimizing g among IC
// periods. fixed: the given design. optimal: the optimal design for `subset`.
// Designs that are not IC fall back to never-deploy play.
BenchmarkResult run_benchmark(BenchmarkKind kind, const Environment& env, const MonitoringModel& mon,
                              const TrafficMatrix& tm, const Subset& subset, std::size_t horizon,
                              std::uint64_t seed, const RatingDesign* fixed = nullptr);

enum class SchemeKind { tft, trigger, rating };

std::string to_string(SchemeKind k);
SchemeKind scheme_from_string(const std::string& s);

struct ComparisonRow {
  double beta = 0.0;
  double mean_avg_cost = 0.0;
  double stderr_avg_cost = 0.0;
  double mean_punishment_fraction = 0.0;
  bool rating_feasible = true;  // rating scheme only: false means never-deploy play
};

// Evaluates a scheme at fixed period T over a grid of discount rates. tft and
// trigger recommend full deployment with p0 = p1 = p_low; rating uses the
// optimal binding p0 at period T for the full collection.
std::vector<ComparisonRow> run_strategy_comparison(SchemeKind kind, const Environment& env,
                                                   const MonitoringModel& mon, const TrafficMatrix& tm, double T,
                                                   std::size_t horizon, std::size_t seeds,
                                                   const std::vector<double>& beta_grid, std::uint64_t base_seed,
                                                   Exec exec = Exec::parallel);

// Rating design with p1 = p_low and p0 binding the critical AS at period T.
// Returns false when that p0 would exceed p_high.
bool binding_design_at(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm,
                       const Subset& p, double T, RatingDesign& out);

// Pairs (i, j), i != j, with traffic in only one direction.
std::vector<std::pair<AsIndex, AsIndex>> one_way_pairs(const TrafficMatrix& tm);

}  // namespace mutualsec
