#include "mutualsec/serialize.hpp"

#include <cmath>
#include <limits>

namespace mutualsec::json {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double get_num(const json& j, const char* key, double if_null = kInf) {
  const json& v = j.at(key);
  return v.is_null() ? if_null : v.get<double>();
}

json labels(const std::vector<AsIndex>& v) {
  json a = json::array();
  for (AsIndex i : v) a.push_back(i + 1);
  return a;
}

std::vector<AsIndex> from_labels(const json& a) {
  std::vector<AsIndex> v;
  for (const auto& x : a) v.push_back(x.get<AsIndex>() - 1);
  return v;
}

json checks(const AssumptionCheck& c) {
  return json{{"pass", c.pass}, {"detail", c.detail}, {"violating", labels(c.violating)}};
}

}  // namespace

json subset_to_json(const Subset& s) { return labels(s.members()); }

Subset subset_from_json(const json& j, std::size_t universe) { return Subset(universe, from_labels(j)); }

json to_json(const DesignResult& d) {
  json j{{"feasible", d.feasible},
         {"subset", subset_to_json(d.subset)},
         {"critical_traffic", num(d.critical_traffic)},
         {"binding_as", d.binding_as + 1}};
  if (!d.diagnostic.empty()) j["diagnostic"] = d.diagnostic;
  if (d.feasible) {
    j["T_star"] = num(d.T_star);
    j["p0_star"] = num(d.p0_star);
    j["p1_star"] = num(d.p1_star);
    j["g_star"] = num(d.g_star);
    j["J_star"] = num(d.J_star);
    j["period_lo"] = num(d.period_lo);
    j["period_hi"] = num(d.period_hi);
  }
  return j;
}

DesignResult design_result_from_json(const json& j, std::size_t universe) {
  DesignResult d;
  d.feasible = j.at("feasible").get<bool>();
  d.subset = subset_from_json(j.at("subset"), universe);
  d.critical_traffic = get_num(j, "critical_traffic");
  d.binding_as = j.at("binding_as").get<AsIndex>() - 1;
  d.diagnostic = j.value("diagnostic", std::string());
  if (d.feasible) {
    d.T_star = get_num(j, "T_star");
    d.p0_star = get_num(j, "p0_star");
    d.p1_star = get_num(j, "p1_star");
    d.g_star = get_num(j, "g_star");
    d.J_star = get_num(j, "J_star");
    d.period_lo = get_num(j, "period_lo");
    d.period_hi = get_num(j, "period_hi");
  }
  return d;
}

json to_json(const AssumptionReport& r) {
  return json{{"monitoring", checks(r.monitoring)},
              {"deployment_pays", checks(r.deployment_pays)},
              {"social_benefit", checks(r.social_benefit)},
              {"subset_region", checks(r.subset_region)},
              {"all_pass", r.all_pass()}};
}

json to_json(const SimReport& r) {
  json j{{"horizon", r.horizon},
         {"T", num(r.T)},
         {"seed", r.seed},
         {"avg_cost", num(r.avg_cost)},
         {"avg_cost_per_as", r.avg_cost_per_as},
         {"discounted_utility", r.discounted_utility},
         {"rating_high_fraction", r.rating_high_fraction},
         {"punishment_fraction", num(r.punishment_fraction)}};
  if (!r.time_series.empty()) {
    json ts = json::array();
    for (const auto& s : r.time_series)
      ts.push_back(json{{"period", s.period},
                        {"total_cost", s.total_cost},
                        {"trigger_fired", s.trigger_fired},
                        {"mean_rating", s.mean_rating}});
    j["time_series"] = std::move(ts);
  }
  return j;
}

SimReport sim_report_from_json(const json& j) {
  SimReport r;
  r.horizon = j.at("horizon").get<std::size_t>();
  r.T = get_num(j, "T");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.avg_cost = get_num(j, "avg_cost");
  r.avg_cost_per_as = j.at("avg_cost_per_as").get<std::vector<double>>();
  r.discounted_utility = j.at("discounted_utility").get<std::vector<double>>();
  r.rating_high_fraction = j.at("rating_high_fraction").get<std::vector<double>>();
  r.punishment_fraction = get_num(j, "punishment_fraction");
  if (j.contains("time_series"))
    for (const auto& s : j.at("time_series"))
      r.time_series.push_back(SeriesRow{s.at("period").get<std::size_t>(), s.at("total_cost").get<double>(),
                                        s.at("trigger_fired").get<bool>(), s.at("mean_rating").get<double>()});
  return r;
}

json to_json(const IdTrace& t) {
  json its = json::array();
  for (std::size_t k = 0; k < t.iterations.size(); ++k) {
    const IdIteration& it = t.iterations[k];
    json row{{"iteration", k + 1},
             {"subset", subset_to_json(it.subset)},
             {"critical_traffic", num(it.critical_traffic)},
             {"critical", labels(it.critical)},
             {"evaluated", it.evaluated}};
    if (it.design) row["design"] = to_json(*it.design);
    if (!it.skip_reason.empty()) row["skip_reason"] = it.skip_reason;
    its.push_back(std::move(row));
  }
  json j{{"iterations", std::move(its)}};
  j["chosen"] = t.chosen ? json(*t.chosen + 1) : json(nullptr);
  return j;
}

IdTrace id_trace_from_json(const json& j, std::size_t universe) {
  IdTrace t;
  for (const auto& row : j.at("iterations")) {
    IdIteration it;
    it.subset = subset_from_json(row.at("subset"), universe);
    it.critical_traffic = get_num(row, "critical_traffic");
    it.critical = from_labels(row.at("critical"));
    it.evaluated = row.at("evaluated").get<bool>();
    if (row.contains("design")) it.design = design_result_from_json(row.at("design"), universe);
    it.skip_reason = row.value("skip_reason", std::string());
    t.iterations.push_back(std::move(it));
  }
  if (!j.at("chosen").is_null()) t.chosen = j.at("chosen").get<std::size_t>() - 1;
  return t;
}

json to_json(const StrategyResult& r) {
  json j{{"subset", subset_to_json(r.subset)},
         {"J", num(r.J)},
         {"undeployed_outbound", num(r.undeployed_outbound)},
         {"evaluations", r.evaluations},
         {"warnings", r.warnings}};
  if (r.design) j["design"] = to_json(*r.design);
  if (r.trace) j["trace"] = to_json(*r.trace);
  return j;
}

StrategyResult strategy_result_from_json(const json& j, std::size_t universe) {
  StrategyResult r;
  r.subset = subset_from_json(j.at("subset"), universe);
  r.J = get_num(j, "J");
  r.undeployed_outbound = get_num(j, "undeployed_outbound");
  r.evaluations = j.at("evaluations").get<std::uint64_t>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (j.contains("design")) r.design = design_result_from_json(j.at("design"), universe);
  if (j.contains("trace")) r.trace = id_trace_from_json(j.at("trace"), universe);
  return r;
}

json to_json(const ThresholdResult& r) {
  json rows = json::array();
  for (const auto& x : r.rows)
    rows.push_back(json{{"K", x.K},
                        {"N", x.N},
                        {"full_feasible", x.full_feasible},
                        {"core_feasible", x.core_feasible},
                        {"J_full", num(x.J_full)},
                        {"J_core", num(x.J_core)},
                        {"g_full", num(x.g_full)},
                        {"g_core", num(x.g_core)},
                        {"difference", num(x.difference)},
                        {"closed_form", num(x.closed_form)}});
  return json{{"K_star", r.K_star},
              {"N_star", r.N_star},
              {"regime", r.regime},
              {"l", r.l},
              {"lambda0", r.lambda0},
              {"max_closed_form_gap", num(r.max_closed_form_gap)},
              {"rows", std::move(rows)}};
}

ThresholdResult threshold_result_from_json(const json& j) {
  ThresholdResult r;
  r.K_star = j.at("K_star").get<std::size_t>();
  r.N_star = j.at("N_star").get<std::size_t>();
  r.regime = j.at("regime").get<std::string>();
  r.l = j.at("l").get<std::size_t>();
  r.lambda0 = j.at("lambda0").get<double>();
  r.max_closed_form_gap = get_num(j, "max_closed_form_gap");
  for (const auto& x : j.at("rows")) {
    ThresholdRow row;
    row.K = x.at("K").get<std::size_t>();
    row.N = x.at("N").get<std::size_t>();
    row.full_feasible = x.at("full_feasible").get<bool>();
    row.core_feasible = x.at("core_feasible").get<bool>();
    row.J_full = get_num(x, "J_full");
    row.J_core = get_num(x, "J_core");
    row.g_full = get_num(x, "g_full");
    row.g_core = get_num(x, "g_core");
    row.difference = row.J_full - row.J_core;
    row.closed_form = get_num(x, "closed_form", std::numeric_limits<double>::quiet_NaN());
    r.rows.push_back(row);
  }
  return r;
}

json to_json(const MctReport& r) {
  json j{{"holds", r.holds}, {"full_critical", num(r.full_critical)}, {"subsets_checked", r.subsets_checked}};
  if (r.witness) {
    j["witness"] = subset_to_json(*r.witness);
    j["witness_critical"] = num(r.witness_critical);
  }
  return j;
}

}  // namespace mutualsec::json
