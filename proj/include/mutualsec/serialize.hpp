#pragma once

// JSON forms of the library's result types. Subsets are written as 1-based
// AS labels; non-finite numbers are written as null.

#include <json.hpp>

#include "mutualsec/design.hpp"
#include "mutualsec/sim.hpp"
#include "mutualsec/strategy.hpp"

namespace mutualsec::json {

using nlohmann::json;

json subset_to_json(const Subset& s);
Subset subset_from_json(const json& j, std::size_t universe);

json to_json(const DesignResult& d);
DesignResult design_result_from_json(const json& j, std::size_t universe);

json to_json(const AssumptionReport& r);

json to_json(const SimReport& r);
SimReport sim_report_from_json(const json& j);

json to_json(const IdTrace& t);
IdTrace id_trace_from_json(const json& j, std::size_t universe);

json to_json(const StrategyResult& r);
StrategyResult strategy_result_from_json(const json& j, std::size_t universe);

json to_json(const ThresholdResult& r);
ThresholdResult threshold_result_from_json(const json& j);

json to_json(const MctReport& r);

}  // namespace mutualsec::json
