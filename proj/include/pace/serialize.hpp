#pragma once

// JSON and CSV renderings of traces, equilibria, metric reports and input
// model specs. Infinite numbers are written as the string "inf".

#include <string>

#include <json.hpp>

#include "pace/dynamics.hpp"
#include "pace/eg.hpp"
#include "pace/inputs.hpp"
#include "pace/metrics.hpp"

namespace pace {

using Json = nlohmann::json;

Json number_json(double x);
double number_from_json(const Json& j);

/// "pace", "constrained,low=..,high=.." etc.; the inverse of parse_variant for
/// variants that carry scalar parameters.
Json variant_json(const Variant& variant);
Variant variant_from_json(const Json& j);

/// One row per checkpoint: tau, ubar_1..n, beta_1..n, spend_1..n.
std::string trace_csv(const RunTrace& trace);
Json trace_json(const RunTrace& trace);
RunTrace trace_from_json(const Json& j);

Json equilibrium_json(const MarketEquilibrium& eq, bool include_allocation);
Json metrics_json(const MetricsReport& report);

Json distribution_json(const FiniteDistribution& d);
FiniteDistribution distribution_from_json(const Json& j);
Json model_json(const InputModel& model);
InputModel model_from_json(const Json& j);

}  // namespace pace
