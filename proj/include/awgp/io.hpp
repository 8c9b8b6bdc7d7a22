#pragma once

#include <string>

#include "awgp/fsde.hpp"
#include "awgp/gauss_aw.hpp"
#include "awgp/mart_approx.hpp"
#include "json.hpp"

namespace awgp::io {

using json = nlohmann::ordered_json;

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

json to_json(const GridMeta& m);
GridMeta grid_meta_from_json(const json& j);

/// `with_nodes` adds the per-node arrays (nodes, correlations, coupling factors).
json to_json(const DistanceReport& r, bool with_nodes = true);
DistanceReport distance_report_from_json(const json& j);

json to_json(const MartingaleApproxResult& r);
MartingaleApproxResult mart_result_from_json(const json& j);

json to_json(const CostEstimate& c);
CostEstimate cost_estimate_from_json(const json& j);

json to_json(const AssumptionReport& r);
AssumptionReport assumption_report_from_json(const json& j);

/// Pretty-printed JSON followed by a newline.
std::string dump(const json& j);

}  // namespace awgp::io
