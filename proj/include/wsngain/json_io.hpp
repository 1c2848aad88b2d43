// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <variant>

#include "json.hpp"

#include "wsngain/diffusion.hpp"
#include "wsngain/gainopt.hpp"
#include "wsngain/harness.hpp"
#include "wsngain/scenario.hpp"

namespace wsngain {

using Json = nlohmann::json;
using AnyScenario = std::variant<CentralizedScenario, DecentralizedScenario>;

// Indices in JSON are 1-based.
Json to_json(const CentralizedScenario& scenario);
Json to_json(const DecentralizedScenario& scenario);
Json to_json(const AnyScenario& scenario);

/// Throws ParseError on malformed input, plus whatever validate() throws.
AnyScenario scenario_from_json(const Json& j);

Json plan_to_json(const CompressionPlan& plan);
Json result_to_json(const GainVector& gains, const OptimizerTrace& trace);

/// Overrides fields of `base` present in `j`; unknown keys are rejected.
NoiseConfig noise_config_from_json(const Json& j, NoiseConfig base = {});
OptimizerConfig optimizer_config_from_json(const Json& j, OptimizerConfig base = {});
/// Keys: kind, n_range, noise_range, M, realizations, constraint, methods,
/// optimizer{...}, noise{...}, seed, threads, record_timing, selection_N,
/// selection_K, Q, edge_probability, rho, tol, max_iter.
ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig base = {});

Json parse_json_text(const std::string& text);

}  // namespace wsngain
