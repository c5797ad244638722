#pragma once

#include <string>

#include <json.hpp>

#include "pollinglab/model.hpp"

namespace pollinglab::config {

using Json = nlohmann::json;

/// Parse a service-distribution object:
///   {"kind": "exponential", "rate": 1.0}
///   {"kind": "deterministic", "value": 2.0}
///   {"kind": "erlang", "shape": 3, "rate": 2.0}
///   {"kind": "hyperexponential", "probs": [...], "rates": [...]}
///   {"kind": "pareto", "index": 1.5, "scale": 1.0}
/// Unknown kinds and unknown keys are rejected; errors name the offending key.
ServiceDistribution parse_service(const Json& doc, const std::string& key_path);

/// Parse a model document with keys lambda1, service1, c1, lambda2,
/// service2, c2 (all required, nothing else at the top level).
PollingModel parse_model(const Json& doc);

PollingModel load_model_file(const std::string& path);

Json model_to_json(const PollingModel& model);

} // namespace pollinglab::config
