#pragma once

// Scenario configs: one JSON document per HNN datum.
//
//   {
//     "name": "bs23", "seed": 0, "term_cap": 1000000,
//     "backend": {"kind": "group" | "torus" | "matrix", ...},
//     "D": ..., "thetas": [...],
//     "expectations": "trace-preserving" | "state-preserving" | {"D": {...}, "thetas": [{...}]},
//     "reference_state": ..., "trace": ..., "oracle": {...}, "bindings": {"name": element, ...}
//   }
//
// Complex numbers are numbers or [re, im] pairs; matrices are row-major nested
// arrays, {"diag": [...]}, {"kron": [A, B, ...]}, {"identity": d} or {"zero": d};
// multi-block elements are {"blocks": [M1, M2, ...]}. Any element may also be
// given as an expression string over the backend's default bindings.
// README.md documents every backend's keys.

#include <optional>
#include <string>

#include "json.hpp"

#include "hnn/engine.h"

namespace hnn {

struct LoadOptions {
  std::optional<std::uint64_t> seed;       // overrides the config seed
  std::optional<std::size_t> term_cap;     // overrides config and HNN_TERM_CAP
};

// Throws ScenarioError on malformed configs and on validation failures.
ScenarioPtr load_scenario(const nlohmann::json& config, const LoadOptions& opts = {});
ScenarioPtr load_scenario_file(const std::string& path, const LoadOptions& opts = {});

GroupSpec parse_group_spec(const nlohmann::json& j);

}  // namespace hnn
