#pragma once

#include "rpos/core.hpp"

#include "json.hpp"

#include <filesystem>

namespace rpos {

/// Parses a scenario document. Missing sections fall back to the defaults of
/// the corresponding parameter struct; see docs/scenario.md for the schema.
/// Throws std::runtime_error on malformed input. Does not validate.
Scenario scenario_from_json(const nlohmann::json& doc);

nlohmann::json scenario_to_json(const Scenario& scenario);

/// Reads, parses and validates (throws ScenarioError on invariant violations).
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace rpos
