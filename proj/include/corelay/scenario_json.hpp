#pragma once

#include <string>

#include "corelay/config.hpp"

namespace corelay {

struct ScenarioParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario files are one nested JSON document mirroring ScenarioConfig field
// names. Unknown keys are an error so typos cannot silently fall back to
// defaults. "auto" (or omission) leaves slot_len_s / n_s derived.
ScenarioConfig scenario_from_json_text(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);
std::string scenario_to_json_text(const ScenarioConfig& cfg);

}  // namespace corelay
