#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace cloak {

struct ScenarioReport {
    bool ok = true;
    int exit_code = 0;  // 0 pass, 1 expectation mismatch, 2 unusable input
    std::vector<std::string> lines;
    std::string failure;
};

// Deterministic end-to-end driver. A scenario file names a contract, seeds
// parties and executors, and scripts steps: register, deploy, session,
// submit, execute, verify, open, check_state, tamper. Every step carries an
// expectation; the first mismatch stops the run.
ScenarioReport run_scenario_file(const std::string& path);
ScenarioReport run_scenario_json(const nlohmann::json& j, const std::string& base_dir);

}  // namespace cloak
