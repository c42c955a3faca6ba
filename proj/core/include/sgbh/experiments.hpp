#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sgbh/config.hpp"

namespace sgbh {

struct ExperimentOutcome {
    bool pass = true;
    nlohmann::json report;
    std::vector<std::string> artifacts;
};

// Executes the configured experiment and writes its artifacts under
// cfg.output_dir. Throws ConfigError for precondition failures (exit 2) and
// BlowupError for numerical blow-up (exit 3); a false `pass` means a check
// failed (exit 1).
ExperimentOutcome run_experiment(const RunConfig& cfg);

nlohmann::json make_manifest(const RunConfig& cfg, const ExperimentOutcome& outcome,
                             double wall_seconds);

}  // namespace sgbh
