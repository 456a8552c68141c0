#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "miuralab/config.hpp"
#include "miuralab/evolution.hpp"
#include "miuralab/stability.hpp"

namespace miuralab {

// Header plus one line per row; absent values are empty cells.
std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows);

nlohmann::json to_json(const StabilityReport& r);
nlohmann::json to_json(const AprioriReport& r);

struct RunResult {
    std::string directory;
    nlohmann::json report;
    bool completed = true;  // false when an evolution stopped early
};

// Runs cfg.command and writes <output_dir>/<name>/{config.json, diagnostics.csv,
// report.json, snaps/}. Throws ValidationError or SolverError.
RunResult execute(const ExperimentConfig& cfg);

}  // namespace miuralab
