#pragma once

// Batch front end: runs every scenario of a config and writes
// trajectories.csv, reports.json, reports.csv and plot/ under the output
// directory. Exit codes: 0 all checks and non-extrapolated reports pass,
// 2 something failed, 1 configuration or solver error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqrtsg/config.hpp"
#include "sqrtsg/verification.hpp"

namespace sqrtsg {

struct CheckResult {
    std::string scenario;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CurveRecord {
    std::string scenario;  // "<id>/x<i>" or "<id>/x<i>/<kind>"
    std::string curve;     // "orbit" or the almost-orbit kind
    SampledCurve samples;
};

struct RunResult {
    std::vector<RateReport> reports;
    std::vector<CheckResult> checks;
    std::vector<CurveRecord> curves;
    std::vector<std::string> errors;

    /// 1 on errors, else 2 if any check or non-extrapolated report failed, else 0.
    int exit_code() const;
};

/// Pure computation; output order does not depend on jobs.
RunResult execute(const RunConfig& cfg, unsigned jobs = 1);

nlohmann::json to_json(const RateReport& r);
nlohmann::json reports_json(const RunConfig& cfg, const RunResult& res);

/// Writes each file to a temporary name first and renames it into place.
void write_outputs(const RunConfig& cfg, const RunResult& res, const std::string& out_dir);

struct RunOptions {
    std::string out_dir = "out";
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
};

/// Load, execute, write. Diagnostics go to err.
int run(const std::string& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err);

void list_catalog(std::ostream& os, bool json);

}  // namespace sqrtsg
