#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dispcancel/config.hpp"
#include "dispcancel/report.hpp"

namespace dispcancel {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3 };

// Each command writes its CSV and report.json under `out_dir` (created if
// needed) and returns the report it wrote.

// trace.csv: tau_s,C,C_acc,C_dc
ReportRecord cmd_analyze(const ScenarioConfig& config, const std::filesystem::path& out_dir);

// mc_trace.csv: tau_s,C,C_acc,C_dc,stderr
ReportRecord cmd_montecarlo(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                            std::size_t threads = 0);

ReportRecord cmd_bounds(const ScenarioConfig& config, const std::filesystem::path& out_dir);

enum class SweepParam { beta, beta_signal, gain };

// Throws ValidationError for an unknown name.
SweepParam parse_sweep_param(const std::string& name);

// Parses a comma-separated list of numbers; throws ValidationError at
// "--values" for an empty list or a malformed entry.
std::vector<double> parse_values(const std::string& text);

// sweep.csv, one row per value sorted ascending:
//   beta, beta_signal: beta_S,beta_R,contrast,fwhm_s,C_acc,peak_C_dc
//   gain:              G,contrast,fwhm_s,C_acc,peak_C_dc,label
ReportRecord cmd_sweep(const ScenarioConfig& config, SweepParam param, std::vector<double> values,
                       const std::filesystem::path& out_dir);

// Maps the exception currently being handled to an exit code and writes one
// "path: message" line per problem to `err`.
int report_failure(std::ostream& err);

// Full command-line entry point used by the dispcancel tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dispcancel
