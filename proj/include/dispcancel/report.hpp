#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dispcancel/spectra.hpp"

namespace dispcancel {

struct ReportRecord {
  std::string command;
  nlohmann::json scenario;  // canonical echo of the parsed configuration
  std::string scenario_hash;
  std::optional<StateClass> classification;
  std::optional<double> c_acc;
  std::optional<double> contrast;
  std::optional<double> fwhm;
  std::vector<std::string> trace_files;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> warnings;
  nlohmann::json extra = nlohmann::json::object();
  std::string tool_version;
  std::string timestamp;
};

// FNV-1a 64 of the canonical (sorted-key) dump, as 16 hex digits.
std::string scenario_hash(const nlohmann::json& scenario);

// Fills hash, tool version and UTC timestamp.
ReportRecord make_report(std::string command, nlohmann::json scenario);

nlohmann::json to_json(const ReportRecord& report);

// 17 significant digits, enough to round-trip any double.
std::string format_double(double value);

}  // namespace dispcancel
