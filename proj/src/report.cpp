#include "dispcancel/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace dispcancel {

std::string scenario_hash(const nlohmann::json& scenario) {
  const std::string text = scenario.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ReportRecord make_report(std::string command, nlohmann::json scenario) {
  ReportRecord r;
  r.command = std::move(command);
  r.scenario_hash = scenario_hash(scenario);
  r.scenario = std::move(scenario);
  r.tool_version = DISPCANCEL_VERSION;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  r.timestamp = buf;
  return r;
}

nlohmann::json to_json(const ReportRecord& r) {
  nlohmann::json j;
  j["command"] = r.command;
  j["scenario"] = r.scenario;
  j["scenario_hash"] = r.scenario_hash;
  if (r.classification) {
    j["classification"] = {{"label", std::string(to_string(r.classification->label))},
                           {"worst_margin", r.classification->worst_margin},
                           {"worst_omega", r.classification->worst_omega}};
  }
  if (r.c_acc) j["C_acc"] = *r.c_acc;
  if (r.contrast) j["contrast"] = *r.contrast;
  if (r.fwhm) j["fwhm_s"] = *r.fwhm;
  j["trace_files"] = r.trace_files;
  if (r.seed) j["seed"] = *r.seed;
  j["warnings"] = r.warnings;
  if (!r.extra.empty()) j["extra"] = r.extra;
  j["tool_version"] = r.tool_version;
  j["timestamp"] = r.timestamp;
  return j;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace dispcancel
