#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dispcancel/analytic.hpp"
#include "dispcancel/montecarlo.hpp"

namespace dispcancel {

struct MonteCarloBlock {
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  double burn_margin = 0.1;
  bool operator==(const MonteCarloBlock&) const = default;
};

// A fully validated scenario document. All quantities in SI units.
struct ScenarioConfig {
  JointGaussianSource source;
  FilterPair filters;
  Detector detector;
  SpectralGrid grid;
  std::optional<MonteCarloBlock> montecarlo;
  double classify_tol = kDefaultSaturationTolerance;

  bool operator==(const ScenarioConfig&) const = default;

  Scenario scenario() const { return Scenario{source, filters, detector, grid}; }
  // Throws ConfigurationError when the document has no montecarlo block.
  MCConfig mc_config(std::size_t threads = 0) const;
};

// Parses and validates a JSON scenario document. Every violation found is
// collected; a ValidationError carrying all of them is thrown if any exist.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig parse_config_document(const nlohmann::json& document);

// Canonical document; parse_config(serialize_config(c)) == c.
nlohmann::json scenario_to_json(const ScenarioConfig& config);
std::string serialize_config(const ScenarioConfig& config);

}  // namespace dispcancel
