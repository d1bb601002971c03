#include "dispcancel/config.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "dispcancel/errors.hpp"

namespace dispcancel {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Collects violations while walking the document.
class Reader {
 public:
  std::vector<Issue> issues;

  void fail(std::string path, std::string message) {
    issues.push_back({std::move(path), std::move(message)});
  }

  bool object(const json& node, const std::string& path) {
    if (node.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void only_keys(const json& node, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : node.items()) {
      if (!allowed.count(key)) fail(join(path, key), "unknown key");
    }
  }

  std::optional<double> number(const json& node, const std::string& path, const std::string& key,
                               std::optional<double> fallback = std::nullopt) {
    const std::string where = join(path, key);
    if (!node.contains(key)) {
      if (!fallback) fail(where, "required number is missing");
      return fallback;
    }
    const json& v = node.at(key);
    if (!v.is_number()) {
      fail(where, "expected a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      fail(where, "must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<double> positive(const json& node, const std::string& path, const std::string& key,
                                 std::optional<double> fallback = std::nullopt) {
    auto x = number(node, path, key, fallback);
    if (x && !(*x > 0.0)) {
      fail(join(path, key), "must be > 0");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::uint64_t> unsigned_integer(const json& node, const std::string& path,
                                                const std::string& key,
                                                std::optional<std::uint64_t> fallback) {
    const std::string where = join(path, key);
    if (!node.contains(key)) {
      if (!fallback) fail(where, "required integer is missing");
      return fallback;
    }
    const json& v = node.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      if (v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
      fail(where, "must be nonnegative");
      return std::nullopt;
    }
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (x >= 0.0 && x < 9007199254740992.0 && std::floor(x) == x) {
        return static_cast<std::uint64_t>(x);
      }
    }
    fail(where, "expected a nonnegative integer");
    return std::nullopt;
  }

  std::optional<std::vector<double>> array(const json& node, const std::string& path,
                                           const std::string& key) {
    const std::string where = join(path, key);
    if (!node.contains(key)) {
      fail(where, "required array is missing");
      return std::nullopt;
    }
    const json& v = node.at(key);
    if (!v.is_array()) {
      fail(where, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(where + "[" + std::to_string(i) + "]", "expected a finite number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }
};

std::optional<JointGaussianSource> read_source(Reader& r, const json& doc) {
  const std::string path = "source";
  if (!doc.contains("source")) {
    r.fail(path, "required block is missing");
    return std::nullopt;
  }
  const json& node = doc.at("source");
  if (!r.object(node, path)) return std::nullopt;
  if (!node.contains("family") || !node.at("family").is_string()) {
    r.fail("source.family", "required string is missing");
    return std::nullopt;
  }
  const std::string name = node.at("family").get<std::string>();
  const auto family = parse_family(name);
  if (!family) {
    r.fail("source.family", "unknown family '" + name +
                                "' (expected gaussian_quantum, gaussian_classical, rect_noise, "
                                "sinc_downconverter or custom_tabulated)");
    return std::nullopt;
  }
  const auto phase = r.number(node, path, "pump_phase", 0.0);
  const std::size_t before = r.issues.size();
  std::optional<JointGaussianSource::Params> params;

  switch (*family) {
    case SourceFamily::gaussian_quantum:
    case SourceFamily::gaussian_classical: {
      r.only_keys(node, path, {"family", "pump_phase", "P", "T0"});
      const auto p = r.positive(node, path, "P");
      const auto t0 = r.positive(node, path, "T0");
      if (p && t0) {
        params = GaussianParams{*p, *t0,
                                *family == SourceFamily::gaussian_quantum ? GaussianKind::quantum
                                                                          : GaussianKind::classical};
      }
      break;
    }
    case SourceFamily::rect_noise: {
      r.only_keys(node, path, {"family", "pump_phase", "P", "Omega", "G"});
      const auto p = r.positive(node, path, "P");
      const auto omega = r.positive(node, path, "Omega");
      auto g = r.number(node, path, "G", 1.0);
      if (g && !(*g >= 1.0)) {
        r.fail("source.G", "amplifier gain must satisfy gain ≥ 1");
        g.reset();
      }
      if (p && omega && g) params = RectNoiseParams{*p, *omega, *g};
      break;
    }
    case SourceFamily::sinc_downconverter: {
      r.only_keys(node, path, {"family", "pump_phase", "g0", "Dl"});
      const auto g0 = r.positive(node, path, "g0");
      const auto dl = r.positive(node, path, "Dl");
      if (g0 && dl) params = SincParams{*g0, *dl};
      break;
    }
    case SourceFamily::custom_tabulated: {
      r.only_keys(node, path, {"family", "pump_phase", "omega", "S_SS", "S_RR", "S_SR_re", "S_SR_im"});
      auto omega = r.array(node, path, "omega");
      auto ss = r.array(node, path, "S_SS");
      auto rr = r.array(node, path, "S_RR");
      auto re = r.array(node, path, "S_SR_re");
      auto im = r.array(node, path, "S_SR_im");
      if (omega && ss && rr && re && im) {
        params = TabulatedSpectra{std::move(*omega), std::move(*ss), std::move(*rr),
                                  std::move(*re), std::move(*im)};
      }
      break;
    }
  }
  if (!params || !phase || r.issues.size() != before) return std::nullopt;
  try {
    return JointGaussianSource(std::move(*params), *phase);
  } catch (const DomainError& e) {
    r.fail(path, e.what());
    return std::nullopt;
  }
}

std::optional<DispersiveFilter> read_arm(Reader& r, const json& node, const std::string& path,
                                         double omega0) {
  if (!r.object(node, path)) return std::nullopt;
  r.only_keys(node, path, {"tau_p", "tau_g", "beta"});
  const auto tau_p = r.number(node, path, "tau_p", 0.0);
  const auto tau_g = r.number(node, path, "tau_g", 0.0);
  const auto beta = r.number(node, path, "beta", 0.0);
  if (!tau_p || !tau_g || !beta) return std::nullopt;
  return DispersiveFilter{*tau_p, *tau_g, *beta, omega0};
}

std::optional<FilterPair> read_filters(Reader& r, const json& doc) {
  if (!doc.contains("filters")) return FilterPair{};
  const std::string path = "filters";
  const json& node = doc.at(path);
  if (!r.object(node, path)) return std::nullopt;
  r.only_keys(node, path, {"omega0", "balanced_beta", "signal", "reference"});
  const auto omega0 = r.number(node, path, "omega0", 0.0);
  if (!omega0) return std::nullopt;
  FilterPair pair;
  pair.signal.omega0 = *omega0;
  pair.reference.omega0 = *omega0;
  bool ok = true;
  for (const char* arm : {"signal", "reference"}) {
    if (!node.contains(arm)) continue;
    auto f = read_arm(r, node.at(arm), join(path, arm), *omega0);
    if (!f) {
      ok = false;
      continue;
    }
    (std::string(arm) == "signal" ? pair.signal : pair.reference) = *f;
  }
  if (node.contains("balanced_beta")) {
    const auto beta = r.number(node, path, "balanced_beta");
    if (!beta) return std::nullopt;
    for (const char* arm : {"signal", "reference"}) {
      if (node.contains(arm) && node.at(arm).is_object() && node.at(arm).contains("beta")) {
        r.fail(join(join(path, arm), "beta"), "conflicts with filters.balanced_beta");
        ok = false;
      }
    }
    pair.signal.beta = *beta;
    pair.reference.beta = -*beta;
  }
  if (!ok) return std::nullopt;
  return pair;
}

std::optional<Detector> read_detector(Reader& r, const json& doc) {
  if (!doc.contains("detector")) return Detector{};
  const std::string path = "detector";
  const json& node = doc.at(path);
  if (!r.object(node, path)) return std::nullopt;
  r.only_keys(node, path, {"eta", "response", "Tg", "q"});
  auto eta = r.number(node, path, "eta", 1.0);
  if (eta && !(*eta > 0.0 && *eta <= 1.0)) {
    r.fail("detector.eta", "quantum efficiency must lie in (0, 1]");
    eta.reset();
  }
  const auto q = r.positive(node, path, "q", 1.0);
  std::string response = node.contains("Tg") ? "gaussian" : "ideal";
  if (node.contains("response")) {
    if (!node.at("response").is_string()) {
      r.fail("detector.response", "expected \"gaussian\" or \"ideal\"");
      return std::nullopt;
    }
    response = node.at("response").get<std::string>();
  }
  if (response == "ideal") {
    if (node.contains("Tg")) r.fail("detector.Tg", "not allowed for an ideal detector");
    if (!eta || !q || node.contains("Tg")) return std::nullopt;
    return Detector::instantaneous(*eta, *q);
  }
  if (response == "gaussian") {
    const auto tg = r.positive(node, path, "Tg");
    if (!eta || !q || !tg) return std::nullopt;
    return Detector::gaussian(*tg, *eta, *q);
  }
  r.fail("detector.response", "unknown response '" + response + "' (expected gaussian or ideal)");
  return std::nullopt;
}

std::optional<SpectralGrid> read_grid(Reader& r, const json& doc) {
  const std::string path = "grid";
  if (!doc.contains(path)) {
    r.fail(path, "required block is missing");
    return std::nullopt;
  }
  const json& node = doc.at(path);
  if (!r.object(node, path)) return std::nullopt;
  r.only_keys(node, path, {"n", "dt"});
  auto n = r.unsigned_integer(node, path, "n", std::nullopt);
  if (n && (*n < 16 || (*n & (*n - 1)) != 0 || *n > (std::uint64_t{1} << 30))) {
    r.fail("grid.n", "must be a power of two between 16 and 2^30");
    n.reset();
  }
  const auto dt = r.positive(node, path, "dt");
  if (!n || !dt) return std::nullopt;
  return SpectralGrid(static_cast<std::size_t>(*n), *dt);
}

std::optional<MonteCarloBlock> read_montecarlo(Reader& r, const json& doc, bool& ok) {
  ok = true;
  if (!doc.contains("montecarlo")) return std::nullopt;
  const std::string path = "montecarlo";
  const json& node = doc.at(path);
  ok = false;
  if (!r.object(node, path)) return std::nullopt;
  r.only_keys(node, path, {"trials", "seed", "burn_margin"});
  auto trials = r.unsigned_integer(node, path, "trials", 1);
  if (trials && *trials == 0) {
    r.fail("montecarlo.trials", "must be ≥ 1");
    trials.reset();
  }
  const auto seed = r.unsigned_integer(node, path, "seed", 0);
  auto burn = r.number(node, path, "burn_margin", 0.1);
  if (burn && !(*burn >= 0.0 && *burn <= 0.25)) {
    r.fail("montecarlo.burn_margin", "must lie in [0, 0.25]");
    burn.reset();
  }
  if (!trials || !seed || !burn) return std::nullopt;
  ok = true;
  return MonteCarloBlock{static_cast<std::size_t>(*trials), *seed, *burn};
}

std::optional<double> read_bounds(Reader& r, const json& doc) {
  if (!doc.contains("bounds")) return kDefaultSaturationTolerance;
  const std::string path = "bounds";
  const json& node = doc.at(path);
  if (!r.object(node, path)) return std::nullopt;
  r.only_keys(node, path, {"tol"});
  auto tol = r.number(node, path, "tol", kDefaultSaturationTolerance);
  if (tol && !(*tol > 0.0 && *tol <= 1e-2)) {
    r.fail("bounds.tol", "must lie in (0, 1e-2]");
    tol.reset();
  }
  return tol;
}

json arm_to_json(const DispersiveFilter& f) {
  return {{"tau_p", f.tau_p}, {"tau_g", f.tau_g}, {"beta", f.beta}};
}

json source_to_json(const JointGaussianSource& source) {
  json j;
  j["family"] = std::string(to_string(source.family()));
  std::visit(
      [&j](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianParams>) {
          j["P"] = p.flux;
          j["T0"] = p.coherence_time;
        } else if constexpr (std::is_same_v<T, RectNoiseParams>) {
          j["P"] = p.flux;
          j["Omega"] = p.half_bandwidth;
          j["G"] = p.gain;
        } else if constexpr (std::is_same_v<T, SincParams>) {
          j["g0"] = p.gain_amplitude;
          j["Dl"] = p.mismatch_time;
        } else {
          j["omega"] = p.omega;
          j["S_SS"] = p.ss;
          j["S_RR"] = p.rr;
          j["S_SR_re"] = p.sr_re;
          j["S_SR_im"] = p.sr_im;
        }
      },
      source.params());
  if (source.pump_phase() != 0.0) j["pump_phase"] = source.pump_phase();
  return j;
}

}  // namespace

MCConfig ScenarioConfig::mc_config(std::size_t threads) const {
  if (!montecarlo) throw ConfigurationError("montecarlo: block is missing from the scenario");
  MCConfig c;
  c.trials = montecarlo->trials;
  c.grid = grid;
  c.seed = montecarlo->seed;
  c.burn_margin = montecarlo->burn_margin;
  c.threads = threads;
  return c;
}

ScenarioConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("malformed document: ") + e.what());
  }
  return parse_config_document(doc);
}

ScenarioConfig parse_config_document(const json& doc) {
  Reader r;
  if (!doc.is_object()) throw ValidationError("", "document must be an object");
  r.only_keys(doc, "", {"source", "filters", "detector", "grid", "montecarlo", "bounds",
                        "description"});
  auto source = read_source(r, doc);
  auto filters = read_filters(r, doc);
  auto detector = read_detector(r, doc);
  auto grid = read_grid(r, doc);
  bool mc_ok = true;
  auto mc = read_montecarlo(r, doc, mc_ok);
  auto tol = read_bounds(r, doc);

  if (source && grid && tol && mc) {
    // Semiclassical photodetection only reproduces states with a proper P representation.
    try {
      const StateClass state = classify_state(*source, *grid, *tol);
      if (!admits_semiclassical(state.label)) {
        r.fail("montecarlo", "semiclassical gate: source is " + std::string(to_string(state.label)) +
                                 ", Monte Carlo photodetection requires a classical state");
      }
    } catch (const ConfigurationError& e) {
      r.fail("grid", e.what());
    }
  }
  if (!r.issues.empty()) throw ValidationError(std::move(r.issues));
  if (!source || !filters || !detector || !grid || !tol || !mc_ok) {
    throw ValidationError("", "document could not be parsed");
  }
  return ScenarioConfig{std::move(*source), *filters, *detector, *grid, mc, *tol};
}

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["source"] = source_to_json(c.source);
  j["filters"] = {{"omega0", c.filters.signal.omega0},
                  {"signal", arm_to_json(c.filters.signal)},
                  {"reference", arm_to_json(c.filters.reference)}};
  json det = {{"eta", c.detector.eta}, {"q", c.detector.q}};
  if (c.detector.ideal()) {
    det["response"] = "ideal";
  } else {
    det["response"] = "gaussian";
    det["Tg"] = *c.detector.response_time;
  }
  j["detector"] = det;
  j["grid"] = {{"n", c.grid.size()}, {"dt", c.grid.dt()}};
  if (c.montecarlo) {
    j["montecarlo"] = {{"trials", c.montecarlo->trials},
                       {"seed", c.montecarlo->seed},
                       {"burn_margin", c.montecarlo->burn_margin}};
  }
  if (c.classify_tol != kDefaultSaturationTolerance) j["bounds"] = {{"tol", c.classify_tol}};
  return j;
}

std::string serialize_config(const ScenarioConfig& config) {
  return scenario_to_json(config).dump(2);
}

}  // namespace dispcancel
