#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dispcancel/commands.hpp"
#include "dispcancel/errors.hpp"
#include "test_support.hpp"

using namespace dispcancel;
using testing::kPi;
using testing::rel_err;
namespace fs = std::filesystem;

namespace {

const char* kQuantumSlow = R"({
  "source": {"family": "gaussian_quantum", "P": 1e6, "T0": 1e-12},
  "detector": {"response": "gaussian", "Tg": 1e-9},
  "grid": {"n": 262144, "dt": 6.25e-14}
})";

const char* kClassicalMC = R"({
  "source": {"family": "gaussian_classical", "P": 0.25e12, "T0": 1e-12},
  "filters": {"balanced_beta": 1e-25},
  "grid": {"n": 8192, "dt": 1.5625e-14},
  "montecarlo": {"trials": 6, "seed": 12345}
})";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dispcancel_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<Issue> issues_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ValidationError& e) {
    return e.issues();
  }
  return {};
}

bool has_issue(const std::vector<Issue>& issues, const std::string& path, const std::string& fragment) {
  for (const auto& i : issues) {
    if (i.path == path && i.message.find(fragment) != std::string::npos) return true;
  }
  return false;
}

struct Cli {
  int code;
  std::string out;
  std::string err;
};

Cli cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dispcancel");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  fs::create_directories(dir);
  const fs::path p = dir / "scenario.json";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("minimal document gets defaults") {
  const auto c = parse_config(R"({"source": {"family": "gaussian_quantum", "P": 1, "T0": 1},
                                   "grid": {"n": 256, "dt": 0.0625}})");
  CHECK(c.detector.q == 1.0);
  CHECK(c.detector.eta == 1.0);
  CHECK(c.detector.ideal());
  CHECK(c.filters == FilterPair{});
  CHECK_FALSE(c.montecarlo.has_value());
  CHECK(c.classify_tol == kDefaultSaturationTolerance);

  const auto m = parse_config(R"({"source": {"family": "gaussian_classical", "P": 1, "T0": 1},
                                   "grid": {"n": 256, "dt": 0.0625}, "montecarlo": {}})");
  REQUIRE(m.montecarlo.has_value());
  CHECK(m.montecarlo->burn_margin == 0.1);
  CHECK(m.montecarlo->trials == 1);
}

TEST_CASE("balanced_beta expands to opposite arms") {
  const auto c = parse_config(R"({"source": {"family": "gaussian_quantum", "P": 1, "T0": 1},
      "filters": {"omega0": 2e15, "balanced_beta": 3e-24, "signal": {"tau_g": 1e-12}},
      "grid": {"n": 256, "dt": 0.0625}})");
  CHECK(c.filters.signal.beta == 3e-24);
  CHECK(c.filters.reference.beta == -3e-24);
  CHECK(c.filters.signal.tau_g == 1e-12);
  CHECK(c.filters.reference.omega0 == 2e15);
}

TEST_CASE("validation collects every violation with its path") {
  const auto issues = issues_of(R"({
    "source": {"family": "rect_noise", "P": 1, "Omega": 1, "G": 0.5, "colour": "red"},
    "detector": {"eta": 1.5, "response": "gaussian"},
    "grid": {"n": 100, "dt": -1},
    "extra": 1})");
  CHECK(has_issue(issues, "source.G", "gain ≥ 1"));
  CHECK(has_issue(issues, "source.colour", "unknown key"));
  CHECK(has_issue(issues, "detector.eta", "(0, 1]"));
  CHECK(has_issue(issues, "detector.Tg", "missing"));
  CHECK(has_issue(issues, "grid.n", "power of two"));
  CHECK(has_issue(issues, "grid.dt", "> 0"));
  CHECK(has_issue(issues, "extra", "unknown key"));
  CHECK(issues.size() >= 7);
}

TEST_CASE("schema errors") {
  CHECK(has_issue(issues_of(R"({"source": {"family": "laser"}, "grid": {"n": 64, "dt": 1}})"),
                  "source.family", "unknown family"));
  CHECK(has_issue(issues_of("{not json"), "", "malformed"));
  CHECK(has_issue(issues_of(R"({"source": {"family": "gaussian_quantum", "P": "one", "T0": 1},
                                "grid": {"n": 64, "dt": 1}})"),
                  "source.P", "expected a number"));
  CHECK(has_issue(issues_of(R"({"source": {"family": "gaussian_quantum", "P": 1, "T0": 1}})"), "grid",
                  "missing"));
  CHECK(has_issue(issues_of(R"({"source": {"family": "gaussian_quantum", "P": 1, "T0": 1},
      "filters": {"balanced_beta": 1e-24, "reference": {"beta": 1e-24}}, "grid": {"n": 256, "dt": 0.0625}})"),
                  "filters.reference.beta", "conflicts"));
  const auto mc = issues_of(R"({"source": {"family": "gaussian_quantum", "P": 1, "T0": 1},
      "grid": {"n": 256, "dt": 0.0625}, "montecarlo": {"trials": 0, "burn_margin": 0.5}})");
  CHECK(has_issue(mc, "montecarlo.trials", "≥ 1"));
  CHECK(has_issue(mc, "montecarlo.burn_margin", "[0, 0.25]"));
}

TEST_CASE("montecarlo block with a quantum source hits the semiclassical gate") {
  const auto issues = issues_of(R"({"source": {"family": "gaussian_quantum", "P": 1, "T0": 1},
      "grid": {"n": 256, "dt": 0.0625}, "montecarlo": {"trials": 10, "seed": 1}})");
  CHECK(has_issue(issues, "montecarlo", "semiclassical gate"));
}

TEST_CASE("serialization round trip") {
  const char* docs[] = {
      kQuantumSlow,
      kClassicalMC,
      R"({"source": {"family": "rect_noise", "P": 3.1e11, "Omega": 1e12, "G": 1.7, "pump_phase": 0.4},
          "filters": {"omega0": 2.35e15, "signal": {"tau_p": 1e-15, "tau_g": 2e-12, "beta": 1e-24},
                      "reference": {"tau_p": 3e-15, "tau_g": -1e-12, "beta": 0.1}},
          "detector": {"eta": 0.37, "response": "ideal", "q": 1.602176634e-19},
          "grid": {"n": 1024, "dt": 1e-13}, "bounds": {"tol": 1e-6}})",
      R"({"source": {"family": "sinc_downconverter", "g0": 0.1, "Dl": 1e-12},
          "grid": {"n": 1024, "dt": 1e-14}})",
      R"({"source": {"family": "custom_tabulated", "omega": [-1, 0, 1], "S_SS": [0, 1, 0],
          "S_RR": [0, 1, 0], "S_SR_re": [0, 0.3, 0], "S_SR_im": [0, 0.1, 0]},
          "grid": {"n": 64, "dt": 0.5}})"};
  for (const char* doc : docs) {
    const auto c = parse_config(doc);
    const auto again = parse_config(serialize_config(c));
    CHECK(again == c);
    CHECK(serialize_config(again) == serialize_config(c));
  }
}

TEST_CASE("analyze command") {
  const fs::path out = scratch("analyze");
  const auto report = cmd_analyze(parse_config(kQuantumSlow), out);
  CHECK(rel_err(*report.contrast, 399.0) < 0.01);
  CHECK(report.classification->label == StateLabel::maximally_entangled);
  CHECK(fs::exists(out / "trace.csv"));
  CHECK(fs::exists(out / "report.json"));

  const std::string csv = slurp(out / "trace.csv");
  CHECK(csv.rfind("tau_s,C,C_acc,C_dc\n", 0) == 0);
  const auto json = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(json["scenario_hash"] == report.scenario_hash);
  CHECK(json["scenario_hash"] == scenario_hash(json["scenario"]));
  CHECK(json.contains("C_acc"));
  CHECK(json.contains("fwhm_s"));
  CHECK(json["tool_version"] == DISPCANCEL_VERSION);

  // 17 significant digits survive a text round trip.
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  const double tau = std::stod(row.substr(0, row.find(',')));
  CHECK(format_double(tau) == row.substr(0, row.find(',')));

  const auto classical = parse_config(std::string(kQuantumSlow).replace(
      std::string(kQuantumSlow).find("gaussian_quantum"), 16, "gaussian_classical"));
  CHECK(rel_err(*cmd_analyze(classical, scratch("analyze_c")).contrast, 7.07e-4) < 0.01);
}

TEST_CASE("analyze with no cross spectrum reports zero contrast") {
  const auto c = parse_config(R"({"source": {"family": "custom_tabulated", "omega": [-1e13, 1e13],
      "S_SS": [1, 1], "S_RR": [1, 1], "S_SR_re": [0, 0], "S_SR_im": [0, 0]},
      "grid": {"n": 1024, "dt": 1.9634954084936207e-14}})");
  const auto r = cmd_analyze(c, scratch("flat"));
  CHECK(*r.contrast == 0.0);
  CHECK_FALSE(r.fwhm.has_value());
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("bounds command") {
  const auto q = cmd_bounds(parse_config(kQuantumSlow), scratch("bounds_q"));
  CHECK(q.classification->label == StateLabel::maximally_entangled);
  CHECK(std::abs(q.classification->worst_margin) < 1e-9);

  const double omega = 1e12, p = omega / kPi;
  nlohmann::json doc = {{"source", {{"family", "rect_noise"}, {"P", p}, {"Omega", omega},
                                    {"G", critical_gain(p, omega)}}},
                        {"grid", {{"n", 1024}, {"dt", kPi / omega / 4}}}};
  const auto r = cmd_bounds(parse_config_document(doc), scratch("bounds_r"));
  CHECK(r.classification->label == StateLabel::classical_maximally_correlated);

  doc = {{"source", {{"family", "custom_tabulated"}, {"omega", {-1.0, 0.0, 1.0}}, {"S_SS", {0.0, 1.0, 0.0}},
                     {"S_RR", {0.0, 1.0, 0.0}}, {"S_SR_re", {0.0, 3.0, 0.0}}, {"S_SR_im", {0.0, 0.0, 0.0}}}},
         {"grid", {{"n", 64}, {"dt", 0.5}}}};
  const auto bad = cmd_bounds(parse_config_document(doc), scratch("bounds_bad"));
  CHECK(bad.classification->label == StateLabel::invalid);
  CHECK(std::abs(bad.classification->worst_omega) < 1.0);
  const auto json = nlohmann::json::parse(
      slurp(fs::temp_directory_path() / "dispcancel_test_bounds_bad" / "report.json"));
  CHECK(json["classification"]["label"] == "invalid");
  CHECK(json["classification"].contains("worst_omega"));
}

TEST_CASE("montecarlo command") {
  const auto c = parse_config(kClassicalMC);
  const fs::path a = scratch("mc_a"), b = scratch("mc_b");
  const auto report = cmd_montecarlo(c, a, 1);
  cmd_montecarlo(c, b, 3);
  const std::string csv = slurp(a / "mc_trace.csv");
  CHECK(csv.rfind("tau_s,C,C_acc,C_dc,stderr\n", 0) == 0);
  CHECK(csv == slurp(b / "mc_trace.csv"));
  CHECK(report.seed.value() == 12345);
  CHECK(report.scenario_hash == scenario_hash(scenario_to_json(c)));
}

TEST_CASE("sweep command") {
  SUBCASE("balanced beta keeps the width") {
    const fs::path out = scratch("sweep_beta");
    cmd_sweep(parse_config(R"({"source": {"family": "gaussian_quantum", "P": 1e6, "T0": 1e-12},
        "grid": {"n": 16384, "dt": 6.25e-14}})"),
              SweepParam::beta, parse_values("1e-22, 0,1e-24"), out);
    std::istringstream csv(slurp(out / "sweep.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "beta_S,beta_R,contrast,fwhm_s,C_acc,peak_C_dc");
    std::vector<double> widths;
    while (std::getline(csv, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
      REQUIRE(cells.size() == 6);
      CHECK(std::stod(cells[1]) == -std::stod(cells[0]));
      widths.push_back(std::stod(cells[3]));
    }
    REQUIRE(widths.size() == 3);
    for (double w : widths) CHECK(rel_err(w, widths[0]) < 1e-9);
  }
  SUBCASE("gain sweep labels flip at the critical gain") {
    const double omega = 1e12, p = omega / kPi;
    nlohmann::json doc = {{"source", {{"family", "rect_noise"}, {"P", p}, {"Omega", omega}}},
                          {"grid", {{"n", 1024}, {"dt", kPi / omega / 4}}}};
    const fs::path out = scratch("sweep_gain");
    const double gc = critical_gain(p, omega);
    cmd_sweep(parse_config_document(doc), SweepParam::gain, {1.0, gc - 1e-6, gc, gc + 1e-6, 3.0}, out);
    const std::string csv = slurp(out / "sweep.csv");
    CHECK(csv.rfind("G,contrast,fwhm_s,C_acc,peak_C_dc,label\n", 0) == 0);
    const auto pos_ent = csv.find("maximally_entangled");
    const auto pos_non = csv.find("nonclassical");
    const auto pos_max = csv.find("classical_maximally_correlated");
    const auto pos_cl = csv.find(",classical\n");
    CHECK(pos_ent < pos_non);
    CHECK(pos_non < pos_max);
    CHECK(pos_max < pos_cl);
  }
  CHECK_THROWS_AS(parse_values(""), ValidationError);
  CHECK_THROWS_AS(parse_values("1,abc"), ValidationError);
  CHECK_THROWS_AS(parse_sweep_param("omega"), ValidationError);
}

TEST_CASE("exit codes and error lines") {
  const fs::path dir = scratch("cli");
  const auto quantum = write_config(dir / "q", kQuantumSlow);
  const auto mc = write_config(dir / "mc", kClassicalMC);

  auto r = cli({"analyze", "--config", quantum.string(), "--out", (dir / "out_a").string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "out_a" / "report.json"));

  r = cli({"bounds", "--config", quantum.string(), "--out", (dir / "out_b").string()});
  CHECK(r.code == 0);

  r = cli({"montecarlo", "--config", mc.string(), "--out", (dir / "out_m").string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "out_m" / "mc_trace.csv"));

  r = cli({"montecarlo", "--config", quantum.string(), "--out", (dir / "out_q").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("montecarlo:") != std::string::npos);

  const auto quantum_mc = write_config(dir / "qmc", R"({
    "source": {"family": "gaussian_quantum", "P": 1e6, "T0": 1e-12},
    "grid": {"n": 4096, "dt": 6.25e-14}, "montecarlo": {"trials": 2}})");
  r = cli({"montecarlo", "--config", quantum_mc.string(), "--out", (dir / "out_qmc").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("semiclassical gate") != std::string::npos);

  const auto bad = write_config(dir / "bad", R"({"source": {"family": "rect_noise", "P": 1,
      "Omega": 1, "G": 0.5}, "grid": {"n": 64, "dt": 0.5}})");
  r = cli({"analyze", "--config", bad.string(), "--out", (dir / "out_bad").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("source.G: ") != std::string::npos);

  const auto coarse = write_config(dir / "coarse", R"({"source": {"family": "gaussian_quantum",
      "P": 1e6, "T0": 1e-12}, "detector": {"Tg": 1e-9}, "grid": {"n": 1024, "dt": 6.25e-14}})");
  r = cli({"analyze", "--config", coarse.string(), "--out", (dir / "out_c").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("grid: ") != std::string::npos);

  r = cli({"sweep", "--config", quantum.string(), "--out", (dir / "out_s").string(),
           "--sweep-param", "beta", "--values", ""});
  CHECK(r.code == 2);
  CHECK(r.err.find("--values") != std::string::npos);

  r = cli({"analyze", "--config", (dir / "missing.json").string()});
  CHECK(r.code == 2);
  r = cli({"frobnicate"});
  CHECK(r.code == 2);
  r = cli({"--help"});
  CHECK(r.code == 0);
}
