#include "dispcancel/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dispcancel/errors.hpp"

namespace dispcancel {
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("--out", "cannot write " + path.string());
  f << text;
  if (!f) throw ValidationError("--out", "failed writing " + path.string());
}

fs::path prepare(const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ValidationError("--out", "cannot create " + out_dir.string() + ": " + ec.message());
  return out_dir;
}

std::string trace_csv(const std::vector<double>& tau, const std::vector<double>& c, double c_acc,
                      const std::vector<double>& c_dc, const std::vector<double>* stderr_col) {
  std::string s = stderr_col ? "tau_s,C,C_acc,C_dc,stderr\n" : "tau_s,C,C_acc,C_dc\n";
  for (std::size_t i = 0; i < tau.size(); ++i) {
    s += format_double(tau[i]) + ',' + format_double(c[i]) + ',' + format_double(c_acc) + ',' +
         format_double(c_dc[i]);
    if (stderr_col) s += ',' + format_double((*stderr_col)[i]);
    s += '\n';
  }
  return s;
}

void finish(ReportRecord& report, const fs::path& dir) {
  report.trace_files.push_back("report.json");
  write_file(dir / "report.json", to_json(report).dump(2) + "\n");
}

}  // namespace

ReportRecord cmd_analyze(const ScenarioConfig& config, const fs::path& out_dir) {
  const Scenario scenario = config.scenario();
  check_grid_adequacy(scenario.source, scenario.detector, scenario.grid);
  const CrossCorrResult r = cross_correlation(scenario);

  ReportRecord report = make_report("analyze", scenario_to_json(config));
  report.classification = classify_state(config.source, config.grid, config.classify_tol);
  report.c_acc = r.c_acc;
  report.contrast = contrast(r);
  try {
    report.fwhm = signature_width(r);
  } catch (const WidthUndefinedError& e) {
    report.warnings.push_back(std::string("fwhm: ") + e.what());
  }

  const fs::path dir = prepare(out_dir);
  write_file(dir / "trace.csv", trace_csv(r.tau, r.c, r.c_acc, r.c_dc, nullptr));
  report.trace_files.push_back("trace.csv");
  finish(report, dir);
  return report;
}

ReportRecord cmd_montecarlo(const ScenarioConfig& config, const fs::path& out_dir,
                            std::size_t threads) {
  if (!config.montecarlo) {
    throw ValidationError("montecarlo", "block is required for the montecarlo command");
  }
  check_grid_adequacy(config.source, config.detector, config.grid);
  MCRun run = mc_run(config.mc_config(threads), config.scenario());
  run.report.scenario = scenario_to_json(config);
  run.report.scenario_hash = scenario_hash(run.report.scenario);
  const MCEstimate& e = run.estimate;
  const auto peak = std::max_element(e.c_dc.begin(), e.c_dc.end());
  if (e.c_acc > 0.0 && peak != e.c_dc.end()) run.report.contrast = *peak / e.c_acc;

  const fs::path dir = prepare(out_dir);
  write_file(dir / "mc_trace.csv", trace_csv(e.tau, e.c, e.c_acc, e.c_dc, &e.standard_error));
  run.report.trace_files.push_back("mc_trace.csv");
  finish(run.report, dir);
  return run.report;
}

ReportRecord cmd_bounds(const ScenarioConfig& config, const fs::path& out_dir) {
  ReportRecord report = make_report("bounds", scenario_to_json(config));
  report.classification = classify_state(config.source, config.grid, config.classify_tol);
  report.extra = {{"semiclassical", admits_semiclassical(report.classification->label)},
                  {"tol", config.classify_tol}};
  finish(report, prepare(out_dir));
  return report;
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "beta") return SweepParam::beta;
  if (name == "beta_signal") return SweepParam::beta_signal;
  if (name == "gain") return SweepParam::gain;
  throw ValidationError("--sweep-param", "unknown sweep parameter '" + name + "' (expected beta, beta_signal or gain)");
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    item = item.substr(first, last - first + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError("--values", "not a finite number: '" + item + "'");
    }
  }
  if (values.empty()) throw ValidationError("--values", "at least one value is required");
  return values;
}

ReportRecord cmd_sweep(const ScenarioConfig& config, SweepParam param, std::vector<double> values,
                       const fs::path& out_dir) {
  if (values.empty()) throw ValidationError("--values", "at least one value is required");
  ReportRecord report = make_report("sweep", scenario_to_json(config));
  std::string csv;

  if (param == SweepParam::gain) {
    const auto* rect = std::get_if<RectNoiseParams>(&config.source.params());
    if (!rect) throw ValidationError("source.family", "gain sweeps require the rect_noise family");
    if (!config.detector.ideal()) {
      throw UnsupportedError("gain sweeps use the fast-detector closed form; set detector.response to ideal");
    }
    for (double g : values) {
      if (!(g >= 1.0)) throw ValidationError("--values", "amplifier gain must satisfy gain ≥ 1");
    }
    const SweepTable rows = gain_sweep(rect->flux, rect->half_bandwidth, std::move(values),
                                       config.grid, config.detector.q, config.detector.eta);
    csv = "G,contrast,fwhm_s,C_acc,peak_C_dc,label\n";
    for (const SweepRow& r : rows) {
      csv += format_double(r.parameter) + ',' + format_double(r.contrast) + ',' +
             format_double(r.fwhm) + ',' + format_double(r.c_acc) + ',' +
             format_double(r.peak_c_dc) + ',' + std::string(to_string(*r.label)) + '\n';
    }
    report.extra = {{"sweep_param", "gain"},
                    {"critical_gain", critical_gain(rect->flux, rect->half_bandwidth)}};
  } else {
    const Scenario scenario = config.scenario();
    check_grid_adequacy(scenario.source, scenario.detector, scenario.grid);
    std::vector<std::pair<double, double>> pairs;
    for (double v : values) {
      pairs.emplace_back(v, param == SweepParam::beta ? 0.0 - v : config.filters.reference.beta);
    }
    const SweepTable rows = dispersion_sweep(scenario, std::move(pairs));
    csv = "beta_S,beta_R,contrast,fwhm_s,C_acc,peak_C_dc\n";
    for (const SweepRow& r : rows) {
      csv += format_double(r.parameter) + ',' + format_double(r.parameter2) + ',' +
             format_double(r.contrast) + ',' + format_double(r.fwhm) + ',' +
             format_double(r.c_acc) + ',' + format_double(r.peak_c_dc) + '\n';
    }
    report.extra = {{"sweep_param", param == SweepParam::beta ? "beta" : "beta_signal"}};
  }

  const fs::path dir = prepare(out_dir);
  write_file(dir / "sweep.csv", csv);
  report.trace_files.push_back("sweep.csv");
  finish(report, dir);
  return report;
}

int report_failure(std::ostream& err) {
  try {
    throw;
  } catch (const ValidationError& e) {
    for (const Issue& i : e.issues()) err << (i.path.empty() ? "document" : i.path) << ": " << i.message << '\n';
    return kExitValidation;
  } catch (const SemiclassicalError& e) {
    err << "montecarlo: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "domain: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigurationError& e) {
    err << "grid: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DegenerateSourceError& e) {
    err << "source: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const WidthUndefinedError& e) {
    err << "fwhm: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const FactorizationError& e) {
    err << "source: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "internal: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dispersion-cancellation photocurrent correlation toolkit", "dispcancel"};
  app.set_version_flag("--version", std::string(DISPCANCEL_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string sweep_param;
  std::string values_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Scenario JSON document")->required();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
  };
  CLI::App* analyze = app.add_subcommand("analyze", "Analytic cross-correlation trace and contrast");
  CLI::App* montecarlo = app.add_subcommand("montecarlo", "Semiclassical Monte Carlo estimate");
  CLI::App* bounds = app.add_subcommand("bounds", "Classify the source against the cross-spectrum bounds");
  CLI::App* sweep = app.add_subcommand("sweep", "Dispersion or gain sweep table");
  for (CLI::App* sub : {analyze, montecarlo, bounds, sweep}) add_common(sub);
  sweep->add_option("--sweep-param", sweep_param, "beta, beta_signal or gain")->required();
  sweep->add_option("--values", values_text, "Comma-separated values")
      ->required()
      ->expected(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << DISPCANCEL_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "arguments: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) throw ValidationError("--config", "cannot read " + config_path);
    std::stringstream buf;
    buf << f.rdbuf();
    const ScenarioConfig config = parse_config(buf.str());

    ReportRecord report;
    if (*analyze) {
      report = cmd_analyze(config, out_dir);
    } else if (*montecarlo) {
      report = cmd_montecarlo(config, out_dir);
    } else if (*bounds) {
      report = cmd_bounds(config, out_dir);
    } else {
      const SweepParam param = parse_sweep_param(sweep_param);
      report = cmd_sweep(config, param, parse_values(values_text), out_dir);
    }
    for (const std::string& w : report.warnings) err << "warning: " << w << '\n';
    out << (fs::path(out_dir) / "report.json").string() << '\n';
    return kExitOk;
  } catch (...) {
    return report_failure(err);
  }
}

}  // namespace dispcancel
