// Acceptance suite: one PASS/FAIL line per criterion. Arguments select
// criteria by number; with none, all run. Exit status is nonzero if any
// selected criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dispcancel/analytic.hpp"
#include "dispcancel/commands.hpp"
#include "dispcancel/config.hpp"
#include "dispcancel/montecarlo.hpp"

using namespace dispcancel;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kContrastTol = 0.01;
constexpr double kContrastRuntime = 1.0;  // s
constexpr double kOracleTol = 1e-6;
constexpr double kOracleRuntime = 30.0;  // s
constexpr double kBalancedTol = 1e-9;
constexpr double kWidthRatioTol = 1e-3;
constexpr double kSaturationTol = 1e-9;
constexpr double kGainFlipStep = 1e-9;
constexpr double kRectFormulaTol = 1e-12;
constexpr double kRectTraceTol = 1e-3;  // discretized band vs continuous sinc^2
constexpr double kMcPeakTol = 0.05;
constexpr double kMcSigmas = 3.0;
constexpr double kMcCoverage = 0.99;
constexpr double kMcRuntime = 300.0;  // s

// Shared Monte Carlo scenario: gaussian_classical, ideal detector, P T0 = 0.5, T = 512 T0.
constexpr double kT0 = 1e-12;
constexpr double kMcFlux = 0.5 / kT0;
constexpr std::size_t kMcTrials = 2000;
constexpr std::uint64_t kMcSeed = 20240917;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& text) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "    ok   " : "    FAIL ") + text);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::abs(b[i]));
  return m;
}

Outcome contrast_reproduction() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SpectralGrid grid(262144, kT0 / 16);
  const auto det = Detector::gaussian(1e-9);
  const double cq = contrast(cross_correlation(JointGaussianSource::gaussian(1e6, kT0, GaussianKind::quantum),
                                               FilterPair{}, det, grid));
  const double cc = contrast(cross_correlation(
      JointGaussianSource::gaussian(1e6, kT0, GaussianKind::classical), FilterPair{}, det, grid));
  const double elapsed = seconds_since(t0);
  o.check(std::abs(cq / 399.0 - 1.0) <= kContrastTol, fmt("quantum contrast %.6g vs 399 (±1%%)", cq));
  o.check(std::abs(cc / 7.07e-4 - 1.0) <= kContrastTol, fmt("classical contrast %.6g vs 7.07e-4 (±1%%)", cc));
  o.check(elapsed < kContrastRuntime, fmt("runtime %.3f s for both (< 1 s)", elapsed));
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string where;
  for (double tg_ratio : {0.0, 1.0, 10.0, 1e3}) {
    for (double pt0 : {1e-3, 1.0, 1e2}) {
      for (auto kind : {GaussianKind::quantum, GaussianKind::classical}) {
        const Detector det = tg_ratio == 0.0 ? Detector::instantaneous() : Detector::gaussian(tg_ratio * kT0);
        const double widest = std::max(1.0, tg_ratio) * kT0;
        std::size_t n = 1024;
        const double dt = kT0 / 16;
        while (n * dt < 16.0 * widest || n * dt < 40.0 * kT0) n *= 2;
        const SpectralGrid grid(n, dt);
        const double p = pt0 / kT0;
        const auto num = cross_correlation(JointGaussianSource::gaussian(p, kT0, kind),
                                           FilterPair::balanced(1e-24), det, grid);
        const auto ref = closed_form_gaussian(p, kT0, det, kind, grid);
        for (std::size_t i = 0; i < num.tau.size(); ++i) {
          if (std::abs(num.tau[i]) > 10 * kT0) continue;
          const double e = std::abs(num.c[i] - ref.c[i]) / ref.c[i];
          if (e > worst) {
            worst = e;
            where = fmt("Tg/T0=%g P*T0=%g %s", tg_ratio, pt0,
                        kind == GaussianKind::quantum ? "quantum" : "classical");
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  o.check(worst <= kOracleTol,
          fmt("max relative deviation %.3e over 24 cases, |tau| <= 10 T0 (<= 1e-6; worst at %s)", worst,
              where.c_str()));
  o.check(elapsed < kOracleRuntime, fmt("runtime %.2f s (< 30 s)", elapsed));
  return o;
}

Outcome dispersion_cancellation() {
  Outcome o;
  const SpectralGrid grid(16384, kT0 / 16);
  for (auto kind : {GaussianKind::quantum, GaussianKind::classical}) {
    const auto src = JointGaussianSource::gaussian(1e6, kT0, kind);
    const auto base = cross_correlation(src, FilterPair::balanced(0.0), Detector::instantaneous(), grid);
    double worst = 0.0;
    for (double beta : {1e-24, 1e-22}) {
      const auto r = cross_correlation(src, FilterPair::balanced(beta), Detector::instantaneous(), grid);
      worst = std::max(worst, max_rel(r.c, base.c));
    }
    o.check(worst <= kBalancedTol,
            fmt("%s: balanced beta in {0, 1e-24, 1e-22} s^2, max relative trace difference %.3e (<= 1e-9)",
                kind == GaussianKind::quantum ? "quantum" : "classical", worst));
  }
  const Scenario sc{JointGaussianSource::gaussian(1e6, kT0, GaussianKind::quantum), FilterPair{},
                    Detector::instantaneous(), grid};
  const auto rows = dispersion_sweep(sc, {{0.0, 0.0}, {1e-25, 0.0}, {3e-25, 0.0}, {1e-24, 0.0}, {3e-24, 0.0}});
  bool increasing = true;
  std::string widths;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && !(rows[i].fwhm > rows[i - 1].fwhm)) increasing = false;
    widths += fmt("%s%.4g", i ? ", " : "", rows[i].fwhm);
  }
  o.check(increasing, "unbalanced |beta_S + beta_R| in {0, 1e-25, 3e-25, 1e-24, 3e-24} s^2: FWHM strictly increasing [" +
                          widths + "] s");
  return o;
}

Outcome width_ratio() {
  Outcome o;
  const SpectralGrid grid(8192, kT0 / 64);
  const double p = 1e-6 / kT0;
  const double wq = signature_width(cross_correlation(JointGaussianSource::gaussian(p, kT0, GaussianKind::quantum),
                                                      FilterPair{}, Detector::instantaneous(), grid));
  const double wc = signature_width(cross_correlation(
      JointGaussianSource::gaussian(p, kT0, GaussianKind::classical), FilterPair{}, Detector::instantaneous(), grid));
  const double ratio = wq / wc;
  o.check(std::abs(ratio - 1.0 / std::sqrt(2.0)) <= kWidthRatioTol,
          fmt("FWHM quantum %.6g s / classical %.6g s = %.6f vs 1/sqrt(2) = %.6f (±1e-3)", wq, wc, ratio,
              1.0 / std::sqrt(2.0)));
  return o;
}

Outcome bound_classification() {
  Outcome o;
  const SpectralGrid grid(4096, kT0 / 16);
  const auto q = classify_state(JointGaussianSource::gaussian(1e6, kT0, GaussianKind::quantum), grid, kSaturationTol);
  o.check(q.label == StateLabel::maximally_entangled && std::abs(q.worst_margin) <= kSaturationTol,
          fmt("gaussian_quantum: %s, normalized quantum-bound margin %.3e (<= 1e-9)",
              std::string(to_string(q.label)).c_str(), q.worst_margin));
  const auto c = classify_state(JointGaussianSource::gaussian(1e6, kT0, GaussianKind::classical), grid, kSaturationTol);
  o.check(c.label == StateLabel::classical_maximally_correlated && std::abs(c.worst_margin) <= kSaturationTol,
          fmt("gaussian_classical: %s, normalized classical-bound margin %.3e (<= 1e-9)",
              std::string(to_string(c.label)).c_str(), c.worst_margin));

  const double omega = 1e12, p = omega / kPi;  // Omega / pi P = 1
  const SpectralGrid rg(1024, kPi / omega / 4);
  const double gc = critical_gain(p, omega);
  auto label = [&](double g) {
    return classify_state(JointGaussianSource::rect_noise(p, omega, g), rg, kSaturationTol).label;
  };
  const auto below = label(gc - kGainFlipStep), at = label(gc), above = label(gc + kGainFlipStep);
  o.check(below == StateLabel::nonclassical && at == StateLabel::classical_maximally_correlated &&
              above == StateLabel::classical,
          fmt("rect_noise flips at computed G_c = %.15g: G_c-1e-9 %s, G_c %s, G_c+1e-9 %s", gc,
              std::string(to_string(below)).c_str(), std::string(to_string(at)).c_str(),
              std::string(to_string(above)).c_str()));
  const double stated = 1.0 + std::sqrt(2.0);
  o.check(std::abs(gc - stated) <= kGainFlipStep,
          fmt("computed G_c = %.15g vs stated 1 + sqrt(2) = %.15g (±1e-9)", gc, stated));
  return o;
}

Outcome rect_closed_form() {
  Outcome o;
  const double omega = 2e12;
  double worst = 0.0;
  for (double ratio : {0.01, 0.5, 1.0, 3.0, 100.0}) {
    const double p = omega / (kPi * ratio);
    for (double g : {1.0, 1.3, 2.0, 7.5, 40.0}) {
      const double want = (1.0 + ratio) / ((1.0 + (g - 1.0) * ratio) * (1.0 + (g - 1.0) * ratio));
      worst = std::max(worst, std::abs(contrast_rect(p, omega, g) - want) / want);
    }
  }
  o.check(worst <= kRectFormulaTol, fmt("contrast_rect vs (1+x)/(1+(G-1)x)^2 over 25 points: %.3e (<= 1e-12)", worst));

  const double p = omega / kPi;
  const double c1 = contrast_rect(p, omega, 1.0);
  const double cc = contrast_rect(p, omega, critical_gain(p, omega));
  o.check(std::abs(c1 - 2.0) <= kRectFormulaTol * 2.0, fmt("G = 1: %.17g vs 1 + Omega/pi P = 2", c1));
  o.check(std::abs(cc - 1.0) <= kRectFormulaTol, fmt("G = G_c: %.17g vs 1", cc));
  bool decreasing = true;
  double last = c1;
  for (double g = 1.01; g <= 50.0; g *= 1.01) {
    const double c = contrast_rect(p, omega, g);
    decreasing = decreasing && c < last;
    last = c;
  }
  o.check(decreasing, "strictly decreasing over G in [1, 50] (geometric steps of 1%)");

  // Numeric FFT path from the sampled spectra against the closed-form sinc^2 trace.
  const SpectralGrid grid(65536, kPi / omega / 16);
  const double g = 1.5;
  const auto num = cross_correlation(JointGaussianSource::rect_noise(p, omega, g), FilterPair{},
                                     Detector::instantaneous(), grid);
  const auto ref = closed_form_rect_noise(p, omega, g, Detector::instantaneous(), grid);
  const double peak = *std::max_element(ref.c_dc.begin(), ref.c_dc.end());
  double trace_err = 0.0;
  for (std::size_t i = 0; i < num.c.size(); ++i) {
    if (std::abs(num.tau[i]) > 20 * kPi / omega) continue;
    trace_err = std::max(trace_err, std::abs(num.c[i] - ref.c[i]) / ref.c[i]);
  }
  double zero_err = 0.0;
  for (int k = 1; k <= 5; ++k) {
    for (int sign : {-1, 1}) {
      const auto j = static_cast<std::size_t>(static_cast<long>(grid.center()) + sign * 16 * k);
      zero_err = std::max(zero_err, std::abs(num.c_dc[j - grid.window_first()]) / peak);
    }
  }
  o.check(trace_err <= kRectTraceTol,
          fmt("numeric trace vs closed-form sinc^2 trace over |tau| <= 20 pi/Omega: %.3e relative (<= 1e-3)", trace_err));
  o.check(zero_err <= kRectTraceTol, fmt("C_dc at tau = k pi/Omega, k = ±1..±5: %.3e of peak (<= 1e-3)", zero_err));
  return o;
}

Outcome high_brightness() {
  Outcome o;
  for (double pt0 : {1e2, 1e4}) {
    const double bound = 1.0 / (pt0 * std::sqrt(kPi / 2.0));
    const double delta = high_brightness_delta(pt0 / kT0, kT0, 0.0);
    o.check(delta <= bound, fmt("P*T0 = %g closed forms: max |Cq - Cc|/Cc = %.4e <= %.4e", pt0, delta, bound));
    const SpectralGrid grid(4096, kT0 / 16);
    const auto q = cross_correlation(JointGaussianSource::gaussian(pt0 / kT0, kT0, GaussianKind::quantum),
                                     FilterPair{}, Detector::instantaneous(), grid);
    const auto c = cross_correlation(JointGaussianSource::gaussian(pt0 / kT0, kT0, GaussianKind::classical),
                                     FilterPair{}, Detector::instantaneous(), grid);
    const double numeric = max_rel(q.c, c.c);
    o.check(numeric <= bound, fmt("P*T0 = %g numeric traces: max |Cq - Cc|/Cc = %.4e <= %.4e", pt0, numeric, bound));
  }
  return o;
}

MCConfig mc_config() {
  MCConfig c;
  c.trials = kMcTrials;
  c.grid = SpectralGrid(65536, kT0 / 128);  // T = 512 T0
  c.seed = kMcSeed;
  return c;
}

Scenario mc_scenario(double beta) {
  return Scenario{JointGaussianSource::gaussian(kMcFlux, kT0, GaussianKind::classical),
                  FilterPair::balanced(beta), Detector::instantaneous(), SpectralGrid(65536, kT0 / 128)};
}

const MCEstimate& unfiltered_estimate(double* elapsed = nullptr) {
  static double took = 0.0;
  static const MCEstimate est = [] {
    const auto t0 = std::chrono::steady_clock::now();
    MCEstimate e = estimate_C(mc_config(), mc_scenario(0.0));
    took = seconds_since(t0);
    return e;
  }();
  if (elapsed) *elapsed = took;
  return est;
}

// Pointwise check at lags spaced T0/4 over [-4 T0, 4 T0] plus coverage over every lag there.
void pointwise(Outcome& o, const std::vector<double>& tau, const std::function<double(std::size_t)>& diff,
               const std::function<double(std::size_t)>& sigma, const std::string& what) {
  std::size_t spaced = 0, spaced_ok = 0, all = 0, all_ok = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (std::abs(tau[i]) > 4 * kT0 * (1 + 1e-9)) continue;
    const double z = std::abs(diff(i)) / sigma(i);
    ++all;
    all_ok += z <= kMcSigmas;
    const double steps = tau[i] / (kT0 / 4);
    if (std::abs(steps - std::round(steps)) < 1e-6) {
      ++spaced;
      spaced_ok += z <= kMcSigmas;
      worst = std::max(worst, z);
    }
  }
  o.check(spaced == 33 && spaced_ok == spaced,
          fmt("%s: %zu/%zu lags at T0/4 spacing within 3 sigma (worst %.2f sigma)", what.c_str(), spaced_ok, spaced,
              worst));
  const double coverage = static_cast<double>(all_ok) / static_cast<double>(all);
  o.check(coverage >= kMcCoverage,
          fmt("%s: %.2f%% of all %zu lags within 3 sigma (>= 99%%)", what.c_str(), 100 * coverage, all));
}

Outcome mc_convergence() {
  Outcome o;
  double elapsed = 0.0;
  const MCEstimate& e = unfiltered_estimate(&elapsed);
  const std::size_t zero = e.tau.size() / 2;
  const double want = 2.0 * kMcFlux * kMcFlux;
  const double rel = e.c[zero] / want - 1.0;
  o.check(std::abs(rel) <= kMcPeakTol,
          fmt("C(0) = %.6g vs 2 P^2 = %.6g: %+.2f%% (±5%%), standard error %.2f%%", e.c[zero], want, 100 * rel,
              100 * e.standard_error[zero] / want));
  const auto analytic = closed_form_gaussian(kMcFlux, kT0, Detector::instantaneous(), GaussianKind::classical,
                                             mc_config().grid);
  pointwise(
      o, e.tau, [&](std::size_t i) { return e.c[i] - analytic.c[i]; },
      [&](std::size_t i) { return e.standard_error[i]; }, "MC vs analytic");
  o.check(elapsed <= kMcRuntime, fmt("runtime %.1f s for %zu trials (<= 300 s)", elapsed, kMcTrials));
  return o;
}

Outcome mc_dispersion_cancellation() {
  Outcome o;
  const MCEstimate& plain = unfiltered_estimate();
  const auto t0 = std::chrono::steady_clock::now();
  const MCEstimate filtered = estimate_C(mc_config(), mc_scenario(1e-23));
  const double elapsed = seconds_since(t0);
  pointwise(
      o, plain.tau, [&](std::size_t i) { return filtered.c[i] - plain.c[i]; },
      [&](std::size_t i) { return std::hypot(filtered.standard_error[i], plain.standard_error[i]); },
      "beta = 1e-23 s^2 balanced vs beta = 0, paired seed");
  o.check(elapsed <= kMcRuntime, fmt("runtime %.1f s (<= 300 s)", elapsed));
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "dispcancel_acceptance_determinism";
  fs::remove_all(root);
  ScenarioConfig config{JointGaussianSource::gaussian(kMcFlux, kT0, GaussianKind::classical),
                        FilterPair::balanced(1e-23), Detector::instantaneous(), SpectralGrid(65536, kT0 / 128),
                        MonteCarloBlock{128, kMcSeed, 0.1}};
  auto run = [&](const std::string& name, std::size_t threads) {
    cmd_montecarlo(config, root / name, threads);
    std::ifstream f(root / name / "mc_trace.csv", std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
  };
  const std::string serial_a = run("serial_a", 1);
  const std::string serial_b = run("serial_b", 1);
  const std::string parallel = run("parallel", 4);
  o.check(!serial_a.empty() && serial_a == serial_b, "same seed, serial twice: CSVs bitwise identical");
  o.check(!serial_a.empty() && serial_a == parallel, "same seed, serial vs 4 threads: CSVs bitwise identical");
  fs::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"contrast reproduction", contrast_reproduction}},
      {2, {"oracle equivalence", oracle_equivalence}},
      {3, {"nonlocal dispersion cancellation (analytic)", dispersion_cancellation}},
      {4, {"width ratio", width_ratio}},
      {5, {"bound classification", bound_classification}},
      {6, {"additive-noise closed form", rect_closed_form}},
      {7, {"high-brightness convergence", high_brightness}},
      {8, {"Monte Carlo convergence", mc_convergence}},
      {9, {"Monte Carlo dispersion cancellation", mc_dispersion_cancellation}},
      {10, {"determinism", determinism}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [id, c] : criteria) selected.push_back(id);
  }
  int failures = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << id << ". " << it->second.first << '\n';
    for (const auto& line : o.lines) std::cout << line << '\n';
    std::cout.flush();
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
