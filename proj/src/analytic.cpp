#include "dispcancel/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dispcancel/errors.hpp"
#include "dispcancel/parallel.hpp"

namespace dispcancel {
namespace {

constexpr double kPi = std::numbers::pi;

CrossCorrResult windowed(const SpectralGrid& grid, const auto& c_of_index, double c_acc) {
  CrossCorrResult out{grid, {}, {}, {}, c_acc};
  const std::size_t first = grid.window_first();
  const std::size_t last = grid.window_last();
  out.tau.reserve(last - first + 1);
  out.c.reserve(last - first + 1);
  out.c_dc.reserve(last - first + 1);
  for (std::size_t j = first; j <= last; ++j) {
    const double c = c_of_index(j);
    out.tau.push_back(grid.tau(j));
    out.c.push_back(c);
    out.c_dc.push_back(c - c_acc);
  }
  return out;
}

}  // namespace

void check_grid_adequacy(const JointGaussianSource& source, const Detector& detector,
                         const SpectralGrid& grid) {
  validate(detector);
  const double tc = source.coherence_time();
  const double widest = detector.ideal() ? tc : std::max(tc, *detector.response_time);
  const double narrowest = detector.ideal() ? tc : std::min(tc, *detector.response_time);
  std::ostringstream msg;
  if (grid.duration() < 16.0 * widest) {
    msg << "grid too short: T / max(t_c, Tg) = " << grid.duration() / widest << " < 16";
    throw ConfigurationError(msg.str());
  }
  if (grid.dt() > narrowest / 16.0) {
    msg << "grid too coarse: min(t_c, Tg) / dt = " << narrowest / grid.dt() << " < 16";
    throw ConfigurationError(msg.str());
  }
  const double support = source.support();
  if (std::isfinite(support) && grid.nyquist() < support) {
    msg << "grid Nyquist span / source support = " << grid.nyquist() / support << " < 1";
    throw ConfigurationError(msg.str());
  }
}

CrossCorrResult cross_correlation(const JointGaussianSource& source, const FilterPair& pair,
                                  const Detector& detector, const SpectralGrid& grid) {
  check_grid_adequacy(source, detector, grid);
  const SampledSpectra out = propagate_spectra(sample_spectra(source, grid), pair);

  double kss0 = 0.0;
  double krr0 = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    kss0 += out.ss[k];
    krr0 += out.rr[k];
  }
  const double bin = grid.domega() / (2.0 * kPi);
  kss0 *= bin;
  krr0 *= bin;

  const ComplexTrace ksr = to_lag_domain(grid, out.sr);
  RealTrace magnitude(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) magnitude[j] = std::norm(ksr[j]);
  RealTrace signature = convolve(magnitude, detector_rgg(detector, grid));

  const double scale = detector.q * detector.q * detector.eta * detector.eta;
  const double c_acc = scale * kss0 * krr0;
  return windowed(
      grid, [&](std::size_t j) { return c_acc + scale * std::max(signature[j], 0.0); }, c_acc);
}

CrossCorrResult cross_correlation(const Scenario& s) {
  return cross_correlation(s.source, s.filters, s.detector, s.grid);
}

CrossCorrResult closed_form_gaussian(double flux, double coherence_time, const Detector& detector,
                                     GaussianKind kind, const SpectralGrid& grid) {
  validate(detector);
  if (!(flux > 0.0) || !(coherence_time > 0.0)) {
    throw DomainError("closed form requires positive P and T0");
  }
  const double tg = detector.response_time.value_or(0.0);
  const double t0sq = coherence_time * coherence_time;
  const double tgsq = tg * tg;
  const double scale = detector.q * detector.q * detector.eta * detector.eta;
  const double c_acc = scale * flux * flux;
  const double classical_peak = 1.0 / std::sqrt(1.0 + 2.0 * tgsq / t0sq);
  const double quantum_peak = flux / std::sqrt(kPi * (t0sq / 2.0 + 2.0 * tgsq));
  return windowed(
      grid,
      [&](std::size_t j) {
        const double t = grid.tau(j);
        double c = c_acc * (1.0 + classical_peak * std::exp(-t * t / (t0sq + 2.0 * tgsq)));
        if (kind == GaussianKind::quantum) {
          c += scale * quantum_peak * std::exp(-2.0 * t * t / (t0sq + 4.0 * tgsq));
        }
        return c;
      },
      c_acc);
}

CrossCorrResult closed_form_rect_noise(double flux, double half_bandwidth, double gain,
                                       const Detector& detector, const SpectralGrid& grid) {
  validate(detector);
  if (!detector.ideal()) {
    throw UnsupportedError(
        "the additive-noise closed form exists only in the fast-detector limit; use "
        "cross_correlation for finite detector response");
  }
  (void)eval_rect_noise_source(flux, half_bandwidth, gain, 0.0);  // parameter checks
  const double scale = detector.q * detector.q * detector.eta * detector.eta;
  const double background = flux + (gain - 1.0) * half_bandwidth / kPi;
  const double c_acc = scale * background * background;
  const double peak = scale * (flux * flux + flux * half_bandwidth / kPi);
  return windowed(
      grid,
      [&](std::size_t j) {
        const double x = half_bandwidth * grid.tau(j);
        const double s = x == 0.0 ? 1.0 : std::sin(x) / x;
        return c_acc + peak * s * s;
      },
      c_acc);
}

double contrast(const CrossCorrResult& r) {
  if (!(r.c_acc > 0.0)) {
    throw DegenerateSourceError("contrast undefined: accidental-coincidence level is zero");
  }
  const double peak = *std::max_element(r.c_dc.begin(), r.c_dc.end());
  return peak / r.c_acc;
}

double critical_gain(double flux, double half_bandwidth) {
  if (!(flux > 0.0) || !(half_bandwidth > 0.0)) {
    throw DomainError("critical gain requires positive P and Omega");
  }
  // Root of (a + G - 1)^2 = a^2 + a with a = pi P / Omega, i.e. the gain at
  // which |S_SR|^2 = S_SS S_RR inside the passband.
  const double a = kPi * flux / half_bandwidth;
  const double x = 1.0 / a;
  // a (sqrt(1 + x) - 1) written without cancellation for large a.
  return 1.0 + a * x / (std::sqrt(1.0 + x) + 1.0);
}

double contrast_rect(double flux, double half_bandwidth, double gain) {
  (void)eval_rect_noise_source(flux, half_bandwidth, gain, 0.0);  // parameter checks
  const double x = half_bandwidth / (kPi * flux);
  const double d = 1.0 + (gain - 1.0) * x;
  return (1.0 + x) / (d * d);
}

double signature_width(const CrossCorrResult& r) {
  const auto& y = r.c_dc;
  if (y.size() < 3) throw WidthUndefinedError("trace too short for a width");
  const auto peak_it = std::max_element(y.begin(), y.end());
  const std::size_t peak = static_cast<std::size_t>(peak_it - y.begin());
  const double half = *peak_it / 2.0;
  if (!(*peak_it > 0.0)) throw WidthUndefinedError("signature term has no positive peak");

  std::size_t i = peak;
  while (i > 0 && y[i - 1] > half) --i;
  if (i == 0) throw WidthUndefinedError("no half-maximum crossing left of the peak");
  const double left = r.tau[i - 1] + (half - y[i - 1]) / (y[i] - y[i - 1]) * (r.tau[i] - r.tau[i - 1]);

  std::size_t k = peak;
  while (k + 1 < y.size() && y[k + 1] > half) ++k;
  if (k + 1 == y.size()) throw WidthUndefinedError("no half-maximum crossing right of the peak");
  const double right = r.tau[k] + (y[k] - half) / (y[k] - y[k + 1]) * (r.tau[k + 1] - r.tau[k]);
  return right - left;
}

SweepTable dispersion_sweep(const Scenario& scenario,
                            std::vector<std::pair<double, double>> betas) {
  if (betas.empty()) throw DomainError("dispersion sweep needs at least one (beta_S, beta_R) pair");
  std::sort(betas.begin(), betas.end());
  SweepTable rows(betas.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    FilterPair pair = scenario.filters;
    pair.signal.beta = betas[i].first;
    pair.reference.beta = betas[i].second;
    const CrossCorrResult r = cross_correlation(scenario.source, pair, scenario.detector, scenario.grid);
    SweepRow row;
    row.parameter = betas[i].first;
    row.parameter2 = betas[i].second;
    row.contrast = contrast(r);
    row.fwhm = signature_width(r);
    row.c_acc = r.c_acc;
    row.peak_c_dc = *std::max_element(r.c_dc.begin(), r.c_dc.end());
    rows[i] = row;
  });
  return rows;
}

SweepTable gain_sweep(double flux, double half_bandwidth, std::vector<double> gains,
                      const SpectralGrid& label_grid, double q, double eta) {
  if (gains.empty()) throw DomainError("gain sweep needs at least one gain value");
  std::sort(gains.begin(), gains.end());
  const double scale = q * q * eta * eta;
  const double fwhm = 2.0 * sinc_squared_half_point() / half_bandwidth;
  SweepTable rows;
  rows.reserve(gains.size());
  for (double g : gains) {
    SweepRow row;
    row.parameter = g;
    row.contrast = contrast_rect(flux, half_bandwidth, g);
    row.fwhm = fwhm;
    const double background = flux + (g - 1.0) * half_bandwidth / kPi;
    row.c_acc = scale * background * background;
    row.peak_c_dc = scale * (flux * flux + flux * half_bandwidth / kPi);
    row.label = classify_state(JointGaussianSource::rect_noise(flux, half_bandwidth, g), label_grid).label;
    rows.push_back(row);
  }
  return rows;
}

double high_brightness_delta(double flux, double coherence_time, double response_time) {
  if (!(flux > 0.0) || !(coherence_time > 0.0) || response_time < 0.0) {
    throw DomainError("high-brightness comparison requires P, T0 > 0 and Tg >= 0");
  }
  const double t0sq = coherence_time * coherence_time;
  const double tgsq = response_time * response_time;
  const double classical_peak = 1.0 / std::sqrt(1.0 + 2.0 * tgsq / t0sq);
  const double quantum_peak = 1.0 / (flux * std::sqrt(kPi * (t0sq / 2.0 + 2.0 * tgsq)));
  const double width = std::sqrt(t0sq + 4.0 * tgsq);
  double worst = 0.0;
  constexpr int kSamples = 4000;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = 8.0 * width * (static_cast<double>(i) / kSamples);
    const double classical = 1.0 + classical_peak * std::exp(-t * t / (t0sq + 2.0 * tgsq));
    const double extra = quantum_peak * std::exp(-2.0 * t * t / (t0sq + 4.0 * tgsq));
    worst = std::max(worst, extra / classical);
  }
  return worst;
}

double sinc_squared_half_point() {
  // Bisection on (sin x / x)^2 - 1/2 over the main lobe.
  double lo = 1.0, hi = 2.0;
  auto f = [](double x) {
    const double s = std::sin(x) / x;
    return s * s - 0.5;
  };
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dispcancel
