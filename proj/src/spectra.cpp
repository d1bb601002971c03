#include "dispcancel/spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "dispcancel/errors.hpp"
#include "dispcancel/fft.hpp"

namespace dispcancel {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  if (!std::isfinite(x)) return 0.0;
  return std::sin(x) / x;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (!(x >= xs.front() && x <= xs.back())) return 0.0;
  const auto upper = std::upper_bound(xs.begin(), xs.end(), x);
  if (upper == xs.end()) return ys.back();
  const auto hi = static_cast<std::size_t>(upper - xs.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

void validate(const GaussianParams& p) {
  require_positive(p.flux, "photon flux P");
  require_positive(p.coherence_time, "coherence time T0");
}

void validate(const RectNoiseParams& p) {
  require_positive(p.flux, "photon flux P");
  require_positive(p.half_bandwidth, "half-bandwidth Omega");
  if (!(p.gain >= 1.0) || !std::isfinite(p.gain)) {
    throw DomainError("amplifier gain G must satisfy gain >= 1");
  }
}

void validate(const SincParams& p) {
  require_positive(p.gain_amplitude, "gain amplitude g0");
  require_positive(p.mismatch_time, "group-mismatch time Dl");
}

void validate(const TabulatedSpectra& t) {
  const std::size_t n = t.omega.size();
  if (n < 2) throw DomainError("tabulated spectra need at least two points");
  if (t.ss.size() != n || t.rr.size() != n || t.sr_re.size() != n || t.sr_im.size() != n) {
    throw DomainError("tabulated spectra arrays must all have the same length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(t.omega[i]) || !std::isfinite(t.ss[i]) || !std::isfinite(t.rr[i]) ||
        !std::isfinite(t.sr_re[i]) || !std::isfinite(t.sr_im[i])) {
      throw DomainError("tabulated spectra must be finite");
    }
    if (i > 0 && !(t.omega[i] > t.omega[i - 1])) {
      throw DomainError("tabulated omega must be strictly increasing");
    }
    if (t.ss[i] < 0.0 || t.rr[i] < 0.0) {
      throw DomainError("tabulated auto-spectra must be nonnegative");
    }
  }
}

}  // namespace

SpectralTriple eval_gaussian_source(double flux, double coherence_time, GaussianKind kind,
                                    double omega) {
  require_positive(flux, "photon flux P");
  require_positive(coherence_time, "coherence time T0");
  const double t0sq = coherence_time * coherence_time;
  const double wt = omega * omega * t0sq;
  SpectralTriple out;
  out.ss = flux * std::sqrt(2.0 * kPi * t0sq) * std::exp(-wt / 2.0);
  out.rr = out.ss;
  out.sr = out.ss;
  if (kind == GaussianKind::quantum) {
    const double imag =
        std::sqrt(flux) * std::pow(2.0 * kPi * t0sq, 0.25) * std::exp(-wt / 4.0);
    out.sr = cplx(out.ss, imag);
  }
  return out;
}

SpectralTriple eval_rect_noise_source(double flux, double half_bandwidth, double gain,
                                      double omega) {
  validate(RectNoiseParams{flux, half_bandwidth, gain});
  if (!(std::abs(omega) <= half_bandwidth)) return {};
  const double level = kPi * flux / half_bandwidth;
  SpectralTriple out;
  out.ss = level + (gain - 1.0);
  out.rr = out.ss;
  out.sr = cplx(level, std::sqrt(level));
  return out;
}

SpectralTriple eval_sinc_source(double gain_amplitude, double mismatch_time, double omega) {
  validate(SincParams{gain_amplitude, mismatch_time});
  const double s = sinc(omega * mismatch_time / 2.0);
  SpectralTriple out;
  out.ss = gain_amplitude * gain_amplitude * s * s;
  out.rr = out.ss;
  out.sr = cplx(0.0, gain_amplitude * s);
  return out;
}

std::string_view to_string(SourceFamily family) {
  switch (family) {
    case SourceFamily::gaussian_quantum: return "gaussian_quantum";
    case SourceFamily::gaussian_classical: return "gaussian_classical";
    case SourceFamily::rect_noise: return "rect_noise";
    case SourceFamily::sinc_downconverter: return "sinc_downconverter";
    case SourceFamily::custom_tabulated: return "custom_tabulated";
  }
  return "unknown";
}

std::optional<SourceFamily> parse_family(std::string_view name) {
  constexpr std::array families{SourceFamily::gaussian_quantum, SourceFamily::gaussian_classical,
                                SourceFamily::rect_noise, SourceFamily::sinc_downconverter,
                                SourceFamily::custom_tabulated};
  for (auto f : families) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

JointGaussianSource::JointGaussianSource(Params params, double pump_phase)
    : params_(std::move(params)), pump_phase_(pump_phase) {
  std::visit([](const auto& p) { validate(p); }, params_);
  if (!std::isfinite(pump_phase_)) throw DomainError("pump_phase must be finite");
}

JointGaussianSource JointGaussianSource::gaussian(double flux, double coherence_time,
                                                  GaussianKind kind) {
  return JointGaussianSource(GaussianParams{flux, coherence_time, kind});
}

JointGaussianSource JointGaussianSource::rect_noise(double flux, double half_bandwidth,
                                                    double gain) {
  return JointGaussianSource(RectNoiseParams{flux, half_bandwidth, gain});
}

JointGaussianSource JointGaussianSource::sinc(double gain_amplitude, double mismatch_time) {
  return JointGaussianSource(SincParams{gain_amplitude, mismatch_time});
}

JointGaussianSource JointGaussianSource::tabulated(TabulatedSpectra table) {
  return JointGaussianSource(std::move(table));
}

SourceFamily JointGaussianSource::family() const {
  struct Visitor {
    SourceFamily operator()(const GaussianParams& p) const {
      return p.kind == GaussianKind::quantum ? SourceFamily::gaussian_quantum
                                             : SourceFamily::gaussian_classical;
    }
    SourceFamily operator()(const RectNoiseParams&) const { return SourceFamily::rect_noise; }
    SourceFamily operator()(const SincParams&) const { return SourceFamily::sinc_downconverter; }
    SourceFamily operator()(const TabulatedSpectra&) const {
      return SourceFamily::custom_tabulated;
    }
  };
  return std::visit(Visitor{}, params_);
}

SpectralTriple JointGaussianSource::at(double omega) const {
  struct Visitor {
    double omega;
    SpectralTriple operator()(const GaussianParams& p) const {
      return eval_gaussian_source(p.flux, p.coherence_time, p.kind, omega);
    }
    SpectralTriple operator()(const RectNoiseParams& p) const {
      return eval_rect_noise_source(p.flux, p.half_bandwidth, p.gain, omega);
    }
    SpectralTriple operator()(const SincParams& p) const {
      return eval_sinc_source(p.gain_amplitude, p.mismatch_time, omega);
    }
    SpectralTriple operator()(const TabulatedSpectra& t) const {
      SpectralTriple out;
      out.ss = interpolate(t.omega, t.ss, omega);
      out.rr = interpolate(t.omega, t.rr, omega);
      out.sr = cplx(interpolate(t.omega, t.sr_re, omega), interpolate(t.omega, t.sr_im, omega));
      return out;
    }
  };
  SpectralTriple out = std::visit(Visitor{omega}, params_);
  if (pump_phase_ != 0.0) out.sr *= std::polar(1.0, pump_phase_);
  return out;
}

double JointGaussianSource::coherence_time() const {
  struct Visitor {
    double operator()(const GaussianParams& p) const { return p.coherence_time; }
    double operator()(const RectNoiseParams& p) const { return kPi / p.half_bandwidth; }
    double operator()(const SincParams& p) const { return p.mismatch_time; }
    double operator()(const TabulatedSpectra& t) const {
      return kPi / std::max(std::abs(t.omega.front()), std::abs(t.omega.back()));
    }
  };
  return std::visit(Visitor{}, params_);
}

double JointGaussianSource::support() const {
  struct Visitor {
    double operator()(const GaussianParams&) const { return kInf; }
    double operator()(const RectNoiseParams& p) const { return p.half_bandwidth; }
    double operator()(const SincParams&) const { return kInf; }
    double operator()(const TabulatedSpectra& t) const {
      return std::max(std::abs(t.omega.front()), std::abs(t.omega.back()));
    }
  };
  return std::visit(Visitor{}, params_);
}

double JointGaussianSource::spectral_width() const {
  struct Visitor {
    double operator()(const GaussianParams& p) const { return 1.0 / p.coherence_time; }
    double operator()(const RectNoiseParams& p) const { return p.half_bandwidth; }
    double operator()(const SincParams& p) const { return 2.0 * kPi / p.mismatch_time; }
    double operator()(const TabulatedSpectra& t) const {
      return std::max(std::abs(t.omega.front()), std::abs(t.omega.back()));
    }
  };
  return std::visit(Visitor{}, params_);
}

SampledSpectra sample_spectra(const JointGaussianSource& source, const SpectralGrid& grid) {
  const std::size_t n = grid.size();
  SampledSpectra out{grid, RealTrace(n), RealTrace(n), ComplexTrace(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const SpectralTriple t = source.at(grid.omega(k));
    out.ss[k] = t.ss;
    out.rr[k] = t.rr;
    out.sr[k] = t.sr;
  }
  return out;
}

std::string_view to_string(StateLabel label) {
  switch (label) {
    case StateLabel::maximally_entangled: return "maximally_entangled";
    case StateLabel::nonclassical: return "nonclassical";
    case StateLabel::classical_maximally_correlated: return "classical_maximally_correlated";
    case StateLabel::classical: return "classical";
    case StateLabel::invalid: return "invalid";
  }
  return "unknown";
}

bool admits_semiclassical(StateLabel label) {
  return label == StateLabel::classical || label == StateLabel::classical_maximally_correlated;
}

StateClass classify_state(const JointGaussianSource& source, const SpectralGrid& grid, double tol) {
  if (!(tol > 0.0 && tol <= 1e-2)) {
    throw DomainError("classification tolerance must lie in (0, 1e-2]");
  }
  const double support = source.support();
  if (std::isfinite(support)) {
    if (grid.nyquist() < support) {
      std::ostringstream msg;
      msg << "grid Nyquist span " << grid.nyquist() << " rad/s is smaller than the source support "
          << support << " rad/s";
      throw ConfigurationError(msg.str());
    }
  } else if (grid.nyquist() < 8.0 * source.spectral_width()) {
    std::ostringstream msg;
    msg << "grid Nyquist span / source spectral width = "
        << grid.nyquist() / source.spectral_width() << " < 8";
    throw ConfigurationError(msg.str());
  }

  const std::size_t n = grid.size();
  std::vector<SpectralTriple> at_plus(n);
  RealTrace rr_minus(n);
  double max_ss = 0.0;
  double max_rr = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = grid.omega(k);
    at_plus[k] = source.at(w);
    rr_minus[k] = source.at(-w).rr;
    max_ss = std::max(max_ss, at_plus[k].ss);
    max_rr = std::max(max_rr, rr_minus[k]);
  }
  const double floor_ss = kSupportFloor * max_ss;
  const double floor_rr = kSupportFloor * max_rr;
  const double slack = floor_ss * std::max(floor_rr, 1.0);

  bool any_supported = false;
  bool violates_quantum = false;
  bool saturates_quantum = true;
  bool saturates_classical = true;
  bool within_classical = true;
  double worst_q = -kInf, worst_q_omega = 0.0;
  double worst_c = -kInf, worst_c_omega = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double ss = at_plus[k].ss;
    const double rr = rr_minus[k];
    const double cross = std::norm(at_plus[k].sr);
    const double quantum_bound = ss * (1.0 + rr);
    const double classical_bound = ss * rr;
    const bool supported = ss >= floor_ss && rr >= floor_rr && ss > 0.0 && rr > 0.0;

    if (!supported) {
      if (cross > quantum_bound * (1.0 + tol) + slack) {
        violates_quantum = true;
        const double mq = (cross - quantum_bound) /
                          std::max(quantum_bound + slack, std::numeric_limits<double>::min());
        if (mq > worst_q) {
          worst_q = mq;
          worst_q_omega = grid.omega(k);
        }
      }
      if (cross > classical_bound * (1.0 + tol) + slack) within_classical = false;
      continue;
    }
    any_supported = true;
    const double mq = cross / quantum_bound - 1.0;
    const double mc = cross / classical_bound - 1.0;
    if (mq > tol) violates_quantum = true;
    if (std::abs(mq) > tol) saturates_quantum = false;
    if (std::abs(mc) > tol) saturates_classical = false;
    if (mc > tol) within_classical = false;
    if (mq > worst_q) {
      worst_q = mq;
      worst_q_omega = grid.omega(k);
    }
    if (mc > worst_c) {
      worst_c = mc;
      worst_c_omega = grid.omega(k);
    }
  }

  StateClass out;
  if (violates_quantum) {
    out = {StateLabel::invalid, worst_q, worst_q_omega};
  } else if (!any_supported) {
    out = {StateLabel::classical, 0.0, 0.0};
  } else if (saturates_quantum) {
    out = {StateLabel::maximally_entangled, worst_q, worst_q_omega};
  } else if (saturates_classical) {
    out = {StateLabel::classical_maximally_correlated, worst_c, worst_c_omega};
  } else if (within_classical) {
    out = {StateLabel::classical, worst_c, worst_c_omega};
  } else {
    out = {StateLabel::nonclassical, worst_c, worst_c_omega};
  }
  return out;
}

ComplexTrace to_lag_domain(const SpectralGrid& grid, std::span<const cplx> spectrum) {
  const std::size_t n = grid.size();
  if (spectrum.size() != n) throw ConfigurationError("spectrum length does not match grid");
  ComplexTrace work(n);
  for (std::size_t k = 0; k < n; ++k) work[k] = (k % 2 == 0) ? spectrum[k] : -spectrum[k];
  ComplexTrace out(n);
  fft_for(n).forward(work, out);
  const double scale = grid.domega() / (2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < n; ++j) out[j] *= (j % 2 == 0) ? scale : -scale;
  return out;
}

ComplexTrace to_frequency_domain(const SpectralGrid& grid, std::span<const cplx> trace) {
  const std::size_t n = grid.size();
  if (trace.size() != n) throw ConfigurationError("trace length does not match grid");
  ComplexTrace work(n);
  for (std::size_t j = 0; j < n; ++j) work[j] = (j % 2 == 0) ? trace[j] : -trace[j];
  ComplexTrace out(n);
  fft_for(n).backward(work, out);
  const double scale = grid.dt();
  for (std::size_t k = 0; k < n; ++k) out[k] *= (k % 2 == 0) ? scale : -scale;
  return out;
}

CorrelationTrace spectrum_to_correlation(const SpectralGrid& grid, std::span<const cplx> spectrum,
                                         CorrelationKind kind) {
  return CorrelationTrace{grid, to_lag_domain(grid, spectrum), kind};
}

CorrelationTrace spectrum_to_correlation(const SpectralGrid& grid, std::span<const double> spectrum,
                                         CorrelationKind kind) {
  ComplexTrace promoted(spectrum.begin(), spectrum.end());
  return spectrum_to_correlation(grid, promoted, kind);
}

ComplexTrace correlation_to_spectrum(const CorrelationTrace& trace) {
  return to_frequency_domain(trace.grid, trace.values);
}

}  // namespace dispcancel
