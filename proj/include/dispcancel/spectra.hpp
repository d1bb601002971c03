#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "dispcancel/grid.hpp"

namespace dispcancel {

// Normally-ordered auto-spectra S_SS(w), S_RR(w) and the phase-sensitive
// cross spectrum S_SR(w) of a zero-mean stationary jointly Gaussian state.
// All spectra are dimensionless (photons per mode).
struct SpectralTriple {
  double ss = 0.0;
  double rr = 0.0;
  cplx sr{};
};

enum class GaussianKind { quantum, classical };

SpectralTriple eval_gaussian_source(double flux, double coherence_time, GaussianKind kind,
                                    double omega);
SpectralTriple eval_rect_noise_source(double flux, double half_bandwidth, double gain,
                                      double omega);
SpectralTriple eval_sinc_source(double gain_amplitude, double mismatch_time, double omega);

struct GaussianParams {
  double flux = 0.0;            // P, photons/s
  double coherence_time = 0.0;  // T0, s
  GaussianKind kind = GaussianKind::quantum;
  bool operator==(const GaussianParams&) const = default;
};

// Bandlimited downconverter output after a loss/amplifier chain of gain G.
struct RectNoiseParams {
  double flux = 0.0;            // P, photons/s
  double half_bandwidth = 0.0;  // Omega, rad/s
  double gain = 1.0;            // G >= 1
  bool operator==(const RectNoiseParams&) const = default;
};

// Type-II downconverter with timing compensation, low-brightness regime.
struct SincParams {
  double gain_amplitude = 0.0;  // g0 = gamma |E_P| l
  double mismatch_time = 0.0;   // Dl = Delta k' l, s
  bool operator==(const SincParams&) const = default;
};

// Linearly interpolated on demand; zero outside [omega.front(), omega.back()].
struct TabulatedSpectra {
  std::vector<double> omega;
  std::vector<double> ss;
  std::vector<double> rr;
  std::vector<double> sr_re;
  std::vector<double> sr_im;
  bool operator==(const TabulatedSpectra&) const = default;
};

enum class SourceFamily {
  gaussian_quantum,
  gaussian_classical,
  rect_noise,
  sinc_downconverter,
  custom_tabulated
};

std::string_view to_string(SourceFamily family);
std::optional<SourceFamily> parse_family(std::string_view name);

class JointGaussianSource {
 public:
  using Params = std::variant<GaussianParams, RectNoiseParams, SincParams, TabulatedSpectra>;

  // Throws DomainError when a parameter is outside the family's range.
  explicit JointGaussianSource(Params params, double pump_phase = 0.0);

  static JointGaussianSource gaussian(double flux, double coherence_time, GaussianKind kind);
  static JointGaussianSource rect_noise(double flux, double half_bandwidth, double gain);
  static JointGaussianSource sinc(double gain_amplitude, double mismatch_time);
  static JointGaussianSource tabulated(TabulatedSpectra table);

  SourceFamily family() const;
  const Params& params() const noexcept { return params_; }
  // Rotates S_SR by exp(i phase); only |S_SR| enters photocurrent statistics.
  double pump_phase() const noexcept { return pump_phase_; }

  SpectralTriple at(double omega) const;

  // Characteristic width of the correlation functions, used by the
  // grid-adequacy rules.
  double coherence_time() const;
  // Half-width of a hard spectral support, +inf for unbounded families.
  double support() const;
  // Spectral width scale for unbounded families (rad/s).
  double spectral_width() const;

  bool operator==(const JointGaussianSource&) const = default;

 private:
  Params params_;
  double pump_phase_ = 0.0;
};

struct SampledSpectra {
  SpectralGrid grid;
  RealTrace ss;
  RealTrace rr;
  ComplexTrace sr;
};

SampledSpectra sample_spectra(const JointGaussianSource& source, const SpectralGrid& grid);

enum class StateLabel {
  maximally_entangled,
  nonclassical,
  classical_maximally_correlated,
  classical,
  invalid
};

std::string_view to_string(StateLabel label);

struct StateClass {
  StateLabel label = StateLabel::classical;
  // Largest normalized excess |S_SR|^2 / bound - 1 over the supported bins,
  // against the quantum bound for maximally_entangled/invalid and against
  // the classical bound otherwise.
  double worst_margin = 0.0;
  double worst_omega = 0.0;
};

inline constexpr double kDefaultSaturationTolerance = 1e-9;
// Bins whose auto-spectrum is below this fraction of the peak are left out
// of the saturation tests.
inline constexpr double kSupportFloor = 1e-12;

// Throws ConfigurationError when the grid's Nyquist span cannot hold the
// source's spectral support.
StateClass classify_state(const JointGaussianSource& source, const SpectralGrid& grid,
                          double tol = kDefaultSaturationTolerance);

// True for the labels whose statistics semiclassical photodetection reproduces.
bool admits_semiclassical(StateLabel label);

enum class CorrelationKind { auto_signal, auto_reference, cross_phase_sensitive };

struct CorrelationTrace {
  SpectralGrid grid;
  ComplexTrace values;  // K(tau_j), j = 0..n-1
  CorrelationKind kind = CorrelationKind::cross_phase_sensitive;
};

// K(tau) = int dw/2pi S(w) exp(-i w tau), discretized on the grid.
CorrelationTrace spectrum_to_correlation(const SpectralGrid& grid, std::span<const cplx> spectrum,
                                         CorrelationKind kind);
CorrelationTrace spectrum_to_correlation(const SpectralGrid& grid, std::span<const double> spectrum,
                                         CorrelationKind kind);
// S(w) = int dtau K(tau) exp(i w tau); exact inverse of the above.
ComplexTrace correlation_to_spectrum(const CorrelationTrace& trace);

// Same transforms on bare sample arrays.
ComplexTrace to_lag_domain(const SpectralGrid& grid, std::span<const cplx> spectrum);
ComplexTrace to_frequency_domain(const SpectralGrid& grid, std::span<const cplx> trace);

}  // namespace dispcancel
