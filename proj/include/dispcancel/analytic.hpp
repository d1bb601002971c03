#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dispcancel/filters.hpp"
#include "dispcancel/grid.hpp"
#include "dispcancel/spectra.hpp"

namespace dispcancel {

// Ensemble-average photocurrent cross-correlation C(tau) = <i_S(t+tau) i_R(t)>,
// reported on the grid's central window tau in [-T/4, T/4].
struct CrossCorrResult {
  SpectralGrid grid;
  std::vector<double> tau;
  std::vector<double> c;
  std::vector<double> c_dc;  // c - c_acc
  double c_acc = 0.0;        // accidental coincidences
};

struct Scenario {
  JointGaussianSource source;
  FilterPair filters;
  Detector detector;
  SpectralGrid grid;
};

// Requires T >= 16 max(t_c, T_g) and dt <= min(t_c, T_g)/16 where t_c is the
// source coherence time, plus Nyquist >= the source's spectral support.
// Throws ConfigurationError naming the violated ratio.
void check_grid_adequacy(const JointGaussianSource& source, const Detector& detector,
                         const SpectralGrid& grid);

// Propagates the source spectra through the filters and evaluates
// q^2 eta^2 [K_SS(0) K_RR(0) + (|K_SR|^2 * R_gg)(tau)] numerically.
CrossCorrResult cross_correlation(const JointGaussianSource& source, const FilterPair& pair,
                                  const Detector& detector, const SpectralGrid& grid);
CrossCorrResult cross_correlation(const Scenario& scenario);

// Closed forms for the Gaussian families (any T_g; ideal detector uses T_g = 0).
CrossCorrResult closed_form_gaussian(double flux, double coherence_time, const Detector& detector,
                                     GaussianKind kind, const SpectralGrid& grid);

// Fast-detector closed form for the bandlimited additive-noise source.
// Throws UnsupportedError for a non-ideal detector.
CrossCorrResult closed_form_rect_noise(double flux, double half_bandwidth, double gain,
                                       const Detector& detector, const SpectralGrid& grid);

// max_tau C_dc(tau) / C_acc; throws DegenerateSourceError when C_acc = 0.
double contrast(const CrossCorrResult& result);

// Gain at which the additive-noise source saturates the classical bound.
double critical_gain(double flux, double half_bandwidth);

// Fast-detector contrast of the additive-noise source.
double contrast_rect(double flux, double half_bandwidth, double gain);

// Full width at half maximum of C_dc around its global peak, linearly
// interpolated. Throws WidthUndefinedError if either half crossing is missing.
double signature_width(const CrossCorrResult& result);

struct SweepRow {
  double parameter = 0.0;  // beta_S for dispersion sweeps, G for gain sweeps
  double parameter2 = 0.0;  // beta_R for dispersion sweeps
  double contrast = 0.0;
  double fwhm = 0.0;
  double c_acc = 0.0;
  double peak_c_dc = 0.0;
  std::optional<StateLabel> label;
};

using SweepTable = std::vector<SweepRow>;

// One row per (beta_S, beta_R); rows sorted by (beta_S, beta_R). Rows may be
// evaluated concurrently.
SweepTable dispersion_sweep(const Scenario& scenario,
                            std::vector<std::pair<double, double>> betas);

// Rows sorted by G, each labelled by classify_state on `label_grid`.
SweepTable gain_sweep(double flux, double half_bandwidth, std::vector<double> gains,
                      const SpectralGrid& label_grid, double q = 1.0, double eta = 1.0);

// max_tau |C_q(tau) - C_c(tau)| / C_c(tau) from the Gaussian closed forms.
// response_time = 0 means an ideal detector.
double high_brightness_delta(double flux, double coherence_time, double response_time);

// Smallest positive x with (sin x / x)^2 = 1/2.
double sinc_squared_half_point();

}  // namespace dispcancel
