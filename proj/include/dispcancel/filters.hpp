#pragma once

#include <optional>

#include "dispcancel/grid.hpp"
#include "dispcancel/spectra.hpp"

namespace dispcancel {

// Lossless dispersive element H(w) = exp(i w0 tau_p) exp(-i (w tau_g + w^2 beta)).
struct DispersiveFilter {
  double tau_p = 0.0;   // phase delay, s
  double tau_g = 0.0;   // group delay, s
  double beta = 0.0;    // dispersion coefficient, s^2
  double omega0 = 0.0;  // optical center frequency, rad/s
  bool operator==(const DispersiveFilter&) const = default;
  bool is_identity() const { return tau_p == 0.0 && tau_g == 0.0 && beta == 0.0; }
};

struct FilterPair {
  DispersiveFilter signal;
  DispersiveFilter reference;
  bool operator==(const FilterPair&) const = default;

  // beta_S = beta, beta_R = -beta, zero delays.
  static FilterPair balanced(double beta, double omega0 = 0.0);
};

cplx filter_response(const DispersiveFilter& filter, double omega);

// Auto-spectra pass through unchanged (|H| = 1); the cross spectrum is
// multiplied by H_S(-w) H_R(w). Throws ConfigurationError when the two arms
// disagree on omega0 or the sample arrays do not match the grid.
SampledSpectra propagate_spectra(const SampledSpectra& input, const FilterPair& pair);

struct Detector {
  double eta = 1.0;                  // quantum efficiency in (0, 1]
  std::optional<double> response_time;  // Gaussian T_g in s; empty = ideal (instantaneous)
  double q = 1.0;                    // charge scale

  bool ideal() const noexcept { return !response_time.has_value(); }
  bool operator==(const Detector&) const = default;

  static Detector gaussian(double response_time, double eta = 1.0, double q = 1.0);
  static Detector instantaneous(double eta = 1.0, double q = 1.0);
};

// Throws DomainError on eta outside (0, 1], nonpositive T_g or q.
void validate(const Detector& detector);

// g(t) = exp(-t^2/T_g^2) / sqrt(pi T_g^2); only meaningful for Gaussian detectors.
double detector_impulse(const Detector& detector, double t);

// R_gg(tau) = int dt g(t + tau) g(t). The ideal detector is a flagged delta:
// convolving with it is the identity and `values` is empty.
struct DetectorKernel {
  SpectralGrid grid;
  bool delta = false;
  RealTrace values;
};

// Throws ConfigurationError when dt > T_g / 8.
DetectorKernel detector_rgg(const Detector& detector, const SpectralGrid& grid);

// (f * R_gg)(tau) = int dz f(z) R_gg(tau - z), circular on the grid.
RealTrace convolve(const RealTrace& f, const DetectorKernel& kernel);

}  // namespace dispcancel
