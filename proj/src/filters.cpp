#include "dispcancel/filters.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dispcancel/errors.hpp"

namespace dispcancel {

FilterPair FilterPair::balanced(double beta, double omega0) {
  FilterPair pair;
  pair.signal.beta = beta;
  pair.reference.beta = -beta;
  pair.signal.omega0 = omega0;
  pair.reference.omega0 = omega0;
  return pair;
}

cplx filter_response(const DispersiveFilter& f, double omega) {
  return std::polar(1.0, f.omega0 * f.tau_p) * std::polar(1.0, -(omega * f.tau_g + omega * omega * f.beta));
}

SampledSpectra propagate_spectra(const SampledSpectra& input, const FilterPair& pair) {
  const std::size_t n = input.grid.size();
  if (input.ss.size() != n || input.rr.size() != n || input.sr.size() != n) {
    throw ConfigurationError("spectra are not sampled on a common grid");
  }
  if (pair.signal.omega0 != pair.reference.omega0) {
    throw ConfigurationError("signal and reference filters must share omega0");
  }
  SampledSpectra out = input;
  const auto& s = pair.signal;
  const auto& r = pair.reference;
  // H_S(-w) H_R(w) with the exponents combined before exponentiating, so a
  // balanced pair cancels exactly instead of through two large phases.
  const double constant = s.omega0 * (s.tau_p + r.tau_p);
  const double linear = s.tau_g - r.tau_g;
  const double quadratic = s.beta + r.beta;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = input.grid.omega(k);
    out.sr[k] *= std::polar(1.0, constant + w * linear - w * w * quadratic);
  }
  return out;
}

Detector Detector::gaussian(double response_time, double eta, double q) {
  Detector d{eta, response_time, q};
  validate(d);
  return d;
}

Detector Detector::instantaneous(double eta, double q) {
  Detector d{eta, std::nullopt, q};
  validate(d);
  return d;
}

void validate(const Detector& d) {
  if (!(d.eta > 0.0 && d.eta <= 1.0)) throw DomainError("quantum efficiency eta must lie in (0, 1]");
  if (!(d.q > 0.0) || !std::isfinite(d.q)) throw DomainError("charge scale q must be positive");
  if (d.response_time && (!(*d.response_time > 0.0) || !std::isfinite(*d.response_time))) {
    throw DomainError("detector response time Tg must be positive");
  }
}

double detector_impulse(const Detector& d, double t) {
  const double tg = d.response_time.value();
  return std::exp(-t * t / (tg * tg)) / std::sqrt(std::numbers::pi * tg * tg);
}

DetectorKernel detector_rgg(const Detector& d, const SpectralGrid& grid) {
  validate(d);
  if (d.ideal()) return DetectorKernel{grid, true, {}};
  const double tg = *d.response_time;
  if (grid.dt() > tg / 8.0) {
    std::ostringstream msg;
    msg << "detector response under-resolved: Tg/dt = " << tg / grid.dt() << " < 8";
    throw ConfigurationError(msg.str());
  }
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * tg * tg);
  RealTrace values(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.tau(j);
    values[j] = norm * std::exp(-t * t / (2.0 * tg * tg));
  }
  return DetectorKernel{grid, false, std::move(values)};
}

RealTrace convolve(const RealTrace& f, const DetectorKernel& kernel) {
  if (kernel.delta) return f;
  const SpectralGrid& grid = kernel.grid;
  const std::size_t n = grid.size();
  if (f.size() != n || kernel.values.size() != n) {
    throw ConfigurationError("convolution operands are not on a common grid");
  }
  const ComplexTrace fs = to_frequency_domain(grid, ComplexTrace(f.begin(), f.end()));
  const ComplexTrace ks =
      to_frequency_domain(grid, ComplexTrace(kernel.values.begin(), kernel.values.end()));
  ComplexTrace product(n);
  for (std::size_t k = 0; k < n; ++k) product[k] = fs[k] * ks[k];
  const ComplexTrace back = to_lag_domain(grid, product);
  RealTrace out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = back[j].real();
  return out;
}

}  // namespace dispcancel
