#include "dispcancel/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "dispcancel/errors.hpp"

namespace dispcancel {

SpectralGrid::SpectralGrid(std::size_t n, double dt) : n_(n), dt_(dt) {
  if (n < 16 || !std::has_single_bit(n)) {
    throw DomainError("grid size must be a power of two >= 16 (got " + std::to_string(n) + ")");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("grid step dt must be positive and finite");
  }
}

double SpectralGrid::domega() const noexcept { return 2.0 * std::numbers::pi / duration(); }

double SpectralGrid::nyquist() const noexcept { return std::numbers::pi / dt_; }

std::vector<double> SpectralGrid::taus() const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = tau(j);
  return out;
}

std::vector<double> SpectralGrid::omegas() const {
  std::vector<double> out(n_);
  for (std::size_t k = 0; k < n_; ++k) out[k] = omega(k);
  return out;
}

}  // namespace dispcancel
