#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace dispcancel {

using cplx = std::complex<double>;
using ComplexTrace = std::vector<cplx>;
using RealTrace = std::vector<double>;

// Uniform, centered sampling of both the lag axis and the angular-frequency
// axis. Sample j sits at tau_j = (j - n/2) dt and bin k at
// omega_k = (k - n/2) domega, so bin k and bin (n - k) mod n are mirror
// images; bin 0 (-Nyquist) is its own mirror.
class SpectralGrid {
 public:
  SpectralGrid() : SpectralGrid(16, 1.0) {}
  SpectralGrid(std::size_t n, double dt);

  std::size_t size() const noexcept { return n_; }
  double dt() const noexcept { return dt_; }
  double duration() const noexcept { return static_cast<double>(n_) * dt_; }
  double domega() const noexcept;
  double nyquist() const noexcept;

  double tau(std::size_t j) const noexcept {
    return (static_cast<double>(j) - static_cast<double>(n_ / 2)) * dt_;
  }
  double omega(std::size_t k) const noexcept {
    return (static_cast<double>(k) - static_cast<double>(n_ / 2)) * domega();
  }
  std::size_t mirror(std::size_t k) const noexcept { return (n_ - k) % n_; }
  std::size_t center() const noexcept { return n_ / 2; }

  // Index range [first, last] covering tau in [-T/4, T/4]; reported traces
  // are restricted to it so circular wraparound stays out of view.
  std::size_t window_first() const noexcept { return n_ / 4; }
  std::size_t window_last() const noexcept { return 3 * n_ / 4; }

  std::vector<double> taus() const;
  std::vector<double> omegas() const;

  bool operator==(const SpectralGrid&) const = default;

 private:
  std::size_t n_;
  double dt_;
};

}  // namespace dispcancel
