#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dispcancel/analytic.hpp"
#include "dispcancel/filters.hpp"
#include "dispcancel/grid.hpp"
#include "dispcancel/report.hpp"
#include "dispcancel/spectra.hpp"

namespace dispcancel {

struct MCConfig {
  std::size_t trials = 1;
  SpectralGrid grid;            // one realization spans T = n dt
  std::uint64_t seed = 0;
  double burn_margin = 0.1;     // fraction of T dropped at each end of the correlator window
  std::size_t threads = 0;      // 0 = thread_cap()
};

// Throws DomainError on trials == 0 or burn_margin outside [0, 0.25].
void validate(const MCConfig& config);

// Per-trial random stream. The engine seed is a SplitMix64 hash of
// (master seed, trial index, purpose), so a trial's draws never depend on
// which thread runs it or on the order trials are scheduled in.
class RngStream {
 public:
  enum class Purpose : std::uint64_t { fields = 0, detect_signal = 1, detect_reference = 2 };

  RngStream(std::uint64_t master_seed, std::uint64_t trial, Purpose purpose);
  explicit RngStream(std::uint64_t engine_seed);

  static std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial, Purpose purpose);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t poisson(double mean);
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Classical baseband fields on t_j = j dt, j = 0..n-1 (units sqrt(photons/s)).
struct FieldRealization {
  SpectralGrid grid;
  ComplexTrace signal;
  ComplexTrace reference;
};

// Circular spectral synthesis of jointly Gaussian classical fields whose
// exact (infinite-trial) correlations equal the source's K functions on the
// periodic domain. Construction classifies the source and factorizes the
// per-bin 2x2 covariances once; draw() is then cheap and const.
class SpectralSynthesizer {
 public:
  // Throws SemiclassicalError for states without a proper P representation
  // and FactorizationError for a non-PSD bin covariance.
  SpectralSynthesizer(const JointGaussianSource& source, const SpectralGrid& grid,
                      double tol = kDefaultSaturationTolerance);

  FieldRealization draw(RngStream& rng) const;
  const SpectralGrid& grid() const noexcept { return grid_; }

 private:
  struct BinFactor {
    double l11 = 0.0;
    cplx l21{};
    double l22 = 0.0;
  };
  SpectralGrid grid_;
  std::vector<BinFactor> factors_;
};

FieldRealization synthesize_fields(const JointGaussianSource& source, const SpectralGrid& grid,
                                   RngStream& rng);

// Multiplies each field by its arm's frequency response (circular convolution).
FieldRealization apply_filter(const FieldRealization& fields, const FilterPair& pair);

enum class Arm { signal, reference };

struct EventTrain {
  std::vector<double> times;  // strictly increasing, within [0, T)
  Arm arm = Arm::signal;
  std::size_t trial = 0;
};

// Inhomogeneous Poisson events with rate eta |E(t)|^2 (piecewise constant
// over each sample interval), drawn by thinning a homogeneous process at the
// realization's peak rate. Throws ConfigurationError when max(rate) dt > 0.1.
EventTrain detect(const ComplexTrace& field, const SpectralGrid& grid, const Detector& detector,
                  RngStream& rng);

// i(t_j) = q sum_n g(t_j - t_n) with circular time differences; an ideal
// detector deposits q/dt in the bin containing each event.
RealTrace photocurrent(const EventTrain& events, const Detector& detector, const SpectralGrid& grid);

struct MCEstimate {
  SpectralGrid grid;
  std::vector<double> tau;             // lags in [-T/4, T/4]
  std::vector<double> c;               // trial mean of the time-averaged product
  std::vector<double> standard_error;  // sample std / sqrt(trials)
  std::vector<double> c_dc;            // c - c_acc
  double c_acc = 0.0;                  // q^2 eta^2 K_SS(0) K_RR(0) of the source
  std::size_t trials = 0;
  double mean_events_signal = 0.0;
  double mean_events_reference = 0.0;
  double mean_events_per_response_time = 0.0;  // NaN for ideal detectors
  std::vector<std::string> warnings;
};

MCEstimate estimate_C(const MCConfig& config, const Scenario& scenario);

struct MCRun {
  MCEstimate estimate;
  ReportRecord report;
};

MCRun mc_run(const MCConfig& config, const Scenario& scenario);

}  // namespace dispcancel
