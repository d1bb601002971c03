#include "dispcancel/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dispcancel/config.hpp"
#include "dispcancel/errors.hpp"
#include "dispcancel/fft.hpp"
#include "dispcancel/parallel.hpp"

namespace dispcancel {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Coefficients c_k of E(t_j) = sum_k c_k exp(-i w_k t_j), t_j = j dt.
ComplexTrace coefficients_to_field(const SpectralGrid& grid, const ComplexTrace& coeffs) {
  const std::size_t n = grid.size();
  ComplexTrace field(n);
  fft_for(n).forward(coeffs, field);
  for (std::size_t j = 1; j < n; j += 2) field[j] = -field[j];
  return field;
}

ComplexTrace field_to_coefficients(const SpectralGrid& grid, const ComplexTrace& field) {
  const std::size_t n = grid.size();
  ComplexTrace work(field);
  for (std::size_t j = 1; j < n; j += 2) work[j] = -work[j];
  ComplexTrace coeffs(n);
  fft_for(n).backward(work, coeffs);
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& c : coeffs) c *= inv;
  return coeffs;
}

ComplexTrace filter_arm(const SpectralGrid& grid, const ComplexTrace& field,
                        const DispersiveFilter& filter) {
  if (filter.is_identity()) return field;
  ComplexTrace coeffs = field_to_coefficients(grid, field);
  // A component exp(-i w t) leaves the filter scaled by H(-w).
  for (std::size_t k = 0; k < grid.size(); ++k) coeffs[k] *= filter_response(filter, -grid.omega(k));
  return coefficients_to_field(grid, coeffs);
}

// Running per-lag mean and sum of squared deviations, merged in a fixed order.
struct Moments {
  double count = 0.0;
  std::vector<double> mean;
  std::vector<double> m2;

  explicit Moments(std::size_t lags) : mean(lags, 0.0), m2(lags, 0.0) {}

  void add(const std::vector<double>& x) {
    count += 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double delta = x[i] - mean[i];
      mean[i] += delta / count;
      m2[i] += delta * (x[i] - mean[i]);
    }
  }

  void merge(const Moments& other) {
    if (other.count == 0.0) return;
    const double total = count + other.count;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double delta = other.mean[i] - mean[i];
      mean[i] += delta * other.count / total;
      m2[i] += other.m2[i] + delta * delta * count * other.count / total;
    }
    count = total;
  }
};

}  // namespace

void validate(const MCConfig& config) {
  if (config.trials == 0) throw DomainError("Monte Carlo needs at least one trial");
  if (!(config.burn_margin >= 0.0 && config.burn_margin <= 0.25)) {
    throw DomainError("burn_margin must lie in [0, 0.25]");
  }
}

std::uint64_t RngStream::derive_seed(std::uint64_t master_seed, std::uint64_t trial,
                                     Purpose purpose) {
  std::uint64_t x = splitmix64(master_seed);
  x = splitmix64(x ^ splitmix64(trial));
  return splitmix64(x ^ static_cast<std::uint64_t>(purpose));
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t trial, Purpose purpose)
    : engine_(derive_seed(master_seed, trial, purpose)) {}

RngStream::RngStream(std::uint64_t engine_seed) : engine_(engine_seed) {}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

SpectralSynthesizer::SpectralSynthesizer(const JointGaussianSource& source,
                                         const SpectralGrid& grid, double tol)
    : grid_(grid), factors_(grid.size()) {
  const StateClass state = classify_state(source, grid, tol);
  if (!admits_semiclassical(state.label)) {
    std::ostringstream msg;
    msg << "semiclassical gate: source is " << to_string(state.label)
        << "; |S_SR|^2 exceeds the classical bound S_SS(w) S_RR(-w) by a normalized margin of "
        << state.worst_margin << " at w = " << state.worst_omega << " rad/s";
    throw SemiclassicalError(msg.str());
  }
  const double bin = grid.domega() / (2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = grid.omega(k);
    // Pair (A_k, conj B_{-k}); see field_to_coefficients for the convention.
    const double a = source.at(-w).ss * bin;
    const SpectralTriple here = source.at(w);
    const double b = here.rr * bin;
    const cplx c = here.sr * bin;
    BinFactor f;
    if (a > 0.0) {
      f.l11 = std::sqrt(a);
      f.l21 = std::conj(c) / f.l11;
      const double explained = std::norm(f.l21);  // |c|^2 / a without underflow
      double rest = b - explained;
      // A residual at roundoff level is a rank-one bin; its square root would
      // otherwise inject noise of order sqrt(eps) into the second arm.
      if (std::abs(rest) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(b, explained)) {
        rest = 0.0;
      }
      if (rest < 0.0) {
        if (rest < -tol * std::max(b, explained)) {
          std::ostringstream msg;
          msg << "bin covariance at w = " << w << " rad/s is not positive semidefinite";
          throw FactorizationError(msg.str());
        }
        rest = 0.0;
      }
      f.l22 = std::sqrt(rest);
    } else {
      if (std::norm(c) > 0.0) {
        std::ostringstream msg;
        msg << "bin covariance at w = " << w << " rad/s has cross power without signal power";
        throw FactorizationError(msg.str());
      }
      f.l22 = std::sqrt(b);
    }
    factors_[k] = f;
  }
}

FieldRealization SpectralSynthesizer::draw(RngStream& rng) const {
  const std::size_t n = grid_.size();
  ComplexTrace a(n), b(n);
  const double r = std::sqrt(0.5);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx z1(r * rng.normal(), r * rng.normal());
    const cplx z2(r * rng.normal(), r * rng.normal());
    const BinFactor& f = factors_[k];
    a[k] = f.l11 * z1;
    b[grid_.mirror(k)] = std::conj(f.l21 * z1 + f.l22 * z2);
  }
  return FieldRealization{grid_, coefficients_to_field(grid_, a), coefficients_to_field(grid_, b)};
}

FieldRealization synthesize_fields(const JointGaussianSource& source, const SpectralGrid& grid,
                                   RngStream& rng) {
  return SpectralSynthesizer(source, grid).draw(rng);
}

FieldRealization apply_filter(const FieldRealization& fields, const FilterPair& pair) {
  if (pair.signal.omega0 != pair.reference.omega0) {
    throw ConfigurationError("signal and reference filters must share omega0");
  }
  return FieldRealization{fields.grid, filter_arm(fields.grid, fields.signal, pair.signal),
                          filter_arm(fields.grid, fields.reference, pair.reference)};
}

EventTrain detect(const ComplexTrace& field, const SpectralGrid& grid, const Detector& detector,
                  RngStream& rng) {
  validate(detector);
  const std::size_t n = grid.size();
  if (field.size() != n) throw ConfigurationError("field length does not match grid");
  RealTrace rate(n);
  double peak = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    rate[j] = detector.eta * std::norm(field[j]);
    peak = std::max(peak, rate[j]);
  }
  if (peak * grid.dt() > 0.1) {
    std::ostringstream msg;
    msg << "rate resolution violated: max(mu) dt = " << peak * grid.dt() << " > 0.1";
    throw ConfigurationError(msg.str());
  }
  EventTrain train;
  if (peak == 0.0) return train;

  const double duration = grid.duration();
  const std::uint64_t candidates = rng.poisson(peak * duration);
  train.times.reserve(static_cast<std::size_t>(candidates));
  for (std::uint64_t i = 0; i < candidates; ++i) {
    const double t = rng.uniform() * duration;
    const double accept = rng.uniform();
    const auto bin = std::min<std::size_t>(static_cast<std::size_t>(t / grid.dt()), n - 1);
    if (accept * peak < rate[bin]) train.times.push_back(t);
  }
  std::sort(train.times.begin(), train.times.end());
  train.times.erase(std::unique(train.times.begin(), train.times.end()), train.times.end());
  return train;
}

RealTrace photocurrent(const EventTrain& events, const Detector& detector, const SpectralGrid& grid) {
  validate(detector);
  const std::size_t n = grid.size();
  const double dt = grid.dt();
  RealTrace current(n, 0.0);
  if (detector.ideal()) {
    for (double t : events.times) {
      const auto bin = std::min<std::size_t>(static_cast<std::size_t>(t / dt), n - 1);
      current[bin] += detector.q / dt;
    }
    return current;
  }
  const double tg = *detector.response_time;
  const double duration = grid.duration();
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(8.0 * tg / dt));
  const auto span = std::min<std::ptrdiff_t>(reach, static_cast<std::ptrdiff_t>(n / 2));
  for (double t : events.times) {
    const auto centre = static_cast<std::ptrdiff_t>(std::floor(t / dt));
    for (std::ptrdiff_t off = -span; off <= span; ++off) {
      const std::ptrdiff_t raw = centre + off;
      const auto j = static_cast<std::size_t>(((raw % static_cast<std::ptrdiff_t>(n)) +
                                               static_cast<std::ptrdiff_t>(n)) %
                                              static_cast<std::ptrdiff_t>(n));
      double d = static_cast<double>(j) * dt - t;
      d -= duration * std::round(d / duration);
      current[j] += detector.q * detector_impulse(detector, d);
    }
  }
  return current;
}

MCEstimate estimate_C(const MCConfig& config, const Scenario& scenario) {
  validate(config);
  validate(scenario.detector);
  const SpectralGrid& grid = config.grid;
  const std::size_t n = grid.size();
  if (!scenario.detector.ideal()) (void)detector_rgg(scenario.detector, grid);  // resolution check

  const SpectralSynthesizer synth(scenario.source, grid);

  const std::size_t first = grid.window_first();
  const std::size_t lags = grid.window_last() - first + 1;
  const auto burn = static_cast<std::size_t>(std::floor(config.burn_margin * static_cast<double>(n)));
  const std::size_t kept = n - 2 * burn;

  // Trial partition depends only on the trial count, so the merged moments
  // are identical for any number of worker threads.
  constexpr std::size_t kMaxBlocks = 64;
  const std::size_t block_size = (config.trials + kMaxBlocks - 1) / kMaxBlocks;
  const std::size_t blocks = (config.trials + block_size - 1) / block_size;
  std::vector<Moments> partial(blocks, Moments(lags));
  std::vector<std::uint64_t> events_s(blocks, 0), events_r(blocks, 0);

  parallel_for(
      blocks,
      [&](std::size_t b) {
        const std::size_t begin = b * block_size;
        const std::size_t end = std::min(config.trials, begin + block_size);
        std::vector<double> sample(lags);
        ComplexTrace xs(n), ys(n), spec_s(n), spec_r(n), prod(n), corr(n);
        for (std::size_t trial = begin; trial < end; ++trial) {
          RngStream field_rng(config.seed, trial, RngStream::Purpose::fields);
          RngStream det_s(config.seed, trial, RngStream::Purpose::detect_signal);
          RngStream det_r(config.seed, trial, RngStream::Purpose::detect_reference);
          const FieldRealization fields = apply_filter(synth.draw(field_rng), scenario.filters);
          EventTrain ev_s = detect(fields.signal, grid, scenario.detector, det_s);
          EventTrain ev_r = detect(fields.reference, grid, scenario.detector, det_r);
          events_s[b] += ev_s.times.size();
          events_r[b] += ev_r.times.size();
          const RealTrace i_s = photocurrent(ev_s, scenario.detector, grid);
          const RealTrace i_r = photocurrent(ev_r, scenario.detector, grid);

          // corr[m] = sum_{j in window} i_S[(j + m) mod n] i_R[j]
          for (std::size_t j = 0; j < n; ++j) {
            xs[j] = i_s[j];
            ys[j] = (j >= burn && j < n - burn) ? i_r[j] : 0.0;
          }
          Fft& fft = fft_for(n);
          fft.forward(xs, spec_s);
          fft.forward(ys, spec_r);
          for (std::size_t k = 0; k < n; ++k) prod[k] = spec_s[k] * std::conj(spec_r[k]);
          fft.backward(prod, corr);
          const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(kept));
          for (std::size_t i = 0; i < lags; ++i) {
            const std::size_t j = first + i;  // lag m = j - n/2
            const std::size_t m = (j + n - n / 2) % n;
            sample[i] = corr[m].real() * norm;
          }
          partial[b].add(sample);
        }
      },
      config.threads);

  Moments total(lags);
  std::uint64_t total_s = 0, total_r = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    total.merge(partial[b]);
    total_s += events_s[b];
    total_r += events_r[b];
  }

  MCEstimate est;
  est.grid = grid;
  est.trials = config.trials;
  est.tau.resize(lags);
  est.c = total.mean;
  est.standard_error.resize(lags);
  for (std::size_t i = 0; i < lags; ++i) {
    est.tau[i] = grid.tau(first + i);
    est.standard_error[i] =
        config.trials > 1
            ? std::sqrt(total.m2[i] / (total.count - 1.0) / total.count)
            : 0.0;
  }

  const SampledSpectra spectra = sample_spectra(scenario.source, grid);
  double kss0 = 0.0, krr0 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    kss0 += spectra.ss[k];
    krr0 += spectra.rr[k];
  }
  const double bin = grid.domega() / (2.0 * std::numbers::pi);
  const Detector& d = scenario.detector;
  est.c_acc = d.q * d.q * d.eta * d.eta * kss0 * bin * krr0 * bin;
  est.c_dc.resize(lags);
  for (std::size_t i = 0; i < lags; ++i) est.c_dc[i] = est.c[i] - est.c_acc;

  const double trials = static_cast<double>(config.trials);
  est.mean_events_signal = static_cast<double>(total_s) / trials;
  est.mean_events_reference = static_cast<double>(total_r) / trials;
  est.mean_events_per_response_time =
      d.ideal() ? std::numeric_limits<double>::quiet_NaN()
                : 0.5 * (est.mean_events_signal + est.mean_events_reference) / grid.duration() *
                      *d.response_time;
  if (std::min(est.mean_events_signal, est.mean_events_reference) < 10.0) {
    est.warnings.push_back("insufficient events: fewer than 10 detections per trial on average");
  }
  if (config.trials == 1) {
    est.warnings.push_back("single trial: standard error not estimable, reported as 0");
  }
  return est;
}

MCRun mc_run(const MCConfig& config, const Scenario& scenario) {
  MCRun run{estimate_C(config, scenario), {}};
  MonteCarloBlock block{config.trials, config.seed, config.burn_margin};
  ScenarioConfig echo{scenario.source, scenario.filters, scenario.detector, config.grid, block};
  run.report = make_report("montecarlo", scenario_to_json(echo));
  run.report.seed = config.seed;
  run.report.c_acc = run.estimate.c_acc;
  run.report.classification = classify_state(scenario.source, config.grid);
  run.report.warnings = run.estimate.warnings;
  run.report.extra = {{"trials", config.trials},
                      {"mean_events_signal", run.estimate.mean_events_signal},
                      {"mean_events_reference", run.estimate.mean_events_reference}};
  if (!scenario.detector.ideal()) {
    run.report.extra["mean_events_per_Tg"] = run.estimate.mean_events_per_response_time;
  }
  return run;
}

}  // namespace dispcancel
