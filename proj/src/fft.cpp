#include "dispcancel/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "dispcancel/errors.hpp"

namespace dispcancel {
namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  buffer_in_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
  buffer_out_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (buffer_in_ == nullptr || buffer_out_ == nullptr) throw std::bad_alloc();
  auto* in = reinterpret_cast<fftw_complex*>(buffer_in_);
  auto* out = reinterpret_cast<fftw_complex*>(buffer_out_);
  std::lock_guard lock(planner_mutex());
  plan_forward_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_backward_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  }
  fftw_free(buffer_in_);
  fftw_free(buffer_out_);
}

void Fft::forward(std::span<const cplx> in, std::span<cplx> out) { run(plan_forward_, in, out); }

void Fft::backward(std::span<const cplx> in, std::span<cplx> out) { run(plan_backward_, in, out); }

void Fft::run(void* plan, std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != n_ || out.size() != n_) {
    throw ConfigurationError("transform length mismatch");
  }
  std::copy(in.begin(), in.end(), buffer_in_);
  fftw_execute(static_cast<fftw_plan>(plan));
  std::copy(buffer_out_, buffer_out_ + n_, out.begin());
}

Fft& fft_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Fft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fft>(n);
  return *slot;
}

}  // namespace dispcancel
