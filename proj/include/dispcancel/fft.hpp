#pragma once

#include <cstddef>
#include <span>

#include "dispcancel/grid.hpp"

namespace dispcancel {

// Unnormalized complex DFT of a fixed power-of-two length backed by FFTW.
// Buffers are owned and aligned, so a given input always runs through the
// same codelets and produces bitwise-identical output. Not thread-safe;
// use fft_for() to get a per-thread instance.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const noexcept { return n_; }

  // out_k = sum_j in_j exp(-2 pi i jk/n)
  void forward(std::span<const cplx> in, std::span<cplx> out);
  // out_j = sum_k in_k exp(+2 pi i jk/n)
  void backward(std::span<const cplx> in, std::span<cplx> out);

 private:
  void run(void* plan, std::span<const cplx> in, std::span<cplx> out);

  std::size_t n_;
  cplx* buffer_in_;
  cplx* buffer_out_;
  void* plan_forward_;
  void* plan_backward_;
};

// Thread-local cached transform of length n.
Fft& fft_for(std::size_t n);

}  // namespace dispcancel
