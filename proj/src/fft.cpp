#include "sn/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "sn/errors.hpp"

namespace sn {

namespace {

// FFTW plan creation is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

}  // namespace

DstTransform::DstTransform(int n) : n_(n) {
  if (n_ < 2) throw ValidationError("DST transform: need n >= 2");
  buf_ = fftw_alloc_real(static_cast<std::size_t>(n_));
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_ESTIMATE keeps plan selection deterministic run to run.
  plan_ = fftw_plan_r2r_1d(n_, buf_, buf_, FFTW_RODFT00, FFTW_ESTIMATE);
}

DstTransform::~DstTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(buf_);
}

void DstTransform::transform(std::span<double> data) {
  if (static_cast<int>(data.size()) != n_)
    throw ValidationError("DST transform: size mismatch");
  std::memcpy(buf_, data.data(), sizeof(double) * static_cast<std::size_t>(n_));
  fftw_execute(static_cast<fftw_plan>(plan_));
  std::memcpy(data.data(), buf_, sizeof(double) * static_cast<std::size_t>(n_));
}

Convolver1d::Convolver1d(std::span<const double> kernel_by_offset, int n)
    : n_(n) {
  if (n_ < 2 || static_cast<int>(kernel_by_offset.size()) != n_)
    throw ValidationError("convolver: kernel table must have n entries");
  padded_ = next_pow2(2 * n_);

  real_buf_ = fftw_alloc_real(static_cast<std::size_t>(padded_));
  auto* cbuf = fftw_alloc_complex(static_cast<std::size_t>(padded_ / 2 + 1));
  complex_buf_ = cbuf;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_r2c_1d(padded_, real_buf_, cbuf, FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r_1d(padded_, cbuf, real_buf_, FFTW_ESTIMATE);
  }

  // Circular layout of the even kernel: index p and padded-p both carry K_p.
  std::fill(real_buf_, real_buf_ + padded_, 0.0);
  real_buf_[0] = kernel_by_offset[0];
  for (int m = 1; m < n_; ++m) {
    real_buf_[m] = kernel_by_offset[m];
    real_buf_[padded_ - m] = kernel_by_offset[m];
  }
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  kernel_spectrum_.resize(static_cast<std::size_t>(padded_ / 2 + 1));
  for (std::size_t k = 0; k < kernel_spectrum_.size(); ++k)
    kernel_spectrum_[k] = cbuf[k][0];  // even input: spectrum is real
}

Convolver1d::~Convolver1d() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_buf_);
  fftw_free(static_cast<fftw_complex*>(complex_buf_));
}

void Convolver1d::apply(std::span<const double> density, std::span<double> out) {
  if (static_cast<int>(density.size()) != n_ || static_cast<int>(out.size()) != n_)
    throw ValidationError("convolver: size mismatch");
  auto* cbuf = static_cast<fftw_complex*>(complex_buf_);
  std::fill(real_buf_, real_buf_ + padded_, 0.0);
  std::memcpy(real_buf_, density.data(), sizeof(double) * static_cast<std::size_t>(n_));
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  const double scale = 1.0 / padded_;
  for (std::size_t k = 0; k < kernel_spectrum_.size(); ++k) {
    cbuf[k][0] *= kernel_spectrum_[k] * scale;
    cbuf[k][1] *= kernel_spectrum_[k] * scale;
  }
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  std::memcpy(out.data(), real_buf_, sizeof(double) * static_cast<std::size_t>(n_));
}

std::vector<double> convolve_direct(std::span<const double> density,
                                    std::span<const double> kernel_by_offset) {
  const std::size_t n = density.size();
  if (kernel_by_offset.size() != n)
    throw ValidationError("convolver: kernel table must have n entries");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t m = i > j ? i - j : j - i;
      s += density[j] * kernel_by_offset[m];
    }
    out[i] = s;
  }
  return out;
}

}  // namespace sn
