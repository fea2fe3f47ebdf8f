#pragma once

#include <complex>
#include <span>
#include <vector>

namespace sn {

// DST-I over n interior points of a hard-wall box. Walls sit one grid step
// outside the stored range; mode m has wavenumber pi (m+1) / L_wall with
// L_wall = (n+1) dx. The transform is its own inverse up to 2 (n+1).
class DstTransform {
 public:
  explicit DstTransform(int n);
  ~DstTransform();
  DstTransform(const DstTransform&) = delete;
  DstTransform& operator=(const DstTransform&) = delete;

  int size() const { return n_; }
  double roundtrip_scale() const { return 1.0 / (2.0 * (n_ + 1)); }

  // In-place unnormalised DST-I of a real sequence.
  void transform(std::span<double> data);

 private:
  int n_;
  double* buf_;
  void* plan_;
};

// Discrete linear convolution against a fixed symmetric kernel:
// out[i] = sum_j density[j] * kernel[|i-j|], via zero-padded circular FFT.
class Convolver1d {
 public:
  // kernel_by_offset[m] = K(m * dx) for m = 0 .. n-1.
  Convolver1d(std::span<const double> kernel_by_offset, int n);
  ~Convolver1d();
  Convolver1d(const Convolver1d&) = delete;
  Convolver1d& operator=(const Convolver1d&) = delete;

  int size() const { return n_; }
  void apply(std::span<const double> density, std::span<double> out);

 private:
  int n_;
  int padded_;
  std::vector<double> kernel_spectrum_;  // real: the circular kernel is even
  double* real_buf_;
  void* complex_buf_;
  void* plan_fwd_;
  void* plan_inv_;
};

// Reference O(n^2) evaluation of the same sum, for cross-checking the
// transform path.
std::vector<double> convolve_direct(std::span<const double> density,
                                    std::span<const double> kernel_by_offset);

}  // namespace sn
