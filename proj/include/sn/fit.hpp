#pragma once

#include <span>

namespace sn {

// Least-squares fit of y(t) = offset + amplitude * cos(omega t - phase).
struct SinusoidFit {
  double omega = 0.0;      // rad/s
  double amplitude = 0.0;
  double phase = 0.0;      // rad
  double offset = 0.0;
  double residual_rms = 0.0;
  bool converged = false;
  bool high_residual = false;  // residual_rms > 1% of the fitted amplitude
};

// For fixed omega the problem is linear; omega itself is located by a coarse
// scan around `expected_omega` followed by golden-section refinement of the
// residual. The series must span at least five periods of expected_omega.
SinusoidFit extract_frequency(std::span<const double> t,
                              std::span<const double> y,
                              double expected_omega);

}  // namespace sn
