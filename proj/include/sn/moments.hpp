#pragma once

#include <vector>

namespace sn {

// First and second moments of a Gaussian state in the narrow-kernel trap.
struct MomentState {
  double mean_x = 0.0;  // m
  double mean_v = 0.0;  // m/s
  double u = 0.0;       // centred variance <(x-<x>)^2>, m^2; must be > 0
  double u_dot = 0.0;   // m^2/s
  double u_ddot = 0.0;  // m^2/s^2
};

struct MomentTrajectory {
  std::vector<double> t;       // s
  std::vector<double> mean_x;  // m
  std::vector<double> u;       // m^2
};

// Closed orbit of the centre and the variance:
//   d^2<x>/dt^2 + omega0^2 <x> = 0,
//   d^3 u/dt^3 + 4 (omega0^2 + omega_sn^2) du/dt = 0.
// Integrated with classic RK4 on internal substeps small enough that the
// result matches the analytic solution to ~1e-10; dt sets the output
// sampling. The guard dt * max(omega0, omega_sn) <= 1e-2 is enforced.
MomentTrajectory evolve_moments(const MomentState& m0, double omega0,
                                double omega_sn, double t_end, double dt);

// u(t) = u0 + (u_dot0 / Omega) sin(Omega t) + (u_ddot0 / Omega^2)(1 - cos(Omega t)),
// Omega = 2 sqrt(omega0^2 + omega_sn^2).
double variance_closed_form(const MomentState& m0, double omega0,
                            double omega_sn, double t);

}  // namespace sn
