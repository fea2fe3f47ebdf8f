#include "sn/moments.hpp"

#include <array>
#include <cmath>

#include "sn/errors.hpp"

namespace sn {

namespace {

using State5 = std::array<double, 5>;  // x, v, u, u_dot, u_ddot

State5 derivative(const State5& y, double omega0_sq, double big_omega_sq) {
  return {y[1], -omega0_sq * y[0], y[3], y[4], -big_omega_sq * y[3]};
}

State5 rk4_step(const State5& y, double h, double omega0_sq, double big_omega_sq) {
  const State5 k1 = derivative(y, omega0_sq, big_omega_sq);
  State5 tmp;
  for (int i = 0; i < 5; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  const State5 k2 = derivative(tmp, omega0_sq, big_omega_sq);
  for (int i = 0; i < 5; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  const State5 k3 = derivative(tmp, omega0_sq, big_omega_sq);
  for (int i = 0; i < 5; ++i) tmp[i] = y[i] + h * k3[i];
  const State5 k4 = derivative(tmp, omega0_sq, big_omega_sq);
  State5 out;
  for (int i = 0; i < 5; ++i)
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

MomentTrajectory evolve_moments(const MomentState& m0, double omega0,
                                double omega_sn, double t_end, double dt) {
  if (!(omega0 > 0.0)) throw ValidationError("moment evolution: omega0 must be > 0");
  if (omega_sn < 0.0) throw ValidationError("moment evolution: omega_sn must be >= 0");
  if (!(m0.u > 0.0)) throw ValidationError("moment evolution: variance must be > 0");
  if (!(t_end > 0.0) || !(dt > 0.0))
    throw ValidationError("moment evolution: t_end and dt must be > 0");
  if (dt * std::max(omega0, omega_sn) > 1e-2)
    throw ValidationError(
        "moment evolution: need dt * max(omega0, omega_sn) <= 1e-2 (step guard)");

  const double omega0_sq = omega0 * omega0;
  const double big_omega = 2.0 * std::sqrt(omega0_sq + omega_sn * omega_sn);
  const double big_omega_sq = big_omega * big_omega;

  // dt controls the output sampling; the integrator subdivides so the
  // internal step keeps Omega * h ~ 1e-3 and RK4 error well below 1e-10.
  const int substeps = std::max(1, static_cast<int>(std::ceil(dt * big_omega / 1e-3)));
  const double h = dt / substeps;

  const long samples = std::lround(t_end / dt);
  MomentTrajectory out;
  out.t.reserve(samples + 1);
  out.mean_x.reserve(samples + 1);
  out.u.reserve(samples + 1);

  State5 y{m0.mean_x, m0.mean_v, m0.u, m0.u_dot, m0.u_ddot};
  out.t.push_back(0.0);
  out.mean_x.push_back(y[0]);
  out.u.push_back(y[2]);
  for (long s = 1; s <= samples; ++s) {
    for (int k = 0; k < substeps; ++k) y = rk4_step(y, h, omega0_sq, big_omega_sq);
    out.t.push_back(s * dt);
    out.mean_x.push_back(y[0]);
    out.u.push_back(y[2]);
  }
  return out;
}

double variance_closed_form(const MomentState& m0, double omega0,
                            double omega_sn, double t) {
  const double big_omega = 2.0 * std::sqrt(omega0 * omega0 + omega_sn * omega_sn);
  return m0.u + m0.u_dot / big_omega * std::sin(big_omega * t) +
         m0.u_ddot / (big_omega * big_omega) * (1.0 - std::cos(big_omega * t));
}

}  // namespace sn
