#include "sn/trap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sn/errors.hpp"
#include "sn/fft.hpp"

namespace sn {

namespace {

std::vector<double> density(const WavePacketState& s) {
  std::vector<double> rho(s.amplitude.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(s.amplitude[i]);
  return rho;
}

std::vector<double> kernel_table(const WavePacketState& s,
                                 const SelfGravityKernel& kernel) {
  const double dx = s.grid.dx();
  std::vector<double> table(s.amplitude.size());
  for (std::size_t m = 0; m < table.size(); ++m)
    table[m] = kernel(static_cast<double>(m) * dx);
  if (!kernel.finite_at_zero()) table[0] = 0.0;
  return table;
}

}  // namespace

double WavePacketState::norm() const {
  double s = 0.0;
  for (const auto& a : amplitude) s += std::norm(a);
  return s * grid.dx();
}

double WavePacketState::mean_x() const {
  double s = 0.0;
  for (int i = 0; i < grid.n; ++i) s += grid.x(i) * std::norm(amplitude[i]);
  return s * grid.dx() / norm();
}

double WavePacketState::mean_x2() const {
  double s = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    s += x * x * std::norm(amplitude[i]);
  }
  return s * grid.dx() / norm();
}

double WavePacketState::variance() const {
  const double m1 = mean_x();
  return mean_x2() - m1 * m1;
}

double WavePacketState::edge_amplitude_ratio() const {
  const int margin = std::max(1, grid.n / 10);
  double edge = 0.0, peak = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double a = std::abs(amplitude[i]);
    peak = std::max(peak, a);
    if (i < margin || i >= grid.n - margin) edge = std::max(edge, a);
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

WavePacketState make_trap_gaussian(const Grid1D& grid, double mass_kg,
                                   double omega0, double displacement_m,
                                   double squeeze) {
  if (!(mass_kg > 0.0) || !(omega0 > 0.0) || !(squeeze > 0.0))
    throw ValidationError("trap gaussian: mass, omega0 and squeeze must be positive");
  const double var0 = constants.hbar / (2.0 * mass_kg * omega0);  // ground <x^2>
  const double var = var0 * squeeze * squeeze;
  WavePacketState s;
  s.grid = grid;
  s.amplitude.resize(static_cast<std::size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i) - displacement_m;
    s.amplitude[static_cast<std::size_t>(i)] = std::exp(-x * x / (4.0 * var));
  }
  const double nrm = s.norm();
  for (auto& a : s.amplitude) a /= std::sqrt(nrm);
  return s;
}

Grid1D default_trap_grid(double mass_kg, double omega0, double displacement_m,
                         double squeeze, int n) {
  const double width0 = std::sqrt(constants.hbar / (2.0 * mass_kg * omega0));
  const double width = width0 * std::max(squeeze, 1.0 / squeeze);
  const double half = 12.0 * width + 1.5 * std::abs(displacement_m);
  return Grid1D{-half, half, n};
}

std::vector<double> self_gravity_potential_1d(const WavePacketState& state,
                                              const SelfGravityKernel& kernel,
                                              double gravity_scale) {
  const std::vector<double> table = kernel_table(state, kernel);
  Convolver1d conv(table, state.grid.n);
  const std::vector<double> rho = density(state);
  std::vector<double> v(rho.size());
  conv.apply(rho, v);
  const double factor = -constants.G * gravity_scale * state.grid.dx();
  for (auto& x : v) x *= factor;
  return v;
}

std::vector<double> self_gravity_potential_direct(const WavePacketState& state,
                                                  const SelfGravityKernel& kernel,
                                                  double gravity_scale) {
  const std::vector<double> table = kernel_table(state, kernel);
  const std::vector<double> rho = density(state);
  std::vector<double> v = convolve_direct(rho, table);
  const double factor = -constants.G * gravity_scale * state.grid.dx();
  for (auto& x : v) x *= factor;
  return v;
}

namespace {

// Shared machinery between the public energy function and the stepper.
class TrapSolver {
 public:
  TrapSolver(const WavePacketState& state, const TrapEvolutionConfig& cfg)
      : cfg_(cfg),
        n_(state.grid.n),
        dx_(state.grid.dx()),
        dst_(state.grid.n),
        conv_(kernel_table(state, cfg.kernel), state.grid.n) {
    // Wavenumbers of the hard-wall sine basis.
    k_.resize(static_cast<std::size_t>(n_));
    const double l_wall = state.grid.wall_length();
    for (int m = 0; m < n_; ++m)
      k_[static_cast<std::size_t>(m)] = std::numbers::pi * (m + 1) / l_wall;
    vext_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      const double x = state.grid.x(i);
      vext_[static_cast<std::size_t>(i)] = 0.5 * cfg.mass * cfg.omega0 * cfg.omega0 * x * x;
    }
    re_.resize(static_cast<std::size_t>(n_));
    im_.resize(static_cast<std::size_t>(n_));
  }

  // exp(-i hbar k^2 dt_half / (2 M)) applied in the sine basis.
  void kinetic_half(std::vector<std::complex<double>>& psi, double dt_half) {
    for (int i = 0; i < n_; ++i) {
      re_[static_cast<std::size_t>(i)] = psi[static_cast<std::size_t>(i)].real();
      im_[static_cast<std::size_t>(i)] = psi[static_cast<std::size_t>(i)].imag();
    }
    dst_.transform(re_);
    dst_.transform(im_);
    const double scale = dst_.roundtrip_scale();
    for (int m = 0; m < n_; ++m) {
      const double k = k_[static_cast<std::size_t>(m)];
      const double phase = -constants.hbar * k * k * dt_half / (2.0 * cfg_.mass);
      const std::complex<double> rot(std::cos(phase), std::sin(phase));
      std::complex<double> c(re_[static_cast<std::size_t>(m)],
                             im_[static_cast<std::size_t>(m)]);
      c *= rot * scale;
      re_[static_cast<std::size_t>(m)] = c.real();
      im_[static_cast<std::size_t>(m)] = c.imag();
    }
    dst_.transform(re_);
    dst_.transform(im_);
    for (int i = 0; i < n_; ++i)
      psi[static_cast<std::size_t>(i)] =
          std::complex<double>(re_[static_cast<std::size_t>(i)],
                               im_[static_cast<std::size_t>(i)]);
  }

  std::vector<double> gravity_potential(const std::vector<std::complex<double>>& psi) {
    std::vector<double> rho(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
    std::vector<double> v(psi.size());
    conv_.apply(rho, v);
    const double factor = -constants.G * cfg_.gravity_scale * dx_;
    for (auto& x : v) x *= factor;
    return v;
  }

  void potential_step(std::vector<std::complex<double>>& psi,
                      const std::vector<double>& vg, double dt) {
    for (int i = 0; i < n_; ++i) {
      const double v = vext_[static_cast<std::size_t>(i)] + vg[static_cast<std::size_t>(i)];
      const double phase = -v * dt / constants.hbar;
      psi[static_cast<std::size_t>(i)] *=
          std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }

  // Spectral kinetic energy in the sine basis plus potential terms.
  double energy(const std::vector<std::complex<double>>& psi,
                const std::vector<double>& vg) {
    for (int i = 0; i < n_; ++i) {
      re_[static_cast<std::size_t>(i)] = psi[static_cast<std::size_t>(i)].real();
      im_[static_cast<std::size_t>(i)] = psi[static_cast<std::size_t>(i)].imag();
    }
    dst_.transform(re_);
    dst_.transform(im_);
    double grad2 = 0.0;  // \int |dpsi/dx|^2 dx
    const double parseval = dx_ / (2.0 * (n_ + 1));
    for (int m = 0; m < n_; ++m) {
      const double k = k_[static_cast<std::size_t>(m)];
      const double c2 = re_[static_cast<std::size_t>(m)] * re_[static_cast<std::size_t>(m)] +
                        im_[static_cast<std::size_t>(m)] * im_[static_cast<std::size_t>(m)];
      grad2 += k * k * c2;
    }
    grad2 *= parseval;
    double pot = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double rho = std::norm(psi[static_cast<std::size_t>(i)]);
      pot += (vext_[static_cast<std::size_t>(i)] +
              0.5 * vg[static_cast<std::size_t>(i)]) *
             rho;
    }
    pot *= dx_;
    return constants.hbar * constants.hbar / (2.0 * cfg_.mass) * grad2 + pot;
  }

 private:
  const TrapEvolutionConfig& cfg_;
  int n_;
  double dx_;
  DstTransform dst_;
  Convolver1d conv_;
  std::vector<double> k_;
  std::vector<double> vext_;
  std::vector<double> re_, im_;
};

}  // namespace

double trap_energy(const WavePacketState& state, const TrapEvolutionConfig& cfg) {
  TrapSolver solver(state, cfg);
  auto psi = state.amplitude;
  const std::vector<double> vg = solver.gravity_potential(psi);
  return solver.energy(psi, vg);
}

TrapRun evolve_trap(const WavePacketState& psi0, const TrapEvolutionConfig& cfg) {
  if (!(cfg.mass > 0.0) || !(cfg.omega0 > 0.0))
    throw ValidationError("trap evolution: mass and omega0 must be positive");
  if (!(cfg.t_end > 0.0)) throw ValidationError("trap evolution: t_end must be > 0");
  if (!(cfg.dt > 0.0) || cfg.dt * cfg.omega0 > 1e-2)
    throw ValidationError(
        "trap evolution: need 0 < dt * omega0 <= 1e-2 (resolution guard)");
  if (cfg.sample_stride < 1 || cfg.snapshot_stride < 1)
    throw ValidationError("trap evolution: strides must be >= 1");
  if (psi0.edge_amplitude_ratio() >= 1e-6)
    throw ContainmentError(psi0.time,
                           "initial state is not contained in the grid");

  TrapRun run;
  const double extent =
      std::max(std::abs(psi0.grid.x_min), std::abs(psi0.grid.x_max)) * 2.0;
  if (auto w = cfg.kernel.extent_warning(extent)) run.warnings.push_back(*w);
  for (const auto& w : cfg.kernel.construction_warnings())
    run.warnings.push_back(w);

  TrapSolver solver(psi0, cfg);
  WavePacketState state = psi0;
  const long steps = std::lround(cfg.t_end / cfg.dt);

  auto sample = [&](const WavePacketState& s) {
    const std::vector<double> vg = solver.gravity_potential(s.amplitude);
    run.moments.t.push_back(s.time);
    run.moments.mean_x.push_back(s.mean_x());
    run.moments.mean_x2.push_back(s.mean_x2());
    run.moments.variance.push_back(s.variance());
    run.moments.norm.push_back(s.norm());
    run.moments.energy.push_back(solver.energy(s.amplitude, vg));
  };

  sample(state);
  run.snapshots.push_back(state);

  for (long step = 0; step < steps; ++step) {
    if (cfg.nonlinearity == NonlinearityUpdate::pre_step) {
      const std::vector<double> vg = solver.gravity_potential(state.amplitude);
      solver.kinetic_half(state.amplitude, 0.5 * cfg.dt);
      solver.potential_step(state.amplitude, vg, cfg.dt);
      solver.kinetic_half(state.amplitude, 0.5 * cfg.dt);
    } else {
      solver.kinetic_half(state.amplitude, 0.5 * cfg.dt);
      const std::vector<double> vg = solver.gravity_potential(state.amplitude);
      solver.potential_step(state.amplitude, vg, cfg.dt);
      solver.kinetic_half(state.amplitude, 0.5 * cfg.dt);
    }
    state.time = psi0.time + (step + 1) * cfg.dt;

    if (state.edge_amplitude_ratio() >= 1e-6)
      throw ContainmentError(state.time,
                             "wave packet reached the grid containment margin at t = " +
                                 std::to_string(state.time) + " s");

    if ((step + 1) % cfg.sample_stride == 0 || step + 1 == steps) sample(state);
    if ((step + 1) % cfg.snapshot_stride == 0 || step + 1 == steps)
      run.snapshots.push_back(state);
  }
  return run;
}

}  // namespace sn
