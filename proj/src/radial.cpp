#include "sn/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sn/constants.hpp"
#include "sn/errors.hpp"
#include "sn/quadrature.hpp"

namespace sn {

namespace {

constexpr double kPi = std::numbers::pi;

// Grid-node values extended by the r = 0 wall, for cumulative integrals that
// start at the origin.
std::vector<double> with_origin(const std::vector<double>& f) {
  std::vector<double> out;
  out.reserve(f.size() + 1);
  out.push_back(0.0);
  out.insert(out.end(), f.begin(), f.end());
  return out;
}

// Complex tridiagonal Thomas solve with constant diagonals (diag, off).
void solve_tridiag_const(std::complex<double> diag, std::complex<double> off,
                         std::vector<std::complex<double>>& rhs,
                         std::vector<std::complex<double>>& scratch) {
  const std::size_t n = rhs.size();
  scratch.resize(n);
  std::complex<double> beta = diag;
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    scratch[i] = off / beta;
    beta = diag - off * scratch[i];
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

// Real variant used by the imaginary-time relaxation.
void solve_tridiag_const_real(double diag, double off, std::vector<double>& rhs,
                              std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  scratch.resize(n);
  double beta = diag;
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    scratch[i] = off / beta;
    beta = diag - off * scratch[i];
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

std::vector<double> density_u2(const RadialState& s) {
  std::vector<double> u2(s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) u2[i] = std::norm(s.u[i]);
  return u2;
}

std::vector<double> potential_from_u2(const std::vector<double>& u2,
                                      const RadialGrid& grid, double mass) {
  const double dr = grid.dr();
  const std::size_t n = u2.size();
  // P_in(r) = 4 pi \int_0^r |u|^2 dr'
  std::vector<double> f = with_origin(u2);
  const std::vector<double> p_in = cumulative_trapezoid(f, dr);
  // tail(r) = 4 pi \int_r^rmax |u|^2 / r' dr'
  std::vector<double> g(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) g[i + 1] = u2[i] / grid.r(static_cast<int>(i));
  const std::vector<double> g_cum = cumulative_trapezoid(g, dr);
  std::vector<double> phi(n);
  const double gm2 = constants.G * mass * mass;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.r(static_cast<int>(i));
    const double inner = 4.0 * kPi * p_in[i + 1] / r;
    const double outer = 4.0 * kPi * (g_cum.back() - g_cum[i + 1]);
    phi[i] = -gm2 * (inner + outer);
  }
  return phi;
}

double kinetic_energy(const RadialState& s) {
  // T = (hbar^2 / 2m) 4 pi \int |u'|^2 dr with wall phantoms at both ends.
  const double dr = s.grid.dr();
  const std::size_t n = s.u.size();
  double sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const std::complex<double> lo = (i == 0) ? 0.0 : s.u[i - 1];
    const std::complex<double> hi = (i == n) ? 0.0 : s.u[i];
    sum += std::norm((hi - lo) / dr);
  }
  sum *= dr;  // midpoint values of |u'|^2, one per cell
  return constants.hbar * constants.hbar / (2.0 * s.mass) * 4.0 * kPi * sum;
}

}  // namespace

double RadialState::norm() const {
  double s = 0.0;
  for (const auto& a : u) s += std::norm(a);
  return 4.0 * kPi * s * grid.dr();
}

RadialState make_radial_gaussian(const RadialGrid& grid, double mass_kg,
                                 double r0_width_m) {
  if (!(mass_kg > 0.0) || !(r0_width_m > 0.0))
    throw ValidationError("radial gaussian: mass and width must be positive");
  RadialState s;
  s.grid = grid;
  s.mass = mass_kg;
  s.u.resize(static_cast<std::size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) {
    const double r = grid.r(i);
    s.u[static_cast<std::size_t>(i)] =
        r * std::exp(-r * r / (4.0 * r0_width_m * r0_width_m));
  }
  const double nrm = s.norm();
  for (auto& a : s.u) a /= std::sqrt(nrm);
  return s;
}

std::vector<double> newtonian_potential_radial(const RadialState& state) {
  return potential_from_u2(density_u2(state), state.grid, state.mass);
}

DispersionMetrics dispersion_metrics(const RadialState& state) {
  const double dr = state.grid.dr();
  const std::size_t n = state.u.size();
  std::vector<double> rho(n);  // radial probability density 4 pi |u|^2
  for (std::size_t i = 0; i < n; ++i) rho[i] = 4.0 * kPi * std::norm(state.u[i]);

  const std::vector<double> rho0 = with_origin(rho);
  const std::vector<double> cum = cumulative_parabolic(rho0, dr);
  std::vector<double> radii(rho0.size());
  for (std::size_t i = 0; i < radii.size(); ++i) radii[i] = static_cast<double>(i) * dr;

  DispersionMetrics m;
  MonotoneCubic cdf(radii, cum);
  m.r_half = cdf.solve(0.5 * cum.back());

  std::vector<double> r2rho(rho0.size());
  for (std::size_t i = 0; i < rho0.size(); ++i)
    r2rho[i] = radii[i] * radii[i] * rho0[i];
  m.r_rms = std::sqrt(cumulative_parabolic(r2rho, dr).back() / cum.back());

  std::size_t peak_i = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (rho[i] > rho[peak_i]) peak_i = i;
  m.peak_density = rho[peak_i];
  if (peak_i > 0 && peak_i + 1 < n) {
    // Parabolic refinement through the three points around the maximum.
    const double y0 = rho[peak_i - 1], y1 = rho[peak_i], y2 = rho[peak_i + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom < 0.0) {
      const double delta = 0.5 * (y0 - y2) / denom;
      m.peak_density = y1 - 0.25 * (y0 - y2) * delta;
    }
  }
  return m;
}

double radial_energy(const RadialState& state, bool gravity_on) {
  double e = kinetic_energy(state);
  if (gravity_on) {
    const std::vector<double> u2 = density_u2(state);
    const std::vector<double> phi = potential_from_u2(u2, state.grid, state.mass);
    double pot = 0.0;
    for (std::size_t i = 0; i < u2.size(); ++i) pot += phi[i] * u2[i];
    e += 0.5 * 4.0 * kPi * pot * state.grid.dr();
  }
  return e;
}

FreeRun evolve_free(const RadialState& psi0, const FreeEvolutionConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0))
    throw ValidationError("free evolution: dt and t_end must be > 0");
  if (psi0.u.empty() || !(psi0.mass > 0.0))
    throw ValidationError("free evolution: empty state or non-positive mass");

  const RadialGrid grid = psi0.grid;
  const int n = grid.n;
  const double dr = grid.dr();

  // Absorbing layer over the outer 10%: cubic ramp, magnitude set so a wave
  // crossing the layer within the run acquires a large optical depth.
  const int absorber_start = n - std::max(1, n / 10);
  std::vector<double> absorber(static_cast<std::size_t>(n), 0.0);
  if (cfg.absorber_on) {
    const double w0 =
        cfg.absorber_strength * 100.0 * constants.hbar / cfg.t_end;
    for (int i = absorber_start; i < n; ++i) {
      const double s = static_cast<double>(i - absorber_start) /
                       static_cast<double>(n - absorber_start);
      absorber[static_cast<std::size_t>(i)] = w0 * s * s * s;
    }
  }

  RadialState state = psi0;
  const long steps = std::lround(cfg.t_end / cfg.dt);
  const std::complex<double> i_unit(0.0, 1.0);
  const double beta = constants.hbar * cfg.dt / (4.0 * psi0.mass * dr * dr);
  const std::complex<double> lhs_diag = 1.0 + 2.0 * i_unit * beta;
  const std::complex<double> lhs_off = -i_unit * beta;

  FreeRun run;
  bool flux_warned = false;

  auto apply_phase_half = [&](std::vector<std::complex<double>>& u,
                              const std::vector<double>& phi) {
    const double half_dt = 0.5 * cfg.dt;
    for (int i = 0; i < n; ++i) {
      const double v = cfg.gravity_on ? phi[static_cast<std::size_t>(i)] : 0.0;
      const double phase = -v * half_dt / constants.hbar;
      const double decay =
          std::exp(-absorber[static_cast<std::size_t>(i)] * half_dt / constants.hbar);
      u[static_cast<std::size_t>(i)] *=
          decay * std::complex<double>(std::cos(phase), std::sin(phase));
    }
  };

  std::vector<std::complex<double>> rhs(static_cast<std::size_t>(n)),
      scratch(static_cast<std::size_t>(n));
  auto kinetic_cn = [&](std::vector<std::complex<double>>& u) {
    for (int i = 0; i < n; ++i) {
      const std::complex<double> um = (i > 0) ? u[static_cast<std::size_t>(i - 1)] : 0.0;
      const std::complex<double> up =
          (i + 1 < n) ? u[static_cast<std::size_t>(i + 1)] : 0.0;
      rhs[static_cast<std::size_t>(i)] =
          (1.0 - 2.0 * i_unit * beta) * u[static_cast<std::size_t>(i)] +
          i_unit * beta * (um + up);
    }
    solve_tridiag_const(lhs_diag, lhs_off, rhs, scratch);
    u = rhs;
  };

  auto absorbed_probability = [&](const RadialState& s) {
    double a = 0.0;
    for (int i = absorber_start; i < n; ++i)
      a += std::norm(s.u[static_cast<std::size_t>(i)]);
    return 4.0 * kPi * a * dr;
  };

  auto sample = [&](const RadialState& s) {
    const DispersionMetrics m = dispersion_metrics(s);
    run.t.push_back(s.time);
    run.r_half.push_back(m.r_half);
    run.r_rms.push_back(m.r_rms);
    run.peak_density.push_back(m.peak_density);
    run.norm.push_back(s.norm());
    run.energy.push_back(radial_energy(s, cfg.gravity_on));
    const double a = absorbed_probability(s);
    run.absorbed.push_back(a);
    if (!flux_warned && a > 1e-4) {
      run.warnings.push_back(
          "probability in the absorbing layer exceeded 1e-4 at t = " +
          std::to_string(s.time) + " s; metrics beyond this point see boundary "
          "losses");
      flux_warned = true;
    }
  };

  sample(state);
  run.snapshots.push_back(state);

  std::vector<double> phi = cfg.gravity_on
                                ? potential_from_u2(density_u2(state), grid, state.mass)
                                : std::vector<double>(static_cast<std::size_t>(n), 0.0);
  for (long step = 0; step < steps; ++step) {
    const std::vector<std::complex<double>> u_start = state.u;
    // Predictor: leading phase half with the current potential.
    apply_phase_half(state.u, phi);
    kinetic_cn(state.u);
    std::vector<double> phi_end =
        cfg.gravity_on ? potential_from_u2(density_u2(state), grid, state.mass) : phi;
    apply_phase_half(state.u, phi_end);

    // Optional fixed-point passes on the trailing potential.
    for (int it = 1; it < cfg.max_potential_iterations; ++it) {
      const std::vector<double> phi_next =
          cfg.gravity_on ? potential_from_u2(density_u2(state), grid, state.mass)
                         : phi;
      double change = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < phi_next.size(); ++i) {
        change = std::max(change, std::abs(phi_next[i] - phi_end[i]));
        scale = std::max(scale, std::abs(phi_next[i]));
      }
      if (scale == 0.0 || change <= cfg.potential_tolerance * scale) break;
      state.u = u_start;
      apply_phase_half(state.u, phi);
      kinetic_cn(state.u);
      phi_end = phi_next;
      apply_phase_half(state.u, phi_end);
    }

    state.time = psi0.time + (step + 1) * cfg.dt;
    phi = cfg.gravity_on ? potential_from_u2(density_u2(state), grid, state.mass)
                         : phi;

    if (cfg.metrics_stride > 0 &&
        ((step + 1) % cfg.metrics_stride == 0 || step + 1 == steps))
      sample(state);
    if (cfg.snapshot_stride > 0 && (step + 1) % cfg.snapshot_stride == 0)
      run.snapshots.push_back(state);
  }
  if (run.snapshots.back().time != state.time) run.snapshots.push_back(state);
  return run;
}

GroundStateResult ground_state_relax(double mass_kg, const RadialGrid& grid,
                                     double tolerance, int max_iterations) {
  if (!(mass_kg > 0.0)) throw ValidationError("ground state: mass must be > 0");
  const double soliton_scale = constants.hbar * constants.hbar /
                               (constants.G * mass_kg * mass_kg * mass_kg);
  if (grid.r_max < 10.0 * soliton_scale)
    throw ValidationError(
        "ground state: grid r_max must cover at least 10x the self-bound "
        "state scale hbar^2/(G m^3)");

  const int n = grid.n;
  const double dr = grid.dr();
  // Imaginary-time step in the natural time unit of the self-bound problem.
  // The fixed point of the split map carries an O(dtau^2) bias (symmetric
  // splitting), so the step is walked down a schedule once each level settles.
  const double tau_unit = std::pow(constants.hbar, 3) /
                          (constants.G * constants.G * std::pow(mass_kg, 5));
  // Backward-Euler levels first: they damp the high-wavenumber content the
  // Cayley form barely touches. The Cayley levels then remove the O(dtau)
  // resolvent bias from the converged profile.
  struct Level {
    double dtau;
    bool cayley;
  };
  const Level levels[] = {{0.2 * tau_unit, false},
                          {0.05 * tau_unit, false},
                          {0.0125 * tau_unit, true},
                          {0.003 * tau_unit, true}};
  // Energy settling alone is unreliable (the functional is flat near the
  // minimum), so each level also runs a minimum amount of imaginary flow.
  const double min_flow_per_level = 60.0 * tau_unit;

  RadialState state;
  state.grid = grid;
  state.mass = mass_kg;
  state.u.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = grid.r(i);
    state.u[static_cast<std::size_t>(i)] =
        r * std::exp(-r * r / (2.0 * 9.0 * soliton_scale * soliton_scale));
  }
  {
    const double nrm = state.norm();
    for (auto& a : state.u) a /= std::sqrt(nrm);
  }

  std::vector<double> values(static_cast<std::size_t>(n)),
      scratch(static_cast<std::size_t>(n));
  GroundStateResult result;
  int total_iterations = 0;

  std::vector<double> rhs(static_cast<std::size_t>(n));
  for (const Level& level : levels) {
    const double dtau = level.dtau;
    const double beta = constants.hbar * dtau / (2.0 * mass_kg * dr * dr);
    const double gamma = 0.5 * beta;
    const double diag = level.cayley ? 1.0 + 2.0 * gamma : 1.0 + 2.0 * beta;
    const double off = level.cayley ? -gamma : -beta;
    double energy_prev = 0.0;
    int settled = 0;
    bool level_done = false;
    double flow = 0.0;

    while (!level_done) {
      if (++total_iterations > max_iterations)
        throw NumericalError("ground state relaxation did not converge within " +
                             std::to_string(max_iterations) + " iterations");
      flow += dtau;
      std::vector<double> u2 = density_u2(state);
      const std::vector<double> phi = potential_from_u2(u2, grid, mass_kg);

      // Strang step: half potential decay, implicit kinetic, half potential.
      for (int i = 0; i < n; ++i)
        values[static_cast<std::size_t>(i)] =
            state.u[static_cast<std::size_t>(i)].real() *
            std::exp(-phi[static_cast<std::size_t>(i)] * 0.5 * dtau / constants.hbar);
      if (level.cayley) {
        for (int i = 0; i < n; ++i) {
          const double lo = (i > 0) ? values[static_cast<std::size_t>(i - 1)] : 0.0;
          const double hi = (i + 1 < n) ? values[static_cast<std::size_t>(i + 1)] : 0.0;
          rhs[static_cast<std::size_t>(i)] =
              (1.0 - 2.0 * gamma) * values[static_cast<std::size_t>(i)] +
              gamma * (lo + hi);
        }
        solve_tridiag_const_real(diag, off, rhs, scratch);
        values = rhs;
      } else {
        solve_tridiag_const_real(diag, off, values, scratch);
      }
      for (int i = 0; i < n; ++i)
        values[static_cast<std::size_t>(i)] *=
            std::exp(-phi[static_cast<std::size_t>(i)] * 0.5 * dtau / constants.hbar);
      for (int i = 0; i < n; ++i)
        state.u[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(i)];
      const double nrm = state.norm();
      for (auto& a : state.u) a /= std::sqrt(nrm);

      // Energy of the refreshed state.
      u2 = density_u2(state);
      const std::vector<double> phi_new = potential_from_u2(u2, grid, mass_kg);
      double pot = 0.0;
      for (std::size_t i = 0; i < u2.size(); ++i) pot += phi_new[i] * u2[i];
      const double u_grav = 0.5 * 4.0 * kPi * pot * dr;
      const double t_kin = kinetic_energy(state);
      const double energy = t_kin + u_grav;

      if (energy_prev != 0.0) {
        const double change = std::abs(energy - energy_prev) / std::abs(energy);
        settled = (change < tolerance) ? settled + 1 : 0;
      }
      if (settled >= 5 && flow >= min_flow_per_level) level_done = true;

      energy_prev = energy;
      result.state = state;
      result.energy = energy;
      result.kinetic = t_kin;
      result.gravitational = u_grav;
      result.iterations = total_iterations;
    }
  }
  return result;
}

}  // namespace sn
