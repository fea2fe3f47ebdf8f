#pragma once

#include <complex>
#include <string>
#include <vector>

namespace sn {

// Uniform radial grid for the reduced wave u(r) = r psi(r). Interior nodes
// r_i = (i+1) dr with Dirichlet walls at r = 0 (regularity) and r = r_max.
struct RadialGrid {
  double r_max = 0.0;  // m
  int n = 0;

  double dr() const { return r_max / (n + 1); }
  double r(int i) const { return (i + 1) * dr(); }
};

struct RadialState {
  RadialGrid grid;
  std::vector<std::complex<double>> u;  // reduced amplitude, m^{-1/2}
  double time = 0.0;                    // s
  double mass = 0.0;                    // particle mass, kg

  double norm() const;  // 4 pi \int |u|^2 dr
};

// Normalised isotropic Gaussian psi ~ exp(-r^2 / (4 r0^2)), so <r^2> = 3 r0^2.
RadialState make_radial_gaussian(const RadialGrid& grid, double mass_kg,
                                 double r0_width_m);

struct DispersionMetrics {
  double r_half = 0.0;        // radius containing half the probability, m
  double r_rms = 0.0;         // sqrt(<r^2>), m
  double peak_density = 0.0;  // max of 4 pi r^2 |psi|^2, m^-1
};

DispersionMetrics dispersion_metrics(const RadialState& state);

// Self-gravity potential of the state's own density by the shell theorem:
// Phi(r) = -G m^2 [ P_in(r)/r + 4 pi \int_r^inf r' |psi|^2 dr' ], J.
// Cumulative integrals are trapezoidal.
std::vector<double> newtonian_potential_radial(const RadialState& state);

struct FreeEvolutionConfig {
  double dt = 0.0;     // s
  double t_end = 0.0;  // s
  int metrics_stride = 10;   // steps between metric samples
  int snapshot_stride = 0;   // 0: keep only initial and final states
  bool gravity_on = true;
  bool absorber_on = true;          // complex potential in the outer 10%
  double absorber_strength = 1.0;   // multiplier on the default magnitude
  int max_potential_iterations = 1; // extra fixed-point passes per step
  double potential_tolerance = 1e-10;
};

struct FreeRun {
  std::vector<RadialState> snapshots;
  std::vector<double> t;             // s, at metric samples
  std::vector<double> r_half;        // m
  std::vector<double> r_rms;         // m
  std::vector<double> peak_density;  // m^-1
  std::vector<double> norm;
  std::vector<double> energy;        // J
  std::vector<double> absorbed;      // probability inside the absorbing layer
  std::vector<std::string> warnings;
};

// Crank-Nicolson kinetic step on u(r) with the self-consistent potential
// applied as half-step phases before and after, the trailing half using the
// potential recomputed from the advanced state. Optionally iterates that
// recomputation to a fixed point.
FreeRun evolve_free(const RadialState& psi0, const FreeEvolutionConfig& cfg);

struct GroundStateResult {
  RadialState state;
  double energy = 0.0;         // T + U_g, J
  double kinetic = 0.0;        // T, J
  double gravitational = 0.0;  // U_g = (1/2) \int Phi |psi|^2 d^3r, J
  int iterations = 0;
};

// Imaginary-time relaxation with per-step renormalisation until the energy
// settles to `tolerance` (relative). The grid must be wide enough for the
// self-bound state scale hbar^2 / (G m^3).
GroundStateResult ground_state_relax(double mass_kg, const RadialGrid& grid,
                                     double tolerance = 1e-12,
                                     int max_iterations = 200000);

// Total energy T + (1/2) \int Phi |psi|^2 d^3r of an arbitrary state, J.
double radial_energy(const RadialState& state, bool gravity_on = true);

}  // namespace sn
