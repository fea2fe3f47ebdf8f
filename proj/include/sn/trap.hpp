#pragma once

#include <complex>
#include <string>
#include <vector>

#include "sn/kernels.hpp"
#include "sn/units.hpp"

namespace sn {

// Uniform 1D grid; hard walls sit one step outside [x_min, x_max].
struct Grid1D {
  double x_min = 0.0;  // m
  double x_max = 0.0;  // m
  int n = 0;

  double dx() const { return (x_max - x_min) / (n - 1); }
  double x(int i) const { return x_min + i * dx(); }
  double wall_length() const { return (n + 1) * dx(); }
};

struct WavePacketState {
  Grid1D grid;
  std::vector<std::complex<double>> amplitude;  // psi(x_i), m^{-1/2}
  double time = 0.0;                            // s

  double norm() const;     // \int |psi|^2 dx
  double mean_x() const;   // m
  double mean_x2() const;  // m^2
  double variance() const;

  // Largest |psi| in the outer 10% of the grid relative to the global
  // maximum; the containment guard requires < 1e-6.
  double edge_amplitude_ratio() const;
};

// Oscillator eigenstate-shaped Gaussian: ground width times `squeeze`,
// centre displaced by `displacement` (no momentum kick).
WavePacketState make_trap_gaussian(const Grid1D& grid, double mass_kg,
                                   double omega0, double displacement_m = 0.0,
                                   double squeeze = 1.0);

// Grid wide enough to contain that packet through displaced/squeezed motion.
Grid1D default_trap_grid(double mass_kg, double omega0, double displacement_m,
                         double squeeze, int n);

enum class NonlinearityUpdate {
  pre_step,  // potential frozen from the density at the start of the step
  midpoint,  // recomputed after the first kinetic half-step (default)
};

struct TrapEvolutionConfig {
  double mass = 0.0;    // kg
  double omega0 = 0.0;  // s^-1
  SelfGravityKernel kernel = SelfGravityKernel::delta(1.0);
  double dt = 0.0;     // s; dt * omega0 <= 1e-2 enforced
  double t_end = 0.0;  // s
  int snapshot_stride = 100;
  int sample_stride = 1;  // steps between moment/energy samples
  NonlinearityUpdate nonlinearity = NonlinearityUpdate::midpoint;
  double gravity_scale = 1.0;  // 0 switches the self-interaction off
};

struct MomentSeries {
  std::vector<double> t;        // s
  std::vector<double> mean_x;   // m
  std::vector<double> mean_x2;  // m^2
  std::vector<double> variance; // m^2
  std::vector<double> norm;
  std::vector<double> energy;   // J
};

struct TrapRun {
  std::vector<WavePacketState> snapshots;
  MomentSeries moments;
  std::vector<std::string> warnings;
};

// -G * convolution of |psi|^2 with the kernel, in J on the grid. The
// transform-based path; `self_gravity_potential_direct` is the O(n^2)
// reference. For the point kernel the (singular) zero-offset entry is
// excluded from the sum.
std::vector<double> self_gravity_potential_1d(const WavePacketState& state,
                                              const SelfGravityKernel& kernel,
                                              double gravity_scale = 1.0);
std::vector<double> self_gravity_potential_direct(const WavePacketState& state,
                                                  const SelfGravityKernel& kernel,
                                                  double gravity_scale = 1.0);

// Total energy: kinetic + trap + half the self-interaction term (the half
// avoids double counting the pairwise interaction).
double trap_energy(const WavePacketState& state, const TrapEvolutionConfig& cfg);

// Strang-split evolution: kinetic half-step in the hard-wall sine basis,
// full potential step with V_ext + V_g, kinetic half-step. Norm is measured,
// never silently restored. Throws ContainmentError when the packet reaches
// the grid margin.
TrapRun evolve_trap(const WavePacketState& psi0, const TrapEvolutionConfig& cfg);

}  // namespace sn
