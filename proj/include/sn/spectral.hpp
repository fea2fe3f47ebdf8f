#pragma once

#include <vector>

#include "sn/hermite.hpp"
#include "sn/materials.hpp"

namespace sn {

// Inputs of the perturbative level-shift computation for a trapped particle.
struct SpectralParams {
  double total_mass = 0.0;  // kg
  double omega0 = 0.0;      // s^-1
  MaterialRecord material;
  double alpha = 0.0;      // 2 sigma sqrt(M omega0 / hbar)
  double prefactor = 0.0;  // G hbar m_atom / (4 sigma^3 omega0), J

  static SpectralParams make(double mass_kg, double omega0,
                             const MaterialRecord& material);
};

struct SpectrumLine {
  int n_lower = 0;
  int n_upper = 0;
  int delta_n = 0;
  double omega_unperturbed = 0.0;  // delta_n * omega0, rad/s
  double omega_shift = 0.0;        // (dE_upper - dE_lower) / hbar, rad/s
  double weight = 0.0;             // Boltzmann weight, normalised over the set
};

// P_n(z): Gaussian-weighted overlap of squared oscillator eigenfunctions
// displaced by z. Evaluated by a Gauss-Hermite rule that is polynomially
// exact for the integrand; all accumulation happens in log space.
double p_n(const HermiteWorkspace& ws, int n, double z);

// e^{-z^2/2} P_n(z); bounded for all z and the form the f_n integrand needs.
double q_n(const HermiteWorkspace& ws, int n, double z);

struct FnOutcome {
  double value = 0.0;
  double rel_error_estimate = 0.0;
  int panels = 0;
};

// The alpha-dependent integral term of the level-shift function f_n; the
// n-independent additive constant is dropped (it cancels in every transition).
// Panel-doubling quadrature; throws QuadratureError when the doubling change
// does not reach rel_tol.
FnOutcome f_n_detailed(const HermiteWorkspace& ws, int n, double alpha,
                       double rel_tol = 1e-10);
double f_n(const HermiteWorkspace& ws, int n, double alpha);

// First-order self-gravity shift of level n: -prefactor * f_n(alpha), J.
double energy_shift(const HermiteWorkspace& ws, int n, const SpectralParams& p);

// Lines n -> n + delta_n for n = 0 .. n_max - delta_n, ordered by n, with
// Boltzmann weights at temperature T normalised over the computed range.
// Per-line work runs on `jobs` threads (0 = hardware); output is independent
// of the thread count.
std::vector<SpectrumLine> transition_spectrum(const HermiteWorkspace& ws,
                                              const SpectralParams& p,
                                              int n_max, int delta_n,
                                              double temperature_k,
                                              int jobs = 0);

}  // namespace sn
