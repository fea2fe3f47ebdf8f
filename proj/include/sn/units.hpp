#pragma once

#include "sn/constants.hpp"

namespace sn {

// Oscillator-unit scaling for a trapped particle of total mass M in a trap of
// angular frequency omega0. Solvers work in these dimensionless units; every
// external interface stays in SI.
struct OscillatorUnits {
  double mass = 0.0;          // kg
  double omega0 = 0.0;        // s^-1
  double length_scale = 0.0;  // sqrt(hbar / (M omega0)), m
  double energy_scale = 0.0;  // hbar * omega0, J
  double time_scale = 0.0;    // 1 / omega0, s

  static OscillatorUnits make(double mass_kg, double omega0);

  double to_dimensionless_length(double x_m) const { return x_m / length_scale; }
  double from_dimensionless_length(double x) const { return x * length_scale; }
  double to_dimensionless_time(double t_s) const { return t_s / time_scale; }
  double from_dimensionless_time(double t) const { return t * time_scale; }
  double to_dimensionless_energy(double e_j) const { return e_j / energy_scale; }
  double from_dimensionless_energy(double e) const { return e * energy_scale; }
};

// Mean occupation 1/(exp(hbar omega0 / kB T) - 1); 0 at T = 0.
double thermal_occupation(double temperature_k, double omega0);

}  // namespace sn
