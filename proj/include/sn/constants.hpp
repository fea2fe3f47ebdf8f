#pragma once

namespace sn {

// Frozen reference values, fixed at build time so that published numbers are
// reproducible bit for bit. All SI.
struct PhysicalConstants {
  double G;     // gravitational constant, m^3 kg^-1 s^-2
  double hbar;  // reduced Planck constant, J s
  double amu;   // atomic mass unit, kg
  double kB;    // Boltzmann constant, J K^-1
};

inline constexpr PhysicalConstants constants{
    6.674e-11,
    1.0546e-34,
    1.6605e-27,
    1.3807e-23,
};

// I/O-boundary unit helpers. Internals are SI throughout.
constexpr double u_to_kg(double mass_u) { return mass_u * constants.amu; }
constexpr double kg_to_u(double mass_kg) { return mass_kg / constants.amu; }
constexpr double pm_to_m(double pm) { return pm * 1e-12; }
constexpr double um_to_m(double um) { return um * 1e-6; }
constexpr double g_cm3_to_kg_m3(double rho) { return rho * 1e3; }
constexpr double mk_to_k(double mk) { return mk * 1e-3; }

}  // namespace sn
