#include "sn/units.hpp"

#include <cmath>

#include "sn/errors.hpp"

namespace sn {

OscillatorUnits OscillatorUnits::make(double mass_kg, double omega0) {
  if (!(mass_kg > 0.0)) throw ValidationError("oscillator units: mass must be > 0");
  if (!(omega0 > 0.0)) throw ValidationError("oscillator units: omega0 must be > 0");
  OscillatorUnits u;
  u.mass = mass_kg;
  u.omega0 = omega0;
  u.length_scale = std::sqrt(constants.hbar / (mass_kg * omega0));
  u.energy_scale = constants.hbar * omega0;
  u.time_scale = 1.0 / omega0;
  return u;
}

double thermal_occupation(double temperature_k, double omega0) {
  if (temperature_k < 0.0) throw ValidationError("thermal occupation: T must be >= 0");
  if (!(omega0 > 0.0)) throw ValidationError("thermal occupation: omega0 must be > 0");
  if (temperature_k == 0.0) return 0.0;
  const double x = constants.hbar * omega0 / (constants.kB * temperature_k);
  return 1.0 / std::expm1(x);
}

}  // namespace sn
