// Physical constants (SI) and boundary unit conversions.
// Internal unit system is SI throughout; eV / Debye / nm are accepted at the
// API boundary and converted exactly once.
#pragma once

#include <cmath>

namespace eqsim {
namespace consts {

inline constexpr double elementary_charge = 1.602176634e-19;  // C, exact
inline constexpr double electron_volt     = 1.602176634e-19;  // J, exact
inline constexpr double speed_of_light    = 299792458.0;      // m/s, exact
inline constexpr double hbar              = 1.054571817e-34;  // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double electron_mass     = 9.1093837015e-31;    // kg
inline constexpr double debye             = 3.33564e-30;      // C m, defined

}  // namespace consts

/// Qubit gap in eV -> angular frequency in rad/s.
inline double ev_to_angular_frequency(double ev) {
  return ev * consts::electron_volt / consts::hbar;
}

inline double debye_to_si(double d) { return d * consts::debye; }

inline double lorentz_gamma_of_beta(double beta) {
  return 1.0 / std::sqrt(1.0 - beta * beta);
}

/// Electron kinetic energy in keV -> beta, relativistic.
inline double kinetic_energy_kev_to_beta(double kev) {
  const double mc2_kev =
      consts::electron_mass * consts::speed_of_light * consts::speed_of_light /
      (1e3 * consts::electron_volt);
  const double gamma = 1.0 + kev / mc2_kev;
  return std::sqrt(1.0 - 1.0 / (gamma * gamma));
}

}  // namespace eqsim
