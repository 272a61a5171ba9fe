// Electron-qubit coupling constant, optimal probe velocity, and the
// Magnus-order scale used to bound the neglected diagonal term.
#pragma once

#include <complex>
#include <string>
#include <vector>

namespace eqsim {

/// Geometry and kinematics of a single electron-qubit encounter, SI units.
/// Use from_lab_units() to construct from Debye / eV / nm inputs.
struct PhysicalParams {
  double dipole_x = 0.0;  // C m
  double dipole_y = 0.0;  // C m; contributes zero to g (field has no
                          // y-component on the y=0 trajectory plane)
  double dipole_z = 0.0;  // C m
  double omega0 = 0.0;    // rad/s
  double impact_parameter = 0.0;  // m
  double beta = 0.0;              // v/c in (0,1)

  double speed() const;
  double lorentz_gamma() const;  // recomputed from beta, never stored
  double dipole_magnitude() const;

  static PhysicalParams from_lab_units(double dx_debye, double dy_debye,
                                       double dz_debye, double gap_ev,
                                       double r_perp_nm, double beta);

  /// Throws std::invalid_argument on hard violations; returns advisory
  /// notes (e.g. a nonzero dipole_y) otherwise.
  std::vector<std::string> validate() const;
};

struct CouplingConstant {
  double magnitude = 0.0;  // |g| >= 0
  double phase = 0.0;      // principal value in (-pi, pi]
  double kappa = 0.0;      // second-order diagonal constant; 0 at first order

  std::complex<double> value() const;
  static CouplingConstant from_complex(std::complex<double> g,
                                       double kappa = 0.0);
};

/// First-order Magnus coupling for a relativistic point charge:
///   g = (e w0 / 2 pi eps0 gamma hbar v^2)
///       [ d_x K1(w0 r/ v gamma) + i (d_z/gamma) K0(w0 r / v gamma) ].
/// kappa is left at 0; the propagator oracle measures the actual value.
CouplingConstant coupling_g(const PhysicalParams& p);

enum class DipoleOrientation { x, z };

struct OptimalVelocity {
  double beta = 0.0;  // v_opt / c
  double u = 0.0;     // w0 r_perp / v_opt at the optimum
  bool relativistic_warning = false;  // beta >= 0.3: nonrelativistic
                                      // optimum assumption is strained
};

/// Velocity maximizing |g| in the nonrelativistic limit. Stationarity of
/// K1(u)/u^{-2}... reduces to K1(u) = u K0(u) (x dipole) or
/// 2 K0(u) = u K1(u) (z dipole); solved by bisection to |du| <= 1e-6.
OptimalVelocity optimal_velocity(DipoleOrientation orientation, double omega0,
                                 double r_perp);

/// Scale of the n-th Magnus term, (1/n!) (e d / 4 pi eps0 hbar v r)^n,
/// with d the dipole magnitude. Bounds the neglected kappa.
double magnus_order_estimate(int n, const PhysicalParams& p);

}  // namespace eqsim
