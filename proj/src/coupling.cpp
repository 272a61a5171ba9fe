#include "eqsim/coupling.hpp"

#include <cmath>
#include <stdexcept>

#include "eqsim/bessel.hpp"
#include "eqsim/constants.hpp"

namespace eqsim {

double PhysicalParams::speed() const { return beta * consts::speed_of_light; }

double PhysicalParams::lorentz_gamma() const {
  return lorentz_gamma_of_beta(beta);
}

double PhysicalParams::dipole_magnitude() const {
  return std::sqrt(dipole_x * dipole_x + dipole_y * dipole_y +
                   dipole_z * dipole_z);
}

PhysicalParams PhysicalParams::from_lab_units(double dx_debye, double dy_debye,
                                              double dz_debye, double gap_ev,
                                              double r_perp_nm, double beta) {
  PhysicalParams p;
  p.dipole_x = debye_to_si(dx_debye);
  p.dipole_y = debye_to_si(dy_debye);
  p.dipole_z = debye_to_si(dz_debye);
  p.omega0 = ev_to_angular_frequency(gap_ev);
  p.impact_parameter = r_perp_nm * 1e-9;
  p.beta = beta;
  return p;
}

std::vector<std::string> PhysicalParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("PhysicalParams: beta must lie in (0,1)");
  if (!(impact_parameter > 0.0))
    throw std::invalid_argument("PhysicalParams: impact_parameter must be > 0");
  if (!(omega0 > 0.0))
    throw std::invalid_argument("PhysicalParams: omega0 must be > 0");
  std::vector<std::string> notes;
  if (dipole_y != 0.0) {
    notes.push_back(
        "dipole_y does not couple: the electron's field on the y=0 trajectory "
        "plane has no y-component, so this component contributes zero to g");
  }
  return notes;
}

std::complex<double> CouplingConstant::value() const {
  return std::polar(magnitude, phase);
}

CouplingConstant CouplingConstant::from_complex(std::complex<double> g,
                                                double kappa) {
  CouplingConstant c;
  c.magnitude = std::abs(g);
  c.phase = c.magnitude > 0.0 ? std::arg(g) : 0.0;
  // std::arg returns [-pi, pi]; fold -pi onto the principal branch end.
  if (c.phase <= -3.14159265358979323846) c.phase = 3.14159265358979323846;
  c.kappa = kappa;
  return c;
}

CouplingConstant coupling_g(const PhysicalParams& p) {
  p.validate();
  const double v = p.speed();
  const double gamma = p.lorentz_gamma();
  const double u = p.omega0 * p.impact_parameter / (v * gamma);
  const double pre =
      consts::elementary_charge * p.omega0 /
      (2.0 * 3.14159265358979323846 * consts::vacuum_permittivity * gamma *
       consts::hbar * v * v);
  std::complex<double> g(0.0, 0.0);
  if (p.dipole_x != 0.0) g += pre * p.dipole_x * bessel_k1(u);
  if (p.dipole_z != 0.0)
    g += std::complex<double>(0.0, pre * p.dipole_z * bessel_k0(u) / gamma);
  return CouplingConstant::from_complex(g);
}

namespace {

// Root functions for the optimal-velocity condition, u = w0 r / v.
double root_fn(DipoleOrientation o, double u) {
  if (o == DipoleOrientation::x) return u * bessel_k0(u) - bessel_k1(u);
  return u * bessel_k1(u) - 2.0 * bessel_k0(u);
}

}  // namespace

OptimalVelocity optimal_velocity(DipoleOrientation orientation, double omega0,
                                 double r_perp) {
  if (!(omega0 > 0.0) || !(r_perp > 0.0))
    throw std::invalid_argument("optimal_velocity: omega0, r_perp must be > 0");
  // Both roots lie in (1, 2): f(1) < 0 < f(2) for either orientation.
  double lo = 0.5, hi = 4.0;
  double flo = root_fn(orientation, lo);
  if (!(flo < 0.0) || !(root_fn(orientation, hi) > 0.0))
    throw std::runtime_error("optimal_velocity: bracket failure");
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (root_fn(orientation, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  OptimalVelocity res;
  res.u = 0.5 * (lo + hi);
  res.beta = omega0 * r_perp / (res.u * consts::speed_of_light);
  res.relativistic_warning = res.beta >= 0.3;
  return res;
}

double magnus_order_estimate(int n, const PhysicalParams& p) {
  if (n < 1) throw std::invalid_argument("magnus_order_estimate: n >= 1");
  p.validate();
  const double x = consts::elementary_charge * p.dipole_magnitude() /
                   (4.0 * 3.14159265358979323846 * consts::vacuum_permittivity *
                    consts::hbar * p.speed() * p.impact_parameter);
  double scale = 1.0;
  for (int k = 1; k <= n; ++k) scale *= x / k;
  return scale;
}

}  // namespace eqsim
