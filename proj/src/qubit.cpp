#include "eqsim/qubit.hpp"

#include <cmath>
#include <stdexcept>

namespace eqsim {

namespace {
using cd = std::complex<double>;
}

void QubitDensityMatrix::validate() const {
  if (!(p_excited >= -1e-14 && p_excited <= 1.0 + 1e-14))
    throw std::invalid_argument("QubitDensityMatrix: p_excited outside [0,1]");
  if (std::norm(coherence) > p_excited * (1.0 - p_excited) + 1e-12)
    throw std::invalid_argument(
        "QubitDensityMatrix: positivity |q|^2 <= p(1-p) violated");
}

double QubitDensityMatrix::purity() const {
  const double pg = 1.0 - p_excited;
  return pg * pg + p_excited * p_excited + 2.0 * std::norm(coherence);
}

DecayParams::DecayParams(double t1_s, double t2_s, double omega0_rad_s)
    : t1(t1_s), t2(t2_s), omega0(omega0_rad_s) {
  if (!(t1 > 0.0) || !(t2 > 0.0))
    throw std::invalid_argument("DecayParams: t1, t2 must be > 0");
  if (t2 > 2.0 * t1 * (1.0 + 1e-12))
    throw std::invalid_argument(
        "DecayParams: t2 <= 2 t1 (complete positivity) violated");
}

QubitDensityMatrix bloch_state(double theta_a, double phi_a) {
  if (!(theta_a >= 0.0 && theta_a <= 3.14159265358979323846 + 1e-12))
    throw std::invalid_argument("bloch_state: theta_a must lie in [0, pi]");
  const double c = std::cos(0.5 * theta_a);
  const double s = std::sin(0.5 * theta_a);
  QubitDensityMatrix rho;
  rho.p_excited = c * c;
  rho.coherence = std::polar(s * c, -phi_a);
  return rho;
}

QubitDensityMatrix evolve(const QubitDensityMatrix& rho, double tau,
                          const DecayParams& d, Frame frame) {
  if (tau < 0.0) throw std::invalid_argument("evolve: tau must be >= 0");
  QubitDensityMatrix out;
  out.p_excited = rho.p_excited * std::exp(-tau / d.t1);
  out.coherence = rho.coherence * std::exp(-tau / d.t2);
  if (frame == Frame::lab)
    out.coherence *= std::polar(1.0, d.omega0 * tau);
  return out;
}

QubitDensityMatrix apply_rotation(const QubitDensityMatrix& rho,
                                  const std::array<double, 3>& axis,
                                  double angle) {
  const double n2 =
      axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2];
  if (std::abs(n2 - 1.0) > 1e-9)
    throw std::invalid_argument("apply_rotation: axis must be a unit vector");

  // Basis ordering (g,e): sigma_x = [[0,1],[1,0]], sigma_y = [[0,i],[-i,0]],
  // sigma_z = diag(-1,+1) (so |e> carries +1 as in the qubit Hamiltonian).
  const double ch = std::cos(0.5 * angle);
  const double sh = std::sin(0.5 * angle);
  const cd i(0.0, 1.0);
  cd u[2][2];
  u[0][0] = ch - i * sh * (-axis[2]);
  u[0][1] = -i * sh * (axis[0] + i * axis[1]);
  u[1][0] = -i * sh * (axis[0] - i * axis[1]);
  u[1][1] = ch - i * sh * (axis[2]);

  const cd r[2][2] = {{1.0 - rho.p_excited, rho.coherence},
                      {std::conj(rho.coherence), rho.p_excited}};
  cd ur[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      ur[a][b] = u[a][0] * r[0][b] + u[a][1] * r[1][b];
  cd out[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out[a][b] =
          ur[a][0] * std::conj(u[b][0]) + ur[a][1] * std::conj(u[b][1]);

  QubitDensityMatrix res;
  res.p_excited = out[1][1].real();
  res.coherence = out[0][1];
  return res;
}

std::array<PureQubitComponent, 2> decompose(const QubitDensityMatrix& rho) {
  const double a = 1.0 - rho.p_excited;  // <g|rho|g>
  const double c = rho.p_excited;        // <e|rho|e>
  const cd b = rho.coherence;            // <g|rho|e>
  const double r = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(b));
  const double lp = 0.5 * (a + c) + r;
  const double lm = 0.5 * (a + c) - r;

  std::array<PureQubitComponent, 2> comps{};
  const double lams[2] = {lp, lm};
  for (int k = 0; k < 2; ++k) {
    const double lam = lams[k];
    comps[k].weight = lam > 0.0 ? lam : 0.0;
    // Eigenvector of [[a, b],[b*, c]]: rows give (b, lam-a) and
    // (lam-c, b*); take the better-conditioned one.
    const double n1 = std::norm(b) + (lam - a) * (lam - a);
    const double n2 = (lam - c) * (lam - c) + std::norm(b);
    cd vg, ve;
    if (n1 >= n2) {
      vg = b;
      ve = lam - a;
    } else {
      vg = lam - c;
      ve = std::conj(b);
    }
    double n = std::sqrt(std::norm(vg) + std::norm(ve));
    if (n < 1e-150) {  // fully degenerate rho = I/2
      vg = k == 0 ? 1.0 : 0.0;
      ve = k == 0 ? 0.0 : 1.0;
      n = 1.0;
    }
    comps[k].amp_g = vg / n;
    comps[k].amp_e = ve / n;
  }
  return comps;
}

}  // namespace eqsim
