#include "eqsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eqsim/constants.hpp"
#include "eqsim/errors.hpp"

namespace eqsim {

namespace {

using cd = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;
constexpr double kRefineTol = 1e-8;

void TrajectoryGridCheck(const TrajectoryGrid& g) {
  if (g.steps < 1001 || g.steps % 2 == 0)
    throw std::invalid_argument("TrajectoryGrid: steps must be odd and >= 1001");
  if (!(g.z_extent >= 20.0))
    throw std::invalid_argument("TrajectoryGrid: z_extent must be >= 20");
}

struct Mat2 {
  cd a, b, c, d;  // [[a, b],[c, d]], basis (g, e)
};

Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
          x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

// Coupling amplitude f(t) = (d . E(t)) e^{i w0 (t + t0)} / hbar for the
// electron at (r_perp, 0, v t); V_I(t) = hbar [[0, f*],[f, 0]].
struct FieldSampler {
  double dx, dz, w0, rp, v, gamma, t0;

  cd operator()(double t) const {
    const double z = v * t;
    const double denom =
        std::pow(rp * rp + gamma * gamma * z * z, 1.5) * 4.0 * kPi *
        consts::vacuum_permittivity;
    const double ex = consts::elementary_charge * gamma * rp / denom;
    const double ez = consts::elementary_charge * gamma * z / denom;
    return (dx * ex + dz * ez) / consts::hbar *
           std::polar(1.0, w0 * (t + t0));
  }
};

Mat2 integrate_ordered_product(const FieldSampler& f, double tmax, int steps) {
  const int intervals = steps - 1;
  const double h = 2.0 * tmax / intervals;
  Mat2 u{1.0, 0.0, 0.0, 1.0};
  const cd i(0.0, 1.0);
  for (int k = 0; k < intervals; ++k) {
    const double tm = -tmax + (k + 0.5) * h;
    const cd fk = f(tm);
    const double af = std::abs(fk);
    if (af == 0.0) continue;
    const double phi = h * af;
    const double cs = std::cos(phi);
    const double sn = std::sin(phi) / af;
    const Mat2 step{cs, -i * sn * std::conj(fk), -i * sn * fk, cs};
    u = mul(step, u);
  }
  return u;
}

Mat2 integrate_rk4(const FieldSampler& f, double tmax, int steps) {
  const int intervals = steps - 1;
  const double h = 2.0 * tmax / intervals;
  Mat2 u{1.0, 0.0, 0.0, 1.0};
  const cd i(0.0, 1.0);
  auto rhs = [&](double t, const Mat2& m) -> Mat2 {
    const cd fk = f(t);
    // dU/dt = -i [[0, f*],[f, 0]] U
    return {-i * std::conj(fk) * m.c, -i * std::conj(fk) * m.d,
            -i * fk * m.a, -i * fk * m.b};
  };
  auto axpy = [](const Mat2& m, double s, const Mat2& k) -> Mat2 {
    return {m.a + s * k.a, m.b + s * k.b, m.c + s * k.c, m.d + s * k.d};
  };
  for (int k = 0; k < intervals; ++k) {
    const double t = -tmax + k * h;
    const Mat2 k1 = rhs(t, u);
    const Mat2 k2 = rhs(t + 0.5 * h, axpy(u, 0.5 * h, k1));
    const Mat2 k3 = rhs(t + 0.5 * h, axpy(u, 0.5 * h, k2));
    const Mat2 k4 = rhs(t + h, axpy(u, h, k3));
    u = {u.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
         u.b + h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b),
         u.c + h / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c),
         u.d + h / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d)};
  }
  return u;
}

// U = cos(Om) I - i sin(Om)/Om [[-K, G*],[G, K]]  ->  (G, K).
void extract_coupling(const Mat2& u, cd& G, double& K) {
  const double cos_om = 0.5 * (u.a + u.d).real();
  const double kv = 0.5 * (u.a - u.d).imag();  // K sin(Om)/Om
  const cd gv = cd(0.0, 1.0) * u.c;            // G sin(Om)/Om
  const double sin_om = std::sqrt(std::norm(gv) + kv * kv);
  const double om = std::atan2(sin_om, cos_om);
  const double fac = sin_om > 1e-200 ? om / sin_om : 1.0;
  G = gv * fac;
  K = kv * fac;
}

struct SingleRun {
  cd G;
  double K;
};

SingleRun run_once(const PhysicalParams& p, const TrajectoryGrid& grid,
                   int steps) {
  const double gamma = grid.relativistic_field ? p.lorentz_gamma() : 1.0;
  FieldSampler f{p.dipole_x, p.dipole_z, p.omega0, p.impact_parameter,
                 p.speed(), gamma, grid.time_origin};
  const double tmax = grid.z_extent * p.impact_parameter / p.speed();
  const Mat2 u = grid.scheme == IntegrationScheme::ordered_product
                     ? integrate_ordered_product(f, tmax, steps)
                     : integrate_rk4(f, tmax, steps);
  SingleRun r;
  extract_coupling(u, r.G, r.K);
  return r;
}

}  // namespace

void TrajectoryGrid::validate() const { TrajectoryGridCheck(*this); }

ExactCoupling exact_coupling(const PhysicalParams& p,
                             const TrajectoryGrid& grid) {
  p.validate();
  grid.validate();

  int steps = grid.steps;
  SingleRun coarse = run_once(p, grid, steps);
  for (int round = 0; round < 5; ++round) {
    const int fine_steps = 2 * steps - 1;  // doubles the interval count
    const SingleRun fine = run_once(p, grid, fine_steps);
    const double delta =
        std::abs(fine.G - coarse.G) / std::max(std::abs(fine.G), 1e-30);
    if (delta <= kRefineTol) {
      ExactCoupling out;
      out.G = fine.G;
      out.K = fine.K;
      out.converged_steps = fine_steps;
      out.refinement_delta = delta;
      return out;
    }
    steps = fine_steps;
    coarse = fine;
  }
  throw accuracy_error(
      "exact_coupling: grid refinement did not converge to 1e-8");
}

Spectrum exact_multiqubit_scattering(
    const std::vector<QubitDensityMatrix>& qubits, const ElectronLadderState& e,
    const CouplingConstant& g) {
  const int nq = static_cast<int>(qubits.size());
  if (nq < 1 || nq > 6)
    throw std::invalid_argument(
        "exact_multiqubit_scattering: 1 <= n_qubits <= 6");
  e.validate();

  // Guarded window: each of the N scattering factors shifts at most one step.
  const int w0 = e.offset - nq;
  const int w1 = e.offset + static_cast<int>(e.amplitudes.size()) - 1 + nq;
  const std::size_t width = static_cast<std::size_t>(w1 - w0 + 1);
  const std::size_t dim = width << nq;

  // Mixed qubits: spectral decomposition per qubit, mix the pure outcomes.
  std::vector<std::array<PureQubitComponent, 2>> comps;
  comps.reserve(qubits.size());
  for (const auto& q : qubits) {
    q.validate();
    comps.push_back(decompose(q));
  }

  Spectrum spec;
  spec.offset = w0;
  spec.half_integer = e.half_integer;
  spec.probabilities.assign(width, 0.0);

  const double omega =
      std::sqrt(g.magnitude * g.magnitude + g.kappa * g.kappa);
  const double cs = std::cos(omega);
  const double snc = omega > 0.0 ? std::sin(omega) / omega : 1.0;
  const cd gval = g.value();
  const cd i(0.0, 1.0);

  std::vector<cd> psi(dim);
  for (int combo = 0; combo < (1 << nq); ++combo) {
    double weight = 1.0;
    for (int qi = 0; qi < nq; ++qi)
      weight *= comps[qi][(combo >> qi) & 1].weight;
    if (weight <= 0.0) continue;

    // Product initial state: electron amplitudes x per-qubit spinors.
    std::fill(psi.begin(), psi.end(), cd(0.0, 0.0));
    for (std::size_t ei = 0; ei < e.amplitudes.size(); ++ei) {
      const std::size_t j =
          static_cast<std::size_t>(e.offset + static_cast<int>(ei) - w0);
      for (std::size_t s = 0; s < (1u << nq); ++s) {
        cd amp = e.amplitudes[ei];
        for (int qi = 0; qi < nq; ++qi) {
          const auto& pc = comps[qi][(combo >> qi) & 1];
          amp *= ((s >> qi) & 1) ? pc.amp_e : pc.amp_g;
        }
        psi[j * (1u << nq) + s] = amp;
      }
    }

    // Apply S_i for each qubit: blocks pair |n+1, qi=g> with |n, qi=e>.
    for (int qi = 0; qi < nq; ++qi) {
      const std::size_t bit = 1u << qi;
      for (std::size_t j = 0; j + 1 < width; ++j) {
        for (std::size_t s = 0; s < (1u << nq); ++s) {
          if (s & bit) continue;  // enumerate blocks by the qi=g member
          cd& a = psi[(j + 1) * (1u << nq) + s];        // |n+1, g_i>
          cd& b = psi[j * (1u << nq) + (s | bit)];      // |n,   e_i>
          const cd na = cs * a - i * snc * (-g.kappa * a + std::conj(gval) * b);
          const cd nb = cs * b - i * snc * (gval * a + g.kappa * b);
          a = na;
          b = nb;
        }
      }
    }

    for (std::size_t j = 0; j < width; ++j) {
      double pj = 0.0;
      for (std::size_t s = 0; s < (1u << nq); ++s)
        pj += std::norm(psi[j * (1u << nq) + s]);
      spec.probabilities[j] += weight * pj;
    }
  }
  return spec;
}

}  // namespace eqsim
