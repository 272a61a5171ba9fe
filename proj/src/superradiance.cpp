#include "eqsim/superradiance.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>

#include "eqsim/errors.hpp"

namespace eqsim {

namespace {

void warn_regime(double ng2) {
  static const bool quiet = [] {
    const char* lvl = std::getenv("EQSIM_LOG");
    return lvl && std::string(lvl) == "quiet";
  }();
  if (!quiet)
    std::cerr << "eqsim: warning: N|g|^2 = " << ng2
              << " exceeds 0.1; the perturbative spectrum assumes N|g|^2 << 1"
              << std::endl;
}

Spectrum three_peak(double p_plus, double p_minus) {
  Spectrum s;
  s.offset = -1;
  s.probabilities = {p_minus, 1.0 - p_plus - p_minus, p_plus};
  return s;
}

}  // namespace

DickeEnsemble DickeEnsemble::all_excited(int n, double gamma) {
  DickeEnsemble e;
  e.n_qubits = n;
  e.gamma_single = gamma;
  e.populations.assign(n + 1, 0.0);
  e.populations[n] = 1.0;
  e.validate();
  return e;
}

DickeEnsemble DickeEnsemble::all_ground(int n, double gamma) {
  DickeEnsemble e;
  e.n_qubits = n;
  e.gamma_single = gamma;
  e.populations.assign(n + 1, 0.0);
  e.populations[0] = 1.0;
  e.validate();
  return e;
}

double DickeEnsemble::mean_excited() const {
  double m = 0.0;
  for (std::size_t k = 0; k < populations.size(); ++k)
    m += static_cast<double>(k) * populations[k];
  return m;
}

double DickeEnsemble::mean_energy() const {
  return mean_excited() - 0.5 * n_qubits;
}

void DickeEnsemble::validate() const {
  if (n_qubits < 1)
    throw std::invalid_argument("DickeEnsemble: n_qubits >= 1");
  if (populations.size() != static_cast<std::size_t>(n_qubits) + 1)
    throw std::invalid_argument("DickeEnsemble: need n_qubits+1 populations");
  if (!(gamma_single > 0.0))
    throw std::invalid_argument("DickeEnsemble: gamma_single must be > 0");
  double sum = 0.0;
  for (double p : populations) {
    if (p < 0.0)
      throw std::invalid_argument("DickeEnsemble: negative population");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("DickeEnsemble: populations must sum to 1");
}

Spectrum perturbative_spectrum(const DickeEnsemble& ens,
                               const CouplingConstant& g) {
  ens.validate();
  const double g2 = g.magnitude * g.magnitude;
  if (ens.n_qubits * g2 > 0.1) warn_regime(ens.n_qubits * g2);
  const double n_exc = ens.mean_excited();
  return three_peak(g2 * n_exc, g2 * (ens.n_qubits - n_exc));
}

Spectrum perturbative_spectrum(const std::vector<QubitDensityMatrix>& qubits,
                               const CouplingConstant& g) {
  if (qubits.empty())
    throw std::invalid_argument("perturbative_spectrum: empty ensemble");
  const double g2 = g.magnitude * g.magnitude;
  if (qubits.size() * g2 > 0.1)
    warn_regime(static_cast<double>(qubits.size()) * g2);
  double n_exc = 0.0;
  for (const auto& q : qubits) {
    q.validate();
    n_exc += q.p_excited;
  }
  return three_peak(g2 * n_exc,
                    g2 * (static_cast<double>(qubits.size()) - n_exc));
}

DecayCurve dicke_decay(const DickeEnsemble& ens,
                       const std::vector<double>& tau_grid) {
  ens.validate();
  if (tau_grid.empty())
    throw std::invalid_argument("dicke_decay: empty tau grid");
  for (std::size_t i = 1; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] > tau_grid[i - 1]))
      throw std::invalid_argument("dicke_decay: tau grid must increase");
  if (tau_grid.front() < 0.0)
    throw std::invalid_argument("dicke_decay: tau must be >= 0");

  const int n = ens.n_qubits;
  // Gamma(m) = gamma (J+M)(J-M+1) with m = J+M excited: gamma m (n - m + 1).
  std::vector<double> rates(n + 1);
  for (int m = 0; m <= n; ++m)
    rates[m] = ens.gamma_single * m * (n - m + 1);

  auto deriv = [&](const std::vector<double>& p, std::vector<double>& d) {
    for (int m = 0; m <= n; ++m) {
      d[m] = -rates[m] * p[m];
      if (m < n) d[m] += rates[m + 1] * p[m + 1];
    }
  };

  // Fastest rate resolved: step bounded by 0.01 / (gamma N^2).
  const double hmax = 0.01 / (ens.gamma_single * n * n);

  std::vector<double> p = ens.populations;
  std::vector<double> k1(n + 1), k2(n + 1), k3(n + 1), k4(n + 1), tmp(n + 1);
  auto rk4_step = [&](double h) {
    deriv(p, k1);
    for (int m = 0; m <= n; ++m) tmp[m] = p[m] + 0.5 * h * k1[m];
    deriv(tmp, k2);
    for (int m = 0; m <= n; ++m) tmp[m] = p[m] + 0.5 * h * k2[m];
    deriv(tmp, k3);
    for (int m = 0; m <= n; ++m) tmp[m] = p[m] + h * k3[m];
    deriv(tmp, k4);
    for (int m = 0; m <= n; ++m)
      p[m] += h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
  };

  DecayCurve out;
  out.tau = tau_grid;
  out.e_mean.reserve(tau_grid.size());
  out.intensity.reserve(tau_grid.size());
  out.populations.reserve(tau_grid.size());

  double t = 0.0;
  for (double target : tau_grid) {
    const double span = target - t;
    if (span > 0.0) {
      const int nsub = static_cast<int>(std::ceil(span / hmax));
      const double h = span / nsub;
      for (int s = 0; s < nsub; ++s) rk4_step(h);
      t = target;
    }
    double sum = 0.0, emean = -0.5 * n, inten = 0.0;
    for (int m = 0; m <= n; ++m) {
      if (p[m] < 0.0) {
        if (p[m] < -1e-9)
          throw accuracy_error(
              "dicke_decay: integration lost positivity; reduce the grid "
              "spacing or gamma*N^2");
        p[m] = 0.0;
      }
      sum += p[m];
      emean += static_cast<double>(m) * p[m];
      inten += rates[m] * p[m];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw accuracy_error("dicke_decay: population sum drifted; reduce step");
    out.e_mean.push_back(emean);
    out.intensity.push_back(inten);
    out.populations.push_back(p);
  }
  return out;
}

EmissionCurve reconstruct_emission(const ScanSeries& scan,
                                   const CouplingConstant& g) {
  if (scan.kind != ScanSeries::Observable::average_gain)
    throw std::invalid_argument(
        "reconstruct_emission: scan must carry average energy gains");
  const auto& pts = scan.points;
  if (pts.size() < 3)
    throw std::invalid_argument("reconstruct_emission: need >= 3 points");
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i].tau > pts[i - 1].tau))
      throw std::invalid_argument(
          "reconstruct_emission: tau grid must be strictly increasing");
  if (!(g.magnitude > 0.0))
    throw std::invalid_argument("reconstruct_emission: |g| must be > 0");

  const double inv = 1.0 / (2.0 * g.magnitude * g.magnitude);
  EmissionCurve out;
  out.tau.reserve(pts.size());
  out.e_qubits.reserve(pts.size());
  for (const auto& p : pts) {
    out.tau.push_back(p.tau);
    out.e_qubits.push_back(p.value * inv);
  }
  const std::size_t n = out.tau.size();
  out.intensity.resize(n);
  out.intensity[0] =
      -(out.e_qubits[1] - out.e_qubits[0]) / (out.tau[1] - out.tau[0]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    out.intensity[i] = -(out.e_qubits[i + 1] - out.e_qubits[i - 1]) /
                       (out.tau[i + 1] - out.tau[i - 1]);
  out.intensity[n - 1] = -(out.e_qubits[n - 1] - out.e_qubits[n - 2]) /
                         (out.tau[n - 1] - out.tau[n - 2]);
  return out;
}

}  // namespace eqsim
