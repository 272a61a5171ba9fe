// Collective N-qubit observables: perturbative gain/loss spectra, the
// symmetric Dicke cascade, and emission reconstruction from electron scans.
#pragma once

#include <vector>

#include "eqsim/coupling.hpp"
#include "eqsim/experiments.hpp"
#include "eqsim/qubit.hpp"
#include "eqsim/scattering.hpp"

namespace eqsim {

/// Symmetric (Dicke) ensemble of N co-located qubits. populations[m] is the
/// probability of exactly m excited qubits (m = J + M, J = N/2); the mean
/// energy convention is symmetric, E in [-N/2, +N/2] units of hbar*omega0.
struct DickeEnsemble {
  int n_qubits = 1;
  std::vector<double> populations;  // size n_qubits + 1, indexed by m
  double gamma_single = 1.0;        // single-qubit radiative rate, 1/s

  static DickeEnsemble all_excited(int n, double gamma);
  static DickeEnsemble all_ground(int n, double gamma);

  double mean_energy() const;  // units hbar*omega0
  double mean_excited() const;
  void validate() const;
};

/// First-order electron spectrum for weak coupling:
///   P+ = |g|^2 sum_i <sigma+_i sigma-_i>   (gain feeds on excited qubits)
///   P- = |g|^2 sum_i <sigma-_i sigma+_i>,  P0 = 1 - P+ - P-.
/// Warns (stderr) when N |g|^2 > 0.1. Labels are -1, 0, +1.
Spectrum perturbative_spectrum(const DickeEnsemble& ens,
                               const CouplingConstant& g);
Spectrum perturbative_spectrum(const std::vector<QubitDensityMatrix>& qubits,
                               const CouplingConstant& g);

struct DecayCurve {
  std::vector<double> tau;
  std::vector<double> e_mean;     // units hbar*omega0
  std::vector<double> intensity;  // units hbar*omega0 per second
  std::vector<std::vector<double>> populations;  // p_m at each tau
};

/// Integrates the symmetric-cascade rate equations
///   dp_M/dtau = Gamma_{M+1} p_{M+1} - Gamma_M p_M,
///   Gamma_M = gamma (J+M)(J-M+1),
/// with RK4 substeps bounded by 0.01/(gamma N^2); intensity is the exact
/// balance sum Gamma_M p_M.
DecayCurve dicke_decay(const DickeEnsemble& ens,
                       const std::vector<double>& tau_grid);

struct EmissionCurve {
  std::vector<double> tau;
  std::vector<double> e_qubits;   // reconstructed <E_qubits>, hbar*omega0
  std::vector<double> intensity;  // -d<E_qubits>/dtau, central differences
};

/// Inverts <E_gain>(tau) = 2 |g|^2 <E_qubits>(tau) from a probe-electron
/// scan and differentiates numerically. The scan must carry average_gain
/// values on a strictly increasing tau grid.
EmissionCurve reconstruct_emission(const ScanSeries& scan,
                                   const CouplingConstant& g);

}  // namespace eqsim
