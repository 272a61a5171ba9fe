// Closed-form electron-qubit scattering on the truncated ladder, EELS
// spectra, and derived observables.
#pragma once

#include <complex>
#include <vector>

#include "eqsim/coupling.hpp"
#include "eqsim/electron_state.hpp"
#include "eqsim/qubit.hpp"

namespace eqsim {

/// Sideband probabilities P_n over a window of (half-)integer labels.
struct Spectrum {
  int offset = 0;  // storage index of probabilities[0]
  bool half_integer = false;
  std::vector<double> probabilities;
  double leak = 0.0;  // residual probability outside the window

  double label(std::size_t i) const {
    return offset + static_cast<double>(i) + (half_integer ? 0.5 : 0.0);
  }
  /// P at a given label; 0 outside the window.
  double prob_at(double lbl) const;
  double total() const;  // sum P_n + leak
  double mean_label() const;
};

/// Joint electron (x) qubit state after scattering, as a mixture of at most
/// two pure components (one per eigenvector of the incoming qubit rho).
struct JointState {
  struct Component {
    double weight = 0.0;
    std::vector<std::complex<double>> amp_g;  // electron amps with qubit |g>
    std::vector<std::complex<double>> amp_e;
  };
  int offset = 0;
  bool half_integer = false;
  std::vector<Component> components;

  double norm() const;  // weighted total probability
};

/// Applies S = exp(-i(g b sigma+ + g* b+ sigma- + kappa sigma_z)) exactly on
/// the guarded window (the window is padded so the one-step shift never
/// truncates; extra_guard widens it further).
JointState apply_scattering(const ElectronLadderState& e,
                            const QubitDensityMatrix& rho,
                            const CouplingConstant& g, int extra_guard = 0);

/// Electron spectrum of a joint state (trace over the qubit).
Spectrum electron_spectrum(const JointState& js);

/// EELS spectrum by the closed form
///   P_n = |C_n|^2 cos^2|g| + p|C_{n-1}|^2 sin^2|g| + (1-p)|C_{n+1}|^2 sin^2|g|
///       + 2 Re{ i cos|g| sin|g| (C_n C*_{n-1} q e^{i phi_g}
///                               + C_n C*_{n+1} q* e^{-i phi_g}) }.
/// With kappa != 0 the closed form no longer applies and the exact S-matrix
/// route is used instead.
Spectrum eels_spectrum(const ElectronLadderState& e,
                       const QubitDensityMatrix& rho,
                       const CouplingConstant& g);

/// P(+1/2) - P(-1/2) for a duo-class spectrum; throws std::invalid_argument
/// when the principal two-peak structure is absent.
double delta_p(const Spectrum& s);

/// Mean sideband shift sum_n n P_n in units of hbar*omega0. Equals the
/// energy gain for inputs whose initial mean sideband is zero (unshaped,
/// duo, symmetric combs).
double average_gain(const ElectronLadderState& e, const QubitDensityMatrix& rho,
                    const CouplingConstant& g);

}  // namespace eqsim
