// Shaped free-electron states on the discrete sideband ladder.
#pragma once

#include <complex>
#include <vector>

namespace eqsim {

/// Amplitudes C_n on a truncated integer ladder. When half_integer is set
/// the physical sideband labels are offset + i + 1/2 (duo convention);
/// storage stays integer so every ladder operation shares one code path.
struct ElectronLadderState {
  int offset = 0;  // storage index of amplitudes[0]
  bool half_integer = false;
  std::vector<std::complex<double>> amplitudes;

  double label(std::size_t i) const {
    return offset + static_cast<double>(i) + (half_integer ? 0.5 : 0.0);
  }
  double norm_sq() const;
  /// Throws std::invalid_argument if empty or norm deviates from 1 by >1e-12.
  void validate() const;
};

/// Single peak at n = 0 (the zero-loss electron).
ElectronLadderState make_unshaped();

/// Equal superposition of two energies split by the qubit gap:
/// amplitudes (1, e^{i phi_e})/sqrt(2) on labels -1/2, +1/2.
ElectronLadderState make_duo(double phi_e);

/// Laser-modulated comb C_n = e^{i phi n} J_n(2 g_mag) truncated at
/// |n| <= window and renormalized. Throws truncation_error when the
/// truncated norm deficit exceeds 1e-10.
ElectronLadderState make_pinem(double g_mag, double phi, int window);

/// Free-propagation quadratic phase: C_n <- C_n e^{i chi n^2} with n the
/// physical sideband label. Magnitudes are untouched.
ElectronLadderState disperse(const ElectronLadderState& s, double chi);

/// <b^l> = sum_n C*_n C_{n+l}: expectation of the l-step ladder lowering
/// operator (b lowers the electron energy).
std::complex<double> ladder_moment(const ElectronLadderState& s, int l);

/// Quadratic phase per sideband^2 acquired over a drift length (m) from the
/// second-order dispersion of the relativistic electron energy:
///   chi = -L hbar w0^2 / (2 gamma^3 m_e v^3).
double dispersion_chi(double length_m, double beta, double omega0);

}  // namespace eqsim
