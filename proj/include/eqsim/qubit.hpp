// Qubit density matrices, laser-pulse rotations, and T1/T2 free evolution.
#pragma once

#include <array>
#include <complex>

namespace eqsim {

/// Two-level density matrix over {|g>, |e>}, stored as the excited
/// population p and the off-diagonal element q = rho_ge. The phase
/// convention is fixed so a Bloch state (theta_a, phi_a) has
/// q = e^{-i phi_a} cos(theta/2) sin(theta/2), which reproduces the
/// sin(phi_a - phi_e - phi_g) interference law of the four-peak spectrum.
struct QubitDensityMatrix {
  double p_excited = 0.0;
  std::complex<double> coherence{0.0, 0.0};  // rho_ge

  /// Throws std::invalid_argument when p is outside [0,1] or positivity
  /// |q|^2 <= p(1-p) fails beyond 1e-12.
  void validate() const;
  double purity() const;  // tr rho^2
};

struct DecayParams {
  double t1 = 0.0;      // s
  double t2 = 0.0;      // s
  double omega0 = 0.0;  // rad/s, used only in the lab frame

  DecayParams() = default;
  /// Enforces t1, t2 > 0 and the complete-positivity bound t2 <= 2 t1.
  DecayParams(double t1_s, double t2_s, double omega0_rad_s);
};

enum class Frame { rotating, lab };

/// Pure state at Bloch angles (theta in [0, pi], phi): theta = 0 is |e>.
QubitDensityMatrix bloch_state(double theta_a, double phi_a);

/// Free evolution for tau >= 0: p decays with T1 toward the ground state,
/// q with T2 (times e^{i w0 tau} in the lab frame).
QubitDensityMatrix evolve(const QubitDensityMatrix& rho, double tau,
                          const DecayParams& d, Frame frame = Frame::rotating);

/// Conjugation by exp(-i angle/2 axis.sigma); axis must be unit to 1e-9.
QubitDensityMatrix apply_rotation(const QubitDensityMatrix& rho,
                                  const std::array<double, 3>& axis,
                                  double angle);

/// One pure term of the spectral decomposition rho = sum w |chi><chi|.
struct PureQubitComponent {
  double weight = 0.0;
  std::complex<double> amp_g{0.0, 0.0};
  std::complex<double> amp_e{0.0, 0.0};
};

/// Eigendecomposition into at most two pure components (zero-weight
/// components are dropped).
std::array<PureQubitComponent, 2> decompose(const QubitDensityMatrix& rho);

}  // namespace eqsim
