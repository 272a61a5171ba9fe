// Pump-probe measurement schemes: T1/T2 scans, Bloch-sphere tomography,
// shot-noise sampling, LDOS conversion, and least-squares fitting.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "eqsim/coupling.hpp"
#include "eqsim/electron_state.hpp"
#include "eqsim/qubit.hpp"
#include "eqsim/scattering.hpp"

namespace eqsim {

struct RotationPulse {
  std::array<double, 3> axis{1.0, 0.0, 0.0};
  double angle = 0.0;
};

struct PumpConfig {
  double theta_a = 0.0;  // Bloch angles of the prepared state
  double phi_a = 0.0;
  // When nonempty, the pump is this pulse sequence applied to the ground
  // state instead of a direct Bloch-state preparation.
  std::vector<RotationPulse> sequence;

  QubitDensityMatrix prepare() const;
};

struct ProbeConfig {
  enum class Kind { unshaped, duo, pinem };
  Kind kind = Kind::unshaped;
  double phi_e = 0.0;
  bool phi_e_auto = false;  // choose phi_e for maximum interference contrast
  double pinem_g = 0.0;
  double pinem_phi = 0.0;
  double chi = 0.0;  // post-PINEM dispersion phase
  int window = 40;

  ElectronLadderState make_state(double phi_e_override) const;
};

struct ExperimentConfig {
  std::optional<PhysicalParams> physical;
  std::optional<CouplingConstant> coupling;  // overrides physical when set
  DecayParams decay;
  PumpConfig pump;
  ProbeConfig probe;
  std::vector<double> tau_grid;  // s, strictly increasing
  long long shots = 0;           // 0 = noiseless
  std::uint64_t seed = 0;

  void validate() const;
  CouplingConstant effective_coupling() const;
};

struct ScanPoint {
  double tau = 0.0;
  double value = 0.0;
  double std_error = 0.0;  // 0 for noiseless points
};

struct ScanSeries {
  enum class Observable { delta_p, average_gain };
  Observable kind = Observable::average_gain;
  std::vector<ScanPoint> points;
};

struct FitResult {
  double rate = 0.0;       // 1/s, for decay fits
  double amplitude = 0.0;
  double offset = 0.0;
  double phase = 0.0;      // sinusoid fits only
  double rate_stderr = 0.0;
  double amplitude_stderr = 0.0;
  double offset_stderr = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Pump, free-evolve, probe with an unshaped electron, record <E_gain> in
/// units of hbar*omega0 per delay. A duo probe switches to the shaped T1
/// variant: evolve under T1, apply a pi/2 x-pulse, record delta-P.
ScanSeries run_t1_scan(const ExperimentConfig& cfg);

/// Equator pump, duo probe: delta-P(tau), decaying with T2.
ScanSeries run_t2_scan(const ExperimentConfig& cfg);

struct TomographyResult {
  double theta_est = 0.0;
  double phi_est = 0.0;
  enum class Hemisphere { upper, lower } hemisphere = Hemisphere::upper;
  bool phase_indeterminate = false;  // interference amplitude below floor
  double amplitude = 0.0;            // fitted delta-P oscillation amplitude
};

/// Scans phi_e, fits delta-P(phi_e) = offset + A sin(psi - phi_e), and
/// inverts the exact amplitude law for sin(theta); the hemisphere comes from
/// the +-3/2 side lobes. Noiseless recovery is exact to solver precision.
TomographyResult tomography(const ExperimentConfig& cfg,
                            const std::vector<double>& phi_e_grid);

/// Deterministic multinomial draw over the spectrum bins, keyed by label.
std::map<double, long long> sample_counts(const Spectrum& s, long long shots,
                                          std::uint64_t seed);

/// Least-squares fit of y = A exp(-rate t) + offset by damped Gauss-Newton
/// from a log-linear initial guess. Weighted by the point errors when all
/// are positive. Throws accuracy_error on non-convergence (200 iterations)
/// and std::invalid_argument on degenerate input.
FitResult fit_exp_decay(const ScanSeries& series);

/// Linear least-squares fit of y = c0 + c1 cos x + c2 sin x reported as
/// offset + A sin(phase - x) (the tomography oscillation convention).
FitResult fit_sinusoid(const std::vector<double>& x,
                       const std::vector<double>& y);

/// Radiative rate from a user-supplied partial LDOS:
/// gamma = (omega0 / hbar eps0) |d|^2 rho_z.
double gamma_from_ldos(double dipole_debye, double omega0, double rho_z);

/// Stream-split helper: decorrelated 64-bit seed for (seed, index).
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

}  // namespace eqsim
