// Brute-force validation: time-ordered integration of the interaction-picture
// propagator along the electron trajectory, and exact product-S scattering
// for small qubit ensembles.
#pragma once

#include <complex>
#include <vector>

#include "eqsim/coupling.hpp"
#include "eqsim/electron_state.hpp"
#include "eqsim/qubit.hpp"
#include "eqsim/scattering.hpp"

namespace eqsim {

enum class IntegrationScheme {
  ordered_product,  // product of per-step exponentials, unitary by construction
  rk4               // classic RK4 cross-check
};

struct TrajectoryGrid {
  double z_extent = 50.0;   // integration half-width in units of r_perp
  int steps = 60001;        // sample points (odd); intervals = steps - 1
  IntegrationScheme scheme = IntegrationScheme::ordered_product;
  bool relativistic_field = true;  // gamma factors in the moving-charge field
  double time_origin = 0.0;  // phase-reference shift in seconds; a pure
                             // relabeling of the clock (gauge check)

  void validate() const;  // steps odd and >= 1001, extent >= 20
};

struct ExactCoupling {
  std::complex<double> G;   // off-diagonal coupling, all Magnus orders
  double K = 0.0;           // diagonal (phase) constant
  int converged_steps = 0;  // finest grid actually used
  double refinement_delta = 0.0;  // relative change over the last doubling
};

/// Integrates U = T exp(-(i/hbar) int V_I dt) on the qubit 2x2 space with
/// the relativistic point-charge field, then refines the grid (doubling)
/// until G changes by <= 1e-8 relative; throws accuracy_error otherwise.
ExactCoupling exact_coupling(const PhysicalParams& p,
                             const TrajectoryGrid& grid = {});

/// Applies prod_i S_i exactly on the (2^N x ladder) space; all qubits share
/// one coupling (co-located ensemble). N is capped at 6.
Spectrum exact_multiqubit_scattering(const std::vector<QubitDensityMatrix>& qubits,
                                     const ElectronLadderState& e,
                                     const CouplingConstant& g);

}  // namespace eqsim
