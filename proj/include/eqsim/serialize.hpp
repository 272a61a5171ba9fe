// JSON (de)serialization of the domain types, CSV emitters for series data,
// and atomic file writes. Configs are validated with error messages that
// name the offending field path.
#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "eqsim/coupling.hpp"
#include "eqsim/electron_state.hpp"
#include "eqsim/experiments.hpp"
#include "eqsim/qubit.hpp"
#include "eqsim/scattering.hpp"
#include "eqsim/superradiance.hpp"

namespace eqsim {

// Electron states: {offset, half_integer, amplitudes: [[re, im], ...]}.
nlohmann::json to_json(const ElectronLadderState& s);
ElectronLadderState electron_state_from_json(const nlohmann::json& j);

// Qubits: {p_excited, q_re, q_im}.
nlohmann::json to_json(const QubitDensityMatrix& rho);
QubitDensityMatrix qubit_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CouplingConstant& g);
CouplingConstant coupling_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Spectrum& s);
Spectrum spectrum_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScanSeries& s);
ScanSeries scan_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FitResult& f);
FitResult fit_result_from_json(const nlohmann::json& j);

/// Parses the JSON experiment config (physical/coupling, decay, pump, probe,
/// tau_grid, shots, seed). Throws std::invalid_argument with the JSON path
/// of the offending field.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
PhysicalParams physical_params_from_json(const nlohmann::json& j);

// CSV emitters (deterministic %.17g formatting).
std::string spectrum_to_csv(const Spectrum& s);
/// Display-broadened CSV: a Gaussian of sigma_mev is placed at each peak
/// (energy = label * gap_mev); applied only at serialization time.
std::string spectrum_to_broadened_csv(const Spectrum& s, double gap_mev,
                                      double sigma_mev);
std::string scan_to_csv(const ScanSeries& s);
std::string decay_curve_to_csv(const DecayCurve& c);
std::string emission_curve_to_csv(const EmissionCurve& c);

/// Writes via a temp file in the same directory, then renames.
void atomic_write_file(const std::string& path, const std::string& content);

/// FNV-1a 64 over the raw bytes; stable across platforms.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace eqsim
