#include "eqsim/serialize.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eqsim/constants.hpp"

namespace eqsim {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Field access that reports the path on error.
const json& require(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key))
    throw std::invalid_argument("config: missing field " + ctx + key);
  return j.at(key);
}

double require_num(const json& j, const char* key, const std::string& ctx) {
  const json& v = require(j, key, ctx);
  if (!v.is_number())
    throw std::invalid_argument("config: field " + ctx + key +
                                " must be a number");
  return v.get<double>();
}

double opt_num(const json& j, const char* key, double fallback) {
  if (j.is_object() && j.contains(key)) return j.at(key).get<double>();
  return fallback;
}

}  // namespace

json to_json(const ElectronLadderState& s) {
  json amps = json::array();
  for (const auto& a : s.amplitudes) amps.push_back({a.real(), a.imag()});
  return {{"offset", s.offset},
          {"half_integer", s.half_integer},
          {"amplitudes", amps}};
}

ElectronLadderState electron_state_from_json(const json& j) {
  ElectronLadderState s;
  s.offset = require(j, "offset", "").get<int>();
  s.half_integer = require(j, "half_integer", "").get<bool>();
  for (const auto& a : require(j, "amplitudes", "")) {
    if (!a.is_array() || a.size() != 2)
      throw std::invalid_argument("config: amplitudes entries must be [re,im]");
    s.amplitudes.emplace_back(a[0].get<double>(), a[1].get<double>());
  }
  s.validate();
  return s;
}

json to_json(const QubitDensityMatrix& rho) {
  return {{"p_excited", rho.p_excited},
          {"q_re", rho.coherence.real()},
          {"q_im", rho.coherence.imag()}};
}

QubitDensityMatrix qubit_from_json(const json& j) {
  QubitDensityMatrix rho;
  rho.p_excited = require_num(j, "p_excited", "qubit.");
  rho.coherence = {opt_num(j, "q_re", 0.0), opt_num(j, "q_im", 0.0)};
  rho.validate();
  return rho;
}

json to_json(const CouplingConstant& g) {
  return {{"magnitude", g.magnitude}, {"phase", g.phase}, {"kappa", g.kappa}};
}

CouplingConstant coupling_from_json(const json& j) {
  const double mag = require_num(j, "magnitude", "coupling.");
  if (mag < 0.0)
    throw std::invalid_argument("config: coupling.magnitude must be >= 0");
  // from_complex folds the phase into the principal range (-pi, pi].
  CouplingConstant g = CouplingConstant::from_complex(
      std::polar(std::max(mag, 1e-300), opt_num(j, "phase", 0.0)),
      opt_num(j, "kappa", 0.0));
  g.magnitude = mag;
  if (mag == 0.0) g.phase = 0.0;
  return g;
}

json to_json(const Spectrum& s) {
  return {{"offset", s.offset},
          {"half_integer", s.half_integer},
          {"probabilities", s.probabilities},
          {"leak", s.leak}};
}

Spectrum spectrum_from_json(const json& j) {
  Spectrum s;
  s.offset = require(j, "offset", "spectrum.").get<int>();
  s.half_integer = require(j, "half_integer", "spectrum.").get<bool>();
  s.probabilities =
      require(j, "probabilities", "spectrum.").get<std::vector<double>>();
  s.leak = opt_num(j, "leak", 0.0);
  return s;
}

json to_json(const ScanSeries& s) {
  json pts = json::array();
  for (const auto& p : s.points)
    pts.push_back({{"tau", p.tau},
                   {"value", p.value},
                   {"std_error", p.std_error}});
  return {{"observable", s.kind == ScanSeries::Observable::delta_p
                             ? "delta_p"
                             : "average_gain"},
          {"points", pts}};
}

ScanSeries scan_from_json(const json& j) {
  ScanSeries s;
  const std::string kind = require(j, "observable", "scan.").get<std::string>();
  if (kind == "delta_p")
    s.kind = ScanSeries::Observable::delta_p;
  else if (kind == "average_gain")
    s.kind = ScanSeries::Observable::average_gain;
  else
    throw std::invalid_argument("config: scan.observable unknown: " + kind);
  for (const auto& p : require(j, "points", "scan.")) {
    s.points.push_back({require_num(p, "tau", "scan.points[]."),
                        require_num(p, "value", "scan.points[]."),
                        opt_num(p, "std_error", 0.0)});
  }
  return s;
}

json to_json(const FitResult& f) {
  return {{"rate", f.rate},
          {"amplitude", f.amplitude},
          {"offset", f.offset},
          {"phase", f.phase},
          {"rate_stderr", f.rate_stderr},
          {"amplitude_stderr", f.amplitude_stderr},
          {"offset_stderr", f.offset_stderr},
          {"residual_norm", f.residual_norm},
          {"iterations", f.iterations}};
}

FitResult fit_result_from_json(const json& j) {
  FitResult f;
  f.rate = require_num(j, "rate", "fit.");
  f.amplitude = require_num(j, "amplitude", "fit.");
  f.offset = require_num(j, "offset", "fit.");
  f.phase = opt_num(j, "phase", 0.0);
  f.rate_stderr = opt_num(j, "rate_stderr", 0.0);
  f.amplitude_stderr = opt_num(j, "amplitude_stderr", 0.0);
  f.offset_stderr = opt_num(j, "offset_stderr", 0.0);
  f.residual_norm = opt_num(j, "residual_norm", 0.0);
  f.iterations = static_cast<int>(opt_num(j, "iterations", 0));
  return f;
}

PhysicalParams physical_params_from_json(const json& j) {
  PhysicalParams p;
  const std::string ctx = "physical.";
  // Dipole in Debye, either as components or as magnitude + orientation.
  if (j.contains("dipole_debye")) {
    const json& d = j.at("dipole_debye");
    if (!d.is_array() || d.size() != 3)
      throw std::invalid_argument(
          "config: physical.dipole_debye must be [dx, dy, dz]");
    p.dipole_x = debye_to_si(d[0].get<double>());
    p.dipole_y = debye_to_si(d[1].get<double>());
    p.dipole_z = debye_to_si(d[2].get<double>());
  } else {
    const double mag = require_num(j, "dipole_magnitude_debye", ctx);
    const std::string ori =
        j.contains("orientation") ? j.at("orientation").get<std::string>()
                                  : "x";
    if (ori == "x")
      p.dipole_x = debye_to_si(mag);
    else if (ori == "z")
      p.dipole_z = debye_to_si(mag);
    else
      throw std::invalid_argument("config: physical.orientation must be x|z");
  }
  if (j.contains("omega0_rad_s"))
    p.omega0 = j.at("omega0_rad_s").get<double>();
  else
    p.omega0 = ev_to_angular_frequency(require_num(j, "gap_ev", ctx));
  if (j.contains("impact_parameter_m"))
    p.impact_parameter = j.at("impact_parameter_m").get<double>();
  else
    p.impact_parameter = require_num(j, "impact_parameter_nm", ctx) * 1e-9;
  if (j.contains("beta"))
    p.beta = j.at("beta").get<double>();
  else
    p.beta = kinetic_energy_kev_to_beta(require_num(j, "energy_kev", ctx));
  p.validate();
  return p;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("physical"))
    cfg.physical = physical_params_from_json(j.at("physical"));
  if (j.contains("coupling"))
    cfg.coupling = coupling_from_json(j.at("coupling"));

  const json& d = require(j, "decay", "");
  cfg.decay.t1 = require_num(d, "t1_s", "decay.");
  cfg.decay.t2 = require_num(d, "t2_s", "decay.");
  cfg.decay.omega0 = cfg.physical ? cfg.physical->omega0
                                  : opt_num(d, "omega0_rad_s", 0.0);

  if (j.contains("pump")) {
    const json& pu = j.at("pump");
    if (pu.contains("sequence")) {
      for (const auto& pl : pu.at("sequence")) {
        RotationPulse pulse;
        const json& ax = require(pl, "axis", "pump.sequence[].");
        if (!ax.is_array() || ax.size() != 3)
          throw std::invalid_argument(
              "config: pump.sequence[].axis must be [x,y,z]");
        pulse.axis = {ax[0].get<double>(), ax[1].get<double>(),
                      ax[2].get<double>()};
        pulse.angle = require_num(pl, "angle", "pump.sequence[].");
        cfg.pump.sequence.push_back(pulse);
      }
    } else {
      cfg.pump.theta_a = require_num(pu, "theta_a", "pump.");
      cfg.pump.phi_a = opt_num(pu, "phi_a", 0.0);
    }
  }

  if (j.contains("probe")) {
    const json& pr = j.at("probe");
    const std::string kind = require(pr, "kind", "probe.").get<std::string>();
    if (kind == "unshaped") {
      cfg.probe.kind = ProbeConfig::Kind::unshaped;
    } else if (kind == "duo") {
      cfg.probe.kind = ProbeConfig::Kind::duo;
      if (pr.contains("phi_e") && pr.at("phi_e").is_string()) {
        if (pr.at("phi_e").get<std::string>() != "auto")
          throw std::invalid_argument(
              "config: probe.phi_e must be a number or \"auto\"");
        cfg.probe.phi_e_auto = true;
      } else {
        cfg.probe.phi_e = opt_num(pr, "phi_e", 0.0);
        cfg.probe.phi_e_auto = !pr.contains("phi_e");
      }
    } else if (kind == "pinem") {
      cfg.probe.kind = ProbeConfig::Kind::pinem;
      cfg.probe.pinem_g = require_num(pr, "g_mag", "probe.");
      cfg.probe.pinem_phi = opt_num(pr, "phi", 0.0);
      cfg.probe.chi = opt_num(pr, "chi", 0.0);
      cfg.probe.window = static_cast<int>(opt_num(pr, "window", 40));
    } else {
      throw std::invalid_argument("config: probe.kind must be "
                                  "unshaped|duo|pinem, got " + kind);
    }
  }

  const json& tg = require(j, "tau_grid", "");
  if (tg.is_array()) {
    cfg.tau_grid = tg.get<std::vector<double>>();
  } else {
    const double start = require_num(tg, "start_s", "tau_grid.");
    const double stop = require_num(tg, "stop_s", "tau_grid.");
    const int pts = static_cast<int>(require_num(tg, "points", "tau_grid."));
    if (pts < 2 || !(stop > start))
      throw std::invalid_argument("config: tau_grid range is degenerate");
    for (int i = 0; i < pts; ++i)
      cfg.tau_grid.push_back(start + (stop - start) * i / (pts - 1));
  }

  cfg.shots = static_cast<long long>(opt_num(j, "shots", 0));
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

std::string spectrum_to_csv(const Spectrum& s) {
  std::ostringstream os;
  os << "label,probability\n";
  for (std::size_t i = 0; i < s.probabilities.size(); ++i)
    os << fmt(s.label(i)) << "," << fmt(s.probabilities[i]) << "\n";
  return os.str();
}

std::string spectrum_to_broadened_csv(const Spectrum& s, double gap_mev,
                                      double sigma_mev) {
  if (!(sigma_mev > 0.0) || !(gap_mev > 0.0))
    throw std::invalid_argument("broadened csv: gap and sigma must be > 0");
  const double lo = (s.label(0) - 1.0) * gap_mev;
  const double hi = (s.label(s.probabilities.size() - 1) + 1.0) * gap_mev;
  const int npts = 1201;
  const double norm = 1.0 / (sigma_mev * std::sqrt(2.0 * 3.14159265358979324));
  std::ostringstream os;
  os << "energy_mev,intensity\n";
  for (int k = 0; k < npts; ++k) {
    const double e = lo + (hi - lo) * k / (npts - 1);
    double v = 0.0;
    for (std::size_t i = 0; i < s.probabilities.size(); ++i) {
      const double de = e - s.label(i) * gap_mev;
      v += s.probabilities[i] * norm *
           std::exp(-0.5 * de * de / (sigma_mev * sigma_mev));
    }
    os << fmt(e) << "," << fmt(v) << "\n";
  }
  return os.str();
}

std::string scan_to_csv(const ScanSeries& s) {
  std::ostringstream os;
  os << "tau,value,stderr\n";
  for (const auto& p : s.points)
    os << fmt(p.tau) << "," << fmt(p.value) << "," << fmt(p.std_error) << "\n";
  return os.str();
}

std::string decay_curve_to_csv(const DecayCurve& c) {
  std::ostringstream os;
  os << "tau,e_mean,intensity\n";
  for (std::size_t i = 0; i < c.tau.size(); ++i)
    os << fmt(c.tau[i]) << "," << fmt(c.e_mean[i]) << ","
       << fmt(c.intensity[i]) << "\n";
  return os.str();
}

std::string emission_curve_to_csv(const EmissionCurve& c) {
  std::ostringstream os;
  os << "tau,e_qubits,intensity\n";
  for (std::size_t i = 0; i < c.tau.size(); ++i)
    os << fmt(c.tau[i]) << "," << fmt(c.e_qubits[i]) << ","
       << fmt(c.intensity[i]) << "\n";
  return os.str();
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("atomic_write_file: cannot open " +
                               tmp.string());
    out << content;
    if (!out.good())
      throw std::runtime_error("atomic_write_file: write failed for " +
                               tmp.string());
  }
  fs::rename(tmp, target);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace eqsim
