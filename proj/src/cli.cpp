#include "eqsim/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "eqsim/constants.hpp"
#include "eqsim/coupling.hpp"
#include "eqsim/errors.hpp"
#include "eqsim/experiments.hpp"
#include "eqsim/oracle.hpp"
#include "eqsim/scattering.hpp"
#include "eqsim/serialize.hpp"
#include "eqsim/superradiance.hpp"

namespace eqsim::cli {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

bool log_enabled() {
  const char* lvl = std::getenv("EQSIM_LOG");
  return !(lvl && std::string(lvl) == "quiet");
}

void info(const std::string& msg) {
  if (log_enabled()) std::cerr << "eqsim: " << msg << std::endl;
}

struct LoadedConfig {
  json j;
  std::string digest;  // fnv1a over the raw config bytes
};

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  LoadedConfig lc;
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  lc.digest = buf;
  try {
    lc.j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  return lc;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_manifest(const CommonOptions& opt, const std::string& command,
                    const std::string& digest, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  json m{{"command", command},
         {"config_digest", digest},
         {"seed", seed},
         {"version", kVersion},
         {"outputs", outputs}};
  atomic_write_file(join_path(opt.out_dir, "manifest.json"), m.dump(2) + "\n");
}

ExperimentConfig load_experiment(const CommonOptions& opt, const json& j) {
  ExperimentConfig cfg = experiment_config_from_json(j);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.shots) cfg.shots = *opt.shots;
  cfg.validate();
  return cfg;
}

int guarded(const char* command, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    std::cerr << "eqsim " << command << ": config error: " << e.what()
              << std::endl;
    return 2;
  } catch (const accuracy_error& e) {
    std::cerr << "eqsim " << command << ": numeric failure: " << e.what()
              << std::endl;
    return 3;
  } catch (const truncation_error& e) {
    std::cerr << "eqsim " << command << ": numeric failure: " << e.what()
              << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "eqsim " << command << ": error: " << e.what() << std::endl;
    return 3;
  }
}

}  // namespace

int cmd_coupling(const CommonOptions& opt) {
  return guarded("coupling", [&] {
    const LoadedConfig lc = load_config(opt.config_path);
    const PhysicalParams p =
        physical_params_from_json(lc.j.at("physical"));
    for (const auto& note : p.validate()) info("note: " + note);

    const CouplingConstant g = coupling_g(p);
    if (g.magnitude == 0.0) info("warning: |g| = 0 for this configuration");

    DipoleOrientation ori = std::abs(p.dipole_x) >= std::abs(p.dipole_z)
                                ? DipoleOrientation::x
                                : DipoleOrientation::z;
    if (lc.j.contains("optimal_velocity_orientation"))
      ori = lc.j.at("optimal_velocity_orientation").get<std::string>() == "z"
                ? DipoleOrientation::z
                : DipoleOrientation::x;
    const OptimalVelocity vopt =
        optimal_velocity(ori, p.omega0, p.impact_parameter);

    json out{{"coupling", to_json(g)},
             {"optimal_velocity",
              {{"beta", vopt.beta},
               {"u", vopt.u},
               {"relativistic_warning", vopt.relativistic_warning}}},
             {"magnus_order_2", magnus_order_estimate(2, p)}};

    std::printf("|g| = %.6g  phase = %.6g rad\n", g.magnitude, g.phase);
    std::printf("optimal velocity: beta = %.6g (u* = %.6g)%s\n", vopt.beta,
                vopt.u,
                vopt.relativistic_warning
                    ? "  [warning: beta >= 0.3, nonrelativistic optimum "
                      "assumption strained]"
                    : "");

    std::vector<std::string> outputs{"coupling.json"};
    if (lc.j.contains("r_perp_scan_nm")) {
      const json& sc = lc.j.at("r_perp_scan_nm");
      const double lo = sc.at("min").get<double>();
      const double hi = sc.at("max").get<double>();
      const int pts = sc.at("points").get<int>();
      if (!(lo > 0.0) || !(hi > lo) || pts < 2)
        throw std::invalid_argument("config: r_perp_scan_nm range invalid");
      double best_g = 0.0, best_r = lo;
      std::ostringstream csv;
      csv << "r_perp_nm,g_magnitude\n";
      char row[80];
      for (int i = 0; i < pts; ++i) {
        PhysicalParams q = p;
        const double r = lo + (hi - lo) * i / (pts - 1);
        q.impact_parameter = r * 1e-9;
        const double mag = coupling_g(q).magnitude;
        std::snprintf(row, sizeof row, "%.17g,%.17g\n", r, mag);
        csv << row;
        if (mag > best_g) {
          best_g = mag;
          best_r = r;
        }
      }
      atomic_write_file(join_path(opt.out_dir, "r_perp_scan.csv"), csv.str());
      outputs.push_back("r_perp_scan.csv");
      out["r_perp_scan"] = {{"best_g", best_g}, {"best_r_perp_nm", best_r}};
      std::printf(
          "r_perp scan: max |g| = %.6g at r_perp = %.6g nm (indicative; the "
          "optimum rides the lower scan edge since |g| grows as r_perp "
          "shrinks)\n",
          best_g, best_r);
    }

    atomic_write_file(join_path(opt.out_dir, "coupling.json"),
                      out.dump(2) + "\n");
    write_manifest(opt, "coupling", lc.digest, 0, outputs);
    return 0;
  });
}

int cmd_spectrum(const CommonOptions& opt) {
  return guarded("spectrum", [&] {
    const LoadedConfig lc = load_config(opt.config_path);

    CouplingConstant g;
    std::optional<PhysicalParams> phys;
    if (lc.j.contains("coupling")) {
      g = coupling_from_json(lc.j.at("coupling"));
    } else {
      phys = physical_params_from_json(lc.j.at("physical"));
      g = coupling_g(*phys);
    }

    QubitDensityMatrix rho;
    const json& q = lc.j.at("qubit");
    if (q.contains("theta_a"))
      rho = bloch_state(q.at("theta_a").get<double>(),
                        q.contains("phi_a") ? q.at("phi_a").get<double>() : 0.0);
    else
      rho = qubit_from_json(q);

    if (lc.j.contains("delay")) {
      const json& d = lc.j.at("delay");
      const DecayParams decay(d.at("t1_s").get<double>(),
                              d.at("t2_s").get<double>(),
                              phys ? phys->omega0 : 0.0);
      rho = evolve(rho, d.at("tau_s").get<double>(), decay);
    }

    ProbeConfig probe;
    {
      json pj{{"probe", lc.j.at("probe")}, {"decay", {{"t1_s", 1.0}, {"t2_s", 1.0}}},
              {"tau_grid", {0.0}}, {"coupling", to_json(g)}};
      probe = experiment_config_from_json(pj).probe;
    }
    const double phi_e = probe.phi_e_auto ? 0.0 : probe.phi_e;
    const ElectronLadderState e = probe.make_state(phi_e);

    const Spectrum s = eels_spectrum(e, rho, g);
    std::vector<std::string> outputs{"spectrum.csv", "spectrum.json"};
    atomic_write_file(join_path(opt.out_dir, "spectrum.csv"),
                      spectrum_to_csv(s));
    atomic_write_file(join_path(opt.out_dir, "spectrum.json"),
                      to_json(s).dump(2) + "\n");
    if (opt.broaden_mev > 0.0) {
      double gap_mev = 0.0;
      if (phys)
        gap_mev = phys->omega0 * consts::hbar / consts::electron_volt * 1e3;
      else if (lc.j.contains("gap_mev"))
        gap_mev = lc.j.at("gap_mev").get<double>();
      if (!(gap_mev > 0.0))
        throw std::invalid_argument(
            "config: --broaden needs physical parameters or gap_mev");
      atomic_write_file(join_path(opt.out_dir, "spectrum_broadened.csv"),
                        spectrum_to_broadened_csv(s, gap_mev, opt.broaden_mev));
      outputs.push_back("spectrum_broadened.csv");
    }
    std::printf("spectrum: %zu peaks, mean sideband shift %.6g\n",
                s.probabilities.size(), s.mean_label());
    write_manifest(opt, "spectrum", lc.digest, 0, outputs);
    return 0;
  });
}

namespace {

int run_scan_command(const CommonOptions& opt, const char* name, bool is_t2) {
  return guarded(name, [&] {
    const LoadedConfig lc = load_config(opt.config_path);
    const ExperimentConfig cfg = load_experiment(opt, lc.j);
    const ScanSeries scan = is_t2 ? run_t2_scan(cfg) : run_t1_scan(cfg);
    const FitResult fit = fit_exp_decay(scan);

    atomic_write_file(join_path(opt.out_dir, "scan.csv"), scan_to_csv(scan));
    atomic_write_file(join_path(opt.out_dir, "fit.json"),
                      to_json(fit).dump(2) + "\n");
    write_manifest(opt, name, lc.digest, cfg.seed, {"scan.csv", "fit.json"});
    std::printf("%s: fitted time constant %.6g s (rate %.6g 1/s, stderr %.2g)\n",
                name, 1.0 / fit.rate, fit.rate, fit.rate_stderr);
    return 0;
  });
}

}  // namespace

int cmd_t1(const CommonOptions& opt) { return run_scan_command(opt, "t1", false); }
int cmd_t2(const CommonOptions& opt) { return run_scan_command(opt, "t2", true); }

int cmd_tomography(const CommonOptions& opt) {
  return guarded("tomography", [&] {
    const LoadedConfig lc = load_config(opt.config_path);
    const ExperimentConfig cfg = load_experiment(opt, lc.j);

    std::vector<double> grid;
    if (lc.j.contains("phi_e_grid") && lc.j.at("phi_e_grid").is_array()) {
      grid = lc.j.at("phi_e_grid").get<std::vector<double>>();
    } else {
      const int pts = lc.j.contains("phi_e_grid")
                          ? lc.j.at("phi_e_grid").at("points").get<int>()
                          : 24;
      for (int i = 0; i < pts; ++i) grid.push_back(2.0 * kPi * i / pts);
    }

    const TomographyResult res = tomography(cfg, grid);
    json out{{"theta_est", res.theta_est},
             {"phi_est", res.phi_est},
             {"hemisphere",
              res.hemisphere == TomographyResult::Hemisphere::upper ? "upper"
                                                                    : "lower"},
             {"phase_indeterminate", res.phase_indeterminate},
             {"amplitude", res.amplitude}};
    atomic_write_file(join_path(opt.out_dir, "tomography.json"),
                      out.dump(2) + "\n");
    write_manifest(opt, "tomography", lc.digest, cfg.seed,
                   {"tomography.json"});
    std::printf("tomography: theta = %.6g, phi = %.6g (%s)%s\n", res.theta_est,
                res.phi_est,
                res.hemisphere == TomographyResult::Hemisphere::upper
                    ? "upper"
                    : "lower",
                res.phase_indeterminate ? "  [phase indeterminate]" : "");
    return 0;
  });
}

int cmd_superradiance(const CommonOptions& opt) {
  return guarded("superradiance", [&] {
    const LoadedConfig lc = load_config(opt.config_path);
    const int n = lc.j.at("n_qubits").get<int>();
    const double gamma = lc.j.at("gamma_per_s").get<double>();

    DickeEnsemble ens;
    if (!lc.j.contains("initial") || lc.j.at("initial") == "all_excited") {
      ens = DickeEnsemble::all_excited(n, gamma);
    } else if (lc.j.at("initial") == "all_ground") {
      ens = DickeEnsemble::all_ground(n, gamma);
    } else {
      ens.n_qubits = n;
      ens.gamma_single = gamma;
      ens.populations = lc.j.at("initial").get<std::vector<double>>();
      ens.validate();
    }
    const CouplingConstant g = coupling_from_json(lc.j.at("coupling"));

    std::vector<double> taus;
    const json& tg = lc.j.at("tau_grid");
    if (tg.is_array()) {
      taus = tg.get<std::vector<double>>();
    } else {
      const double start = tg.at("start_s").get<double>();
      const double stop = tg.at("stop_s").get<double>();
      const int pts = tg.at("points").get<int>();
      for (int i = 0; i < pts; ++i)
        taus.push_back(start + (stop - start) * i / (pts - 1));
    }

    const DecayCurve curve = dicke_decay(ens, taus);

    // Forward model of the probe-electron scan, then the inverse pipeline.
    ScanSeries scan;
    scan.kind = ScanSeries::Observable::average_gain;
    for (std::size_t i = 0; i < curve.tau.size(); ++i)
      scan.points.push_back(
          {curve.tau[i],
           2.0 * g.magnitude * g.magnitude * curve.e_mean[i], 0.0});
    const EmissionCurve rec = reconstruct_emission(scan, g);

    const Spectrum pert = perturbative_spectrum(ens, g);

    atomic_write_file(join_path(opt.out_dir, "decay.csv"),
                      decay_curve_to_csv(curve));
    atomic_write_file(join_path(opt.out_dir, "reconstruction.csv"),
                      emission_curve_to_csv(rec));
    atomic_write_file(join_path(opt.out_dir, "spectrum.csv"),
                      spectrum_to_csv(pert));
    write_manifest(opt, "superradiance", lc.digest, 0,
                   {"decay.csv", "reconstruction.csv", "spectrum.csv"});

    std::size_t ipk = 0;
    for (std::size_t i = 0; i < rec.intensity.size(); ++i)
      if (rec.intensity[i] > rec.intensity[ipk]) ipk = i;
    std::printf(
        "superradiance: N=%d, reconstructed peak intensity %.6g at tau = "
        "%.6g s\n",
        n, rec.intensity[ipk], rec.tau[ipk]);
    return 0;
  });
}

int cmd_oracle_check(const CommonOptions& opt) {
  return guarded("oracle-check", [&] {
    const LoadedConfig lc = load_config(opt.config_path);
    const PhysicalParams p = physical_params_from_json(lc.j.at("physical"));

    TrajectoryGrid grid;
    if (lc.j.contains("grid")) {
      const json& gj = lc.j.at("grid");
      if (gj.contains("z_extent")) grid.z_extent = gj.at("z_extent").get<double>();
      if (gj.contains("steps")) grid.steps = gj.at("steps").get<int>();
      if (gj.contains("scheme"))
        grid.scheme = gj.at("scheme").get<std::string>() == "rk4"
                          ? IntegrationScheme::rk4
                          : IntegrationScheme::ordered_product;
    }
    grid.validate();

    const CouplingConstant closed = coupling_g(p);
    const ExactCoupling exact = exact_coupling(p, grid);
    const double denom = std::max(closed.magnitude, 1e-300);
    const double rel = std::abs(exact.G - closed.value()) / denom;
    const bool pass = rel <= 1e-2;

    json out{{"g_closed", to_json(closed)},
             {"G_re", exact.G.real()},
             {"G_im", exact.G.imag()},
             {"K", exact.K},
             {"relative_deviation", rel},
             {"converged_steps", exact.converged_steps},
             {"refinement_delta", exact.refinement_delta},
             {"pass", pass}};
    atomic_write_file(join_path(opt.out_dir, "oracle.json"),
                      out.dump(2) + "\n");
    write_manifest(opt, "oracle-check", lc.digest, 0, {"oracle.json"});
    std::printf("%s |dG|/|g| = %.3e (closed |g| = %.6g, K = %.3e)\n",
                pass ? "PASS" : "FAIL", rel, closed.magnitude, exact.K);
    return pass ? 0 : 3;
  });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"eqsim - free-electron / qubit interaction simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct Cmd {
    const char* name;
    const char* desc;
    int (*fn)(const CommonOptions&);
    bool has_broaden;
  };
  const Cmd cmds[] = {
      {"coupling", "coupling constant and optimal-velocity report",
       cmd_coupling, false},
      {"spectrum", "EELS spectrum for a shaped electron and qubit state",
       cmd_spectrum, true},
      {"t1", "pump-probe T1 scan and exponential fit", cmd_t1, false},
      {"t2", "shaped-electron T2 scan and exponential fit", cmd_t2, false},
      {"tomography", "Bloch-sphere state reconstruction by phase scan",
       cmd_tomography, false},
      {"superradiance", "Dicke decay and emission reconstruction",
       cmd_superradiance, false},
      {"oracle-check", "compare closed-form g with the propagator oracle",
       cmd_oracle_check, false},
  };

  std::vector<std::pair<const Cmd*, std::shared_ptr<CommonOptions>>> bound;
  for (const auto& c : cmds) {
    auto sub = app.add_subcommand(c.name, c.desc);
    auto opts = std::make_shared<CommonOptions>();
    sub->add_option("--config", opts->config_path, "JSON config path")
        ->required();
    sub->add_option("--out", opts->out_dir, "output directory");
    sub->add_option("--seed", opts->seed, "RNG seed override");
    sub->add_option("--shots", opts->shots, "shots-per-point override");
    if (c.has_broaden)
      sub->add_option("--broaden", opts->broaden_mev,
                      "Gaussian display broadening sigma in meV");
    bound.emplace_back(&c, opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (const auto& [c, opts] : bound)
    if (app.get_subcommand(c->name)->parsed()) return c->fn(*opts);
  return 2;
}

}  // namespace eqsim::cli
