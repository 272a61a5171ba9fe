#include "doctest.h"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "eqsim/constants.hpp"
#include "eqsim/serialize.hpp"

using namespace eqsim;
using nlohmann::json;

TEST_CASE("serialize: electron state round trip") {
  for (const auto& s : {make_duo(0.7), make_pinem(1.2, -0.3, 25)}) {
    const auto j = to_json(s);
    const auto back = electron_state_from_json(json::parse(j.dump()));
    CHECK(back.offset == s.offset);
    CHECK(back.half_integer == s.half_integer);
    REQUIRE(back.amplitudes.size() == s.amplitudes.size());
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i)
      CHECK(back.amplitudes[i] == s.amplitudes[i]);
  }
}

TEST_CASE("serialize: qubit and coupling round trips") {
  const auto rho = bloch_state(1.234, -0.86);
  const auto rho2 = qubit_from_json(json::parse(to_json(rho).dump()));
  CHECK(rho2.p_excited == rho.p_excited);
  CHECK(rho2.coherence == rho.coherence);

  CouplingConstant g;
  g.magnitude = 0.123456789012345;
  g.phase = -2.2;
  g.kappa = 3e-4;
  const auto g2 = coupling_from_json(json::parse(to_json(g).dump()));
  CHECK(g2.magnitude == g.magnitude);
  CHECK(g2.phase == doctest::Approx(g.phase).epsilon(1e-14));
  CHECK(g2.kappa == g.kappa);

  // Out-of-range phases fold into the principal branch.
  const auto g3 = coupling_from_json(
      json{{"magnitude", 0.1}, {"phase", 2.2 + 4.0 * 3.14159265358979324}});
  CHECK(g3.phase == doctest::Approx(2.2).epsilon(1e-12));
}

TEST_CASE("serialize: spectrum and scan round trips") {
  CouplingConstant g;
  g.magnitude = 0.2;
  const Spectrum s = eels_spectrum(make_duo(0.1), bloch_state(0.9, 0.0), g);
  const Spectrum s2 = spectrum_from_json(json::parse(to_json(s).dump()));
  CHECK(s2.offset == s.offset);
  CHECK(s2.half_integer == s.half_integer);
  CHECK(s2.probabilities == s.probabilities);
  CHECK(s2.leak == s.leak);

  ScanSeries scan;
  scan.kind = ScanSeries::Observable::delta_p;
  scan.points = {{0.0, 0.1, 0.01}, {1.0, 0.05, 0.01}};
  const ScanSeries scan2 = scan_from_json(json::parse(to_json(scan).dump()));
  CHECK(scan2.kind == scan.kind);
  REQUIRE(scan2.points.size() == 2);
  CHECK(scan2.points[1].value == scan.points[1].value);
}

TEST_CASE("serialize: experiment config parsing and error paths") {
  json j{{"coupling", {{"magnitude", 0.1}, {"phase", 0.0}}},
         {"decay", {{"t1_s", 10.0}, {"t2_s", 1.0}}},
         {"pump", {{"theta_a", 1.5707963}, {"phi_a", 0.0}}},
         {"probe", {{"kind", "duo"}, {"phi_e", "auto"}}},
         {"tau_grid", {{"start_s", 0.0}, {"stop_s", 3.0}, {"points", 10}}},
         {"shots", 1000},
         {"seed", 42}};
  const ExperimentConfig cfg = experiment_config_from_json(j);
  CHECK(cfg.coupling->magnitude == 0.1);
  CHECK(cfg.probe.phi_e_auto);
  CHECK(cfg.tau_grid.size() == 10);
  CHECK(cfg.shots == 1000);
  CHECK(cfg.seed == 42);

  json bad = j;
  bad.erase("decay");
  CHECK_THROWS_WITH_AS(experiment_config_from_json(bad),
                       doctest::Contains("decay"), std::invalid_argument);

  bad = j;
  bad["probe"]["kind"] = "gaussian";
  CHECK_THROWS_WITH_AS(experiment_config_from_json(bad),
                       doctest::Contains("probe.kind"), std::invalid_argument);

  bad = j;
  bad["decay"] = {{"t1_s", 10.0}};
  CHECK_THROWS_WITH_AS(experiment_config_from_json(bad),
                       doctest::Contains("decay.t2_s"), std::invalid_argument);
}

TEST_CASE("serialize: physical params from lab units") {
  json j{{"dipole_debye", {288.0, 0.0, 0.0}},
         {"gap_ev", 3.0},
         {"impact_parameter_nm", 6.0},
         {"beta", 0.07}};
  const PhysicalParams p = physical_params_from_json(j);
  CHECK(p.omega0 ==
        doctest::Approx(3.0 * consts::electron_volt / consts::hbar));
  CHECK(p.impact_parameter == doctest::Approx(6e-9));

  json j2{{"dipole_magnitude_debye", 288.0},
          {"orientation", "z"},
          {"gap_ev", 3.0},
          {"impact_parameter_nm", 6.0},
          {"energy_kev", 80.0}};
  const PhysicalParams p2 = physical_params_from_json(j2);
  CHECK(p2.dipole_z > 0.0);
  CHECK(p2.dipole_x == 0.0);
  CHECK(p2.beta == doctest::Approx(0.502398885907019).epsilon(1e-9));
}

TEST_CASE("serialize: csv emitters") {
  CouplingConstant g;
  g.magnitude = 0.1;
  const Spectrum s = eels_spectrum(make_duo(0.0), bloch_state(0.5, 0.0), g);
  const std::string csv = spectrum_to_csv(s);
  CHECK(csv.rfind("label,probability\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        1 + static_cast<long>(s.probabilities.size()));
  CHECK(csv == spectrum_to_csv(s));  // deterministic

  const std::string broad = spectrum_to_broadened_csv(s, 3000.0, 10.0);
  CHECK(broad.rfind("energy_mev,intensity\n", 0) == 0);
  CHECK_THROWS_AS(spectrum_to_broadened_csv(s, 3000.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("serialize: atomic write and digest") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "eqsim_serialize_test";
  fs::create_directories(dir);
  const auto path = (dir / "out.txt").string();
  atomic_write_file(path, "hello\n");
  atomic_write_file(path, "world\n");  // overwrite through rename
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "world");
  CHECK(!fs::exists(path + ".tmp"));
  fs::remove_all(dir);

  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("config") != fnv1a64("Config"));
}
