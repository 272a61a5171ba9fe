#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "eqsim/experiments.hpp"
#include "eqsim/scattering.hpp"

using namespace eqsim;
using cd = std::complex<double>;

namespace {
constexpr double kPi = 3.14159265358979323846;

CouplingConstant coupling(double mag, double phase = 0.0, double kappa = 0.0) {
  CouplingConstant g;
  g.magnitude = mag;
  g.phase = phase;
  g.kappa = kappa;
  return g;
}

ElectronLadderState random_state(std::mt19937_64& rng, bool half = false) {
  std::normal_distribution<double> gauss;
  ElectronLadderState s;
  s.offset = -static_cast<int>(rng() % 4);
  s.half_integer = half;
  s.amplitudes.resize(3 + rng() % 4);
  double n2 = 0.0;
  for (auto& a : s.amplitudes) {
    a = cd(gauss(rng), gauss(rng));
    n2 += std::norm(a);
  }
  for (auto& a : s.amplitudes) a /= std::sqrt(n2);
  return s;
}

QubitDensityMatrix random_qubit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  QubitDensityMatrix rho;
  rho.p_excited = u01(rng);
  rho.coherence = std::polar(
      std::sqrt(rho.p_excited * (1.0 - rho.p_excited)) * u01(rng),
      2.0 * kPi * u01(rng));
  return rho;
}
}  // namespace

TEST_CASE("scattering: zero coupling is the identity") {
  std::mt19937_64 rng(3);
  const auto e = random_state(rng);
  const auto rho = random_qubit(rng);
  const Spectrum s = eels_spectrum(e, rho, coupling(0.0));
  for (std::size_t i = 0; i < e.amplitudes.size(); ++i)
    CHECK(s.prob_at(e.label(i)) ==
          doctest::Approx(std::norm(e.amplitudes[i])).epsilon(1e-14));
  CHECK(s.total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scattering: unshaped electron three-peak laws") {
  const double mag = 0.37;
  const auto g = coupling(mag, 0.8);
  const double c2 = std::cos(mag) * std::cos(mag);
  const double s2 = std::sin(mag) * std::sin(mag);

  SUBCASE("ground qubit only loses") {
    const Spectrum s = eels_spectrum(make_unshaped(), bloch_state(kPi, 0), g);
    CHECK(s.prob_at(-1.0) == doctest::Approx(s2).epsilon(1e-14));
    CHECK(s.prob_at(0.0) == doctest::Approx(c2).epsilon(1e-14));
    CHECK(s.prob_at(1.0) == doctest::Approx(0.0));
  }
  SUBCASE("excited qubit: joint populations") {
    const JointState js =
        apply_scattering(make_unshaped(), bloch_state(0.0, 0.0), g);
    REQUIRE(js.components.size() == 1);
    const auto& c = js.components.front();
    // (n=+1, qubit g) = sin^2|g|, (n=0, qubit e) = cos^2|g|.
    const std::size_t i0 = static_cast<std::size_t>(-js.offset);
    CHECK(c.weight * std::norm(c.amp_g[i0 + 1]) ==
          doctest::Approx(s2).epsilon(1e-14));
    CHECK(c.weight * std::norm(c.amp_e[i0]) ==
          doctest::Approx(c2).epsilon(1e-14));
    CHECK(js.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("scattering: unitarity on random inputs, with and without kappa") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto e = random_state(rng);
    const auto rho = random_qubit(rng);
    const auto g =
        coupling(0.5 * u01(rng), 2.0 * kPi * u01(rng) - kPi,
                 trial % 2 ? 0.2 * u01(rng) : 0.0);
    const JointState js = apply_scattering(e, rho, g);
    CHECK(js.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Spectrum s = electron_spectrum(js);
    CHECK(s.total() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("scattering: closed form equals the traced S application") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto e = random_state(rng, trial % 2);
    const auto rho = random_qubit(rng);
    const auto g = coupling(0.5 * u01(rng), 2.0 * kPi * u01(rng) - kPi);
    const Spectrum closed = eels_spectrum(e, rho, g);
    const Spectrum traced = electron_spectrum(apply_scattering(e, rho, g));
    for (std::size_t i = 0; i < closed.probabilities.size(); ++i) {
      CAPTURE(trial);
      CHECK(std::abs(closed.probabilities[i] -
                     traced.prob_at(closed.label(i))) <= 1e-12);
    }
    CHECK(closed.total() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("scattering: duo four-peak spectrum") {
  const double mag = 0.3;
  const double cs = std::cos(mag), sn = std::sin(mag);
  const double theta = 1.1, phi_a = 0.6, phi_e = -0.4, phi_g = 0.25;
  const auto g = coupling(mag, phi_g);
  // Qubit amplitudes a (ground) and b (excited) for the Bloch state.
  const double b = std::cos(0.5 * theta), a = std::sin(0.5 * theta);
  const double Phi = phi_a - phi_e - phi_g;

  const Spectrum s =
      eels_spectrum(make_duo(phi_e), bloch_state(theta, phi_a), g);
  const double inter = cs * sn * a * b * std::sin(Phi);
  CHECK(s.prob_at(-0.5) == doctest::Approx(0.5 * cs * cs +
                                           0.5 * a * a * sn * sn - inter)
                               .epsilon(1e-12));
  CHECK(s.prob_at(0.5) == doctest::Approx(0.5 * cs * cs +
                                          0.5 * b * b * sn * sn + inter)
                              .epsilon(1e-12));
  CHECK(s.prob_at(-1.5) == doctest::Approx(0.5 * a * a * sn * sn).epsilon(1e-12));
  CHECK(s.prob_at(1.5) == doctest::Approx(0.5 * b * b * sn * sn).epsilon(1e-12));
}

TEST_CASE("scattering: delta_p") {
  SUBCASE("first-order law at small g") {
    const auto s = eels_spectrum(make_duo(-0.5 * kPi),
                                 bloch_state(0.5 * kPi, 0.0), coupling(0.01));
    CHECK(std::abs(delta_p(s) - 0.01) <= 1e-4);
  }
  SUBCASE("flagship arithmetic at g = 0.1") {
    const auto s = eels_spectrum(make_duo(-0.5 * kPi),
                                 bloch_state(0.5 * kPi, 0.0), coupling(0.1));
    CHECK(delta_p(s) ==
          doctest::Approx(2.0 * std::cos(0.1) * std::sin(0.1) * 0.5)
              .epsilon(1e-12));
  }
  SUBCASE("symmetric spectrum gives zero") {
    const auto s = eels_spectrum(make_duo(0.0), bloch_state(0.5 * kPi, 0.0),
                                 coupling(0.2));  // Phi = 0
    CHECK(std::abs(delta_p(s)) <= 1e-15);
  }
  SUBCASE("fully decohered qubit gives zero for any phi_e") {
    QubitDensityMatrix rho;
    rho.p_excited = 0.5;
    rho.coherence = 0.0;
    for (double phi_e : {0.0, 0.9, 2.2})
      CHECK(std::abs(delta_p(eels_spectrum(make_duo(phi_e), rho,
                                           coupling(0.15)))) <= 1e-15);
  }
  SUBCASE("non-duo spectra are rejected") {
    const auto s =
        eels_spectrum(make_unshaped(), bloch_state(kPi, 0.0), coupling(0.1));
    CHECK_THROWS_AS(delta_p(s), std::invalid_argument);
  }
}

TEST_CASE("scattering: delta_p as a function of phi_e is sinusoidal") {
  const auto g = coupling(0.2, 0.7);
  const auto rho = bloch_state(0.9, 1.3);
  std::vector<double> xs, ys;
  for (int k = 0; k < 24; ++k) {
    xs.push_back(2.0 * kPi * k / 24);
    ys.push_back(delta_p(eels_spectrum(make_duo(xs.back()), rho, g)));
  }
  const FitResult fit = fit_sinusoid(xs, ys);
  CHECK(fit.residual_norm <= 1e-10);
  const double expect =
      2.0 * std::cos(0.2) * std::sin(0.2) * std::abs(rho.coherence);
  CHECK(fit.amplitude == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("scattering: decoherence scales the interference part exactly") {
  const auto g = coupling(0.25, -0.3);
  const auto e = make_duo(0.8);
  QubitDensityMatrix rho = bloch_state(1.2, 0.5);
  QubitDensityMatrix none = rho, damped = rho;
  none.coherence = 0.0;
  const double f = 0.37;  // e^{-tau/T2}
  damped.coherence *= f;

  const Spectrum full = eels_spectrum(e, rho, g);
  const Spectrum base = eels_spectrum(e, none, g);
  const Spectrum part = eels_spectrum(e, damped, g);
  for (std::size_t i = 0; i < full.probabilities.size(); ++i) {
    const double interference = full.probabilities[i] - base.probabilities[i];
    CHECK(std::abs(part.probabilities[i] -
                   (base.probabilities[i] + f * interference)) <= 1e-14);
  }
}

TEST_CASE("scattering: extra guard slots widen the window") {
  const auto e = make_unshaped();
  const auto rho = bloch_state(1.0, 0.0);
  const auto g = coupling(0.2);
  const JointState j0 = apply_scattering(e, rho, g);
  const JointState j2 = apply_scattering(e, rho, g, 2);
  CHECK(j2.offset == j0.offset - 2);
  CHECK(j2.components.front().amp_g.size() ==
        j0.components.front().amp_g.size() + 4);
  const Spectrum s0 = electron_spectrum(j0);
  const Spectrum s2 = electron_spectrum(j2);
  for (std::size_t i = 0; i < s0.probabilities.size(); ++i)
    CHECK(s2.prob_at(s0.label(i)) ==
          doctest::Approx(s0.probabilities[i]).epsilon(1e-14));
  CHECK_THROWS_AS(apply_scattering(e, rho, g, -1), std::invalid_argument);
}

TEST_CASE("scattering: global electron phase changes no probability") {
  std::mt19937_64 rng(21);
  auto e = random_state(rng);
  const auto rho = random_qubit(rng);
  const auto g = coupling(0.3, 1.1);
  const Spectrum s1 = eels_spectrum(e, rho, g);
  for (auto& a : e.amplitudes) a *= std::polar(1.0, 2.3);
  const Spectrum s2 = eels_spectrum(e, rho, g);
  for (std::size_t i = 0; i < s1.probabilities.size(); ++i)
    CHECK(s1.probabilities[i] ==
          doctest::Approx(s2.probabilities[i]).epsilon(1e-13));
}

TEST_CASE("scattering: average gain") {
  SUBCASE("unshaped on ground: pure loss") {
    const double mag = 0.2;
    CHECK(average_gain(make_unshaped(), bloch_state(kPi, 0.0), coupling(mag)) ==
          doctest::Approx(-std::sin(mag) * std::sin(mag)).epsilon(1e-13));
  }
  SUBCASE("phase comb leaves the incoherent gain only") {
    const auto comb = make_pinem(1.5, 0.4, 40);
    const auto rho = bloch_state(1.0, 0.7);  // coherent superposition
    const double mag = 0.1;
    const double expect =
        std::sin(mag) * std::sin(mag) * (2.0 * rho.p_excited - 1.0);
    CHECK(std::abs(average_gain(comb, rho, coupling(mag, 0.9)) - expect) <=
          1e-10);
  }
  SUBCASE("duo with equator qubit at maximal contrast") {
    // Exact value cos(g) sin(g) / 2; the principal peaks sit at labels
    // +-1/2 so the mean shift is half the probability difference.
    const double got = average_gain(make_duo(-0.5 * kPi),
                                    bloch_state(0.5 * kPi, 0.0), coupling(0.1));
    CHECK(got == doctest::Approx(0.04966733269876531).epsilon(1e-12));
  }
}
