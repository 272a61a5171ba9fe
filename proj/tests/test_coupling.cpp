#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "eqsim/constants.hpp"
#include "eqsim/coupling.hpp"

using namespace eqsim;

namespace {
PhysicalParams perovskite() {
  return PhysicalParams::from_lab_units(288.0, 0.0, 0.0, 3.0, 6.0, 0.07);
}
}  // namespace

TEST_CASE("coupling: perovskite flagship magnitude") {
  const CouplingConstant g = coupling_g(perovskite());
  CHECK(g.magnitude > 0.08);
  CHECK(g.magnitude < 0.12);
  // Frozen from an independent evaluation of the same closed form.
  CHECK(g.magnitude == doctest::Approx(0.10091451961516636).epsilon(1e-10));
  CHECK(g.phase == 0.0);
}

TEST_CASE("coupling: zero dipole and water-molecule scaling") {
  PhysicalParams p = perovskite();
  p.dipole_x = 0.0;
  const CouplingConstant z = coupling_g(p);
  CHECK(z.magnitude == 0.0);
  CHECK(z.phase == 0.0);

  const CouplingConstant w = coupling_g(
      PhysicalParams::from_lab_units(2.0, 0.0, 0.0, 3.0, 6.0, 0.07));
  CHECK(w.magnitude > 6.0e-4);
  CHECK(w.magnitude < 8.0e-4);
}

TEST_CASE("coupling: homogeneous of degree 1 in the dipole") {
  PhysicalParams p = PhysicalParams::from_lab_units(150.0, 0.0, 90.0, 2.1, 4.5, 0.05);
  const auto g1 = coupling_g(p).value();
  p.dipole_x *= 3.0;
  p.dipole_z *= 3.0;
  const auto g3 = coupling_g(p).value();
  CHECK(std::abs(g3 - 3.0 * g1) <= 1e-12 * std::abs(g3));
}

TEST_CASE("coupling: phase fixed by the dipole orientation") {
  const CouplingConstant gx = coupling_g(
      PhysicalParams::from_lab_units(50.0, 0.0, 0.0, 2.0, 5.0, 0.04));
  CHECK(gx.phase == 0.0);
  const CouplingConstant gz = coupling_g(
      PhysicalParams::from_lab_units(0.0, 0.0, 50.0, 2.0, 5.0, 0.04));
  CHECK(gz.phase == doctest::Approx(3.14159265358979 / 2).epsilon(1e-12));
}

TEST_CASE("coupling: |g| strictly decreasing in the impact parameter") {
  double prev = -1.0;
  for (double r = 2.0; r <= 20.0; r += 1.5) {
    const double mag = coupling_g(PhysicalParams::from_lab_units(
                                      288.0, 0.0, 120.0, 3.0, r, 0.07))
                           .magnitude;
    if (prev > 0.0) CHECK(mag < prev);
    prev = mag;
  }
}

TEST_CASE("coupling: dipole_y is accepted but flagged") {
  PhysicalParams p = perovskite();
  p.dipole_y = debye_to_si(10.0);
  const auto notes = p.validate();
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].find("dipole_y") != std::string::npos);
  CHECK(coupling_g(p).magnitude ==
        doctest::Approx(coupling_g(perovskite()).magnitude));
}

TEST_CASE("coupling: parameter validation") {
  PhysicalParams p = perovskite();
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = perovskite();
  p.beta = 1.0;
  CHECK_THROWS_AS(coupling_g(p), std::invalid_argument);
  p = perovskite();
  p.impact_parameter = -1e-9;
  CHECK_THROWS_AS(coupling_g(p), std::invalid_argument);
  p = perovskite();
  p.omega0 = 0.0;
  CHECK_THROWS_AS(coupling_g(p), std::invalid_argument);
}

TEST_CASE("optimal velocity: root locations") {
  const double w0 = ev_to_angular_frequency(3.0);
  const OptimalVelocity ox = optimal_velocity(DipoleOrientation::x, w0, 6e-9);
  CHECK(std::abs(ox.u - 1.33) <= 0.01);
  CHECK(ox.u == doctest::Approx(1.3315792183584563).epsilon(1e-7));
  const OptimalVelocity oz = optimal_velocity(DipoleOrientation::z, w0, 6e-9);
  CHECK(std::abs(oz.u - 1.55) <= 0.01);
  CHECK(oz.u == doctest::Approx(1.5526512556453662).epsilon(1e-7));

  // Perovskite geometry lands at v/c of about 7 percent.
  CHECK(ox.beta > 0.060);
  CHECK(ox.beta < 0.078);
  CHECK(!ox.relativistic_warning);
}

TEST_CASE("optimal velocity: local maximum of |g|(beta)") {
  const double w0 = ev_to_angular_frequency(3.0);
  const OptimalVelocity vo = optimal_velocity(DipoleOrientation::x, w0, 6e-9);
  auto mag_at = [&](double beta) {
    return coupling_g(PhysicalParams::from_lab_units(288.0, 0.0, 0.0, 3.0, 6.0,
                                                     beta))
        .magnitude;
  };
  const double center = mag_at(vo.beta);
  CHECK(center >= mag_at(vo.beta - 1e-3));
  CHECK(center >= mag_at(vo.beta + 1e-3));
}

TEST_CASE("optimal velocity: relativistic warning") {
  const double w0 = ev_to_angular_frequency(3.0);
  const OptimalVelocity vo = optimal_velocity(DipoleOrientation::x, w0, 30e-9);
  CHECK(vo.beta >= 0.3);
  CHECK(vo.relativistic_warning);
}

TEST_CASE("magnus order estimate") {
  PhysicalParams p = perovskite();
  SUBCASE("zero dipole gives zero at any order") {
    p.dipole_x = 0.0;
    CHECK(magnus_order_estimate(1, p) == 0.0);
    CHECK(magnus_order_estimate(3, p) == 0.0);
  }
  SUBCASE("flagship values and the n!-law") {
    // X = e d / (4 pi eps0 hbar v r); frozen by direct evaluation.
    const double x1 = magnus_order_estimate(1, p);
    CHECK(x1 == doctest::Approx(0.10417830967148152).epsilon(1e-10));
    const double x2 = magnus_order_estimate(2, p);
    CHECK(x2 == doctest::Approx(0.00542656010300355).epsilon(1e-10));
    CHECK(x2 / x1 == doctest::Approx(0.5 * x1).epsilon(1e-12));
    CHECK(magnus_order_estimate(3, p) ==
          doctest::Approx(x1 * x1 * x1 / 6.0).epsilon(1e-12));
  }
  SUBCASE("n must be positive") {
    CHECK_THROWS_AS(magnus_order_estimate(0, p), std::invalid_argument);
  }
}
