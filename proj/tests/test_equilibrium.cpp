#include <random>

#include "doctest.h"
#include "support.hpp"
#include "zsspec/equilibrium.hpp"
#include "zsspec/errors.hpp"

using namespace testing;

namespace {

// Independent solver: piecewise-constant density on a graded mesh, exact
// logarithmic integrals over straight pieces, midpoint collocation and
// Richardson extrapolation over four refinements.
constexpr double kTilt15Intensity = 0.50667301599;
constexpr double kTilt15OracleError = 3e-10;

const zs::EquilibriumMeasure& unit_segment() {
  static const zs::EquilibriumMeasure m = zs::solve_equilibrium(segment({0.0, 1.0}, {0.0, 0.0}));
  return m;
}

}  // namespace

TEST_CASE("segment [0, ib]: closed-form density, mass and intensity") {
  for (double b : {1.0, 2.0}) {
    const zs::EquilibriumMeasure m = b == 1.0 ? unit_segment() : zs::solve_equilibrium(segment({0.0, b}, 0.0));
    CHECK(m.total() == doctest::Approx(b / zs::kPi).epsilon(1e-10));
    CHECK(m.intensity() == doctest::Approx(b * b / 2).epsilon(1e-10));
    CHECK(m.bc_residual < 1e-8);
    CHECK_FALSE(m.negative_density);
    double err = 0.0;
    for (std::size_t k = 0; k < m.nodes.size(); ++k) {
      const double y = m.nodes[k].imag();
      if (y > 0.95 * b) continue;
      err = std::max(err, std::abs(m.density[k] - y / (zs::kPi * std::sqrt(b * b - y * y))));
    }
    CHECK(err < 1e-3);
  }
}

TEST_CASE("green potential and quasimomentum of the unit segment") {
  const zs::EquilibriumMeasure& m = unit_segment();
  const zs::QuasimomentumField f(m);
  // P(z) = sqrt(z^2 + 1), G = Im z - Im P
  for (cplx z : {cplx(0.5, 0.5), cplx(-1.0, 2.0), cplx(0.0, 2.0), cplx(3.0, 0.1)}) {
    const cplx P = z * std::sqrt(1.0 + 1.0 / (z * z));  // branch cut on [-i, i]
    CHECK(std::abs(zs::green_potential(m, z) - (z.imag() - P.imag())) < 1e-9);
    CHECK(std::abs(f.dP(z) - z / P) < 1e-9);
  }
  CHECK(std::abs(f.P(cplx(0, 2)) - cplx(0, std::sqrt(3.0))) < 1e-9);
  CHECK(zs::green_potential(m, 0.7) == 0.0);
  // G(iy) ~ I / y and the 1/z coefficient of P equals I
  const double y = 1e3;
  CHECK(zs::green_potential(m, cplx(0, y)) * y == doctest::Approx(0.5).epsilon(1e-5));
  const cplx z(700.0, 300.0);
  CHECK(std::abs((f.P(z) - z) * z - 0.5) < 1e-5);
  // Im P vanishes on the real axis
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (int k = 0; k < 20; ++k) CHECK(std::abs(f.P(U(rng)).imag()) < 1e-8);
  // boundary values on K between collocation nodes
  for (double t : {0.13, 0.37, 0.61, 0.89}) CHECK(std::abs(zs::green_potential(m, cplx(0, t)) - t) < 1e-8);
}

TEST_CASE("intensity report: three-way agreement on canned contours") {
  const zs::EnergyReport r = zs::intensity_report(unit_segment(), 512);
  CHECK(r.I_measure == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(r.I_residue - r.I_measure) < 1e-6);
  CHECK(std::abs(r.I_dirichlet - r.I_measure) < 1e-2);

  const zs::EquilibriumMeasure m2 = zs::solve_equilibrium(segment({1.0, 0.0}, {1.0, 2.0}));
  const zs::EnergyReport r2 = zs::intensity_report(m2, 512);
  CHECK(r2.I_measure == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(r2.I_residue - 2.0) < 1e-6);
  CHECK(std::abs(r2.I_dirichlet - 2.0) < 2e-2);

  const zs::EquilibriumMeasure flat = zs::solve_equilibrium(segment({-1.0, 0.0}, {1.0, 0.0}));
  CHECK(flat.empty());
  const zs::EnergyReport r3 = zs::intensity_report(flat, 512);
  CHECK(r3.I_measure == 0.0);
  CHECK(r3.I_residue == 0.0);
  CHECK(r3.I_dirichlet == 0.0);
}

TEST_CASE("tilted segment against the independent oracle") {
  const zs::EquilibriumMeasure m = zs::solve_equilibrium(tilted(deg(15)));
  CHECK(std::abs(m.intensity() - kTilt15Intensity) < 1e-9 + kTilt15OracleError);
  CHECK(m.intensity() > 0.5 + 1e-3);
}

TEST_CASE("far pair is nearly additive") {
  zs::Contour K = segment({-10.0, 0.0}, {-10.0, 1.0});
  K.arcs.push_back(zs::make_segment({10.0, 0.0}, {10.0, 1.0}));
  const zs::EquilibriumMeasure m = zs::solve_equilibrium(K);
  CHECK(std::abs(m.intensity() - 1.0) < 1e-2);
  CHECK(m.intensity() < 1.0);
}

TEST_CASE("external field: z^2 on the unit segment") {
  const zs::ExternalField quad({0.0, 1.0});
  // Im(w^2) = 2xy vanishes on the imaginary axis
  CHECK(std::abs(zs::intensity_phi(zs::solve_equilibrium(segment({0.0, 1.0}, 0.0), quad), quad)) < 1e-10);
  CHECK_THROWS_AS(zs::intensity_phi(unit_segment(), quad), zs::Error);
  CHECK(zs::intensity_phi(unit_segment(), zs::ExternalField{}) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_THROWS_AS(zs::ExternalField({1.0, -1.0}), zs::Error);
}

TEST_CASE("property: translation and scaling of the contour") {
  const zs::Contour K = zs::contour_from_polylines({{{0, 1}, {0.3, 0.5}, {0.2, 0}}, {{-1, 0.5}, {-0.8, 0}}});
  const double I0 = zs::solve_equilibrium(K).intensity();
  CHECK(zs::solve_equilibrium(K.affine(1.0, 2.5)).intensity() == doctest::Approx(I0).epsilon(1e-9));
  CHECK(zs::solve_equilibrium(K.affine(3.0, 0.0)).intensity() == doctest::Approx(9.0 * I0).epsilon(1e-9));
}

TEST_CASE("stagnation points") {
  CHECK(zs::stagnation_points(zs::QuasimomentumField(unit_segment())).total() == 0);
  // floating arch joining -1+i and 1+i: one zero, on the imaginary axis by symmetry
  zs::Contour arch;
  arch.arcs.push_back(zs::make_circular_arc({-1.0, 1.0}, {1.0, 1.0}, 0.5));
  const zs::EquilibriumMeasure m = zs::solve_equilibrium(arch);
  const zs::StagnationSet s = zs::stagnation_points(zs::QuasimomentumField(m), 1);
  REQUIRE(s.total() == 1);
  CHECK(std::abs(s.points[0].real()) < 1e-8);
  CHECK_THROWS_AS(zs::stagnation_points(zs::QuasimomentumField(m), 2), zs::Error);
}

TEST_CASE("property: positivity of the default-field density") {
  for (double th : {-30.0, -10.0, 0.0, 20.0}) {
    const zs::EquilibriumMeasure m = zs::solve_equilibrium(tilted(deg(th)));
    CHECK_FALSE(m.negative_density);
    // node weights of the measure; the density itself is mu / |dz/dtau| and
    // amplifies rounding at the graded ends, where it vanishes at a foot
    for (double w : m.weights) CHECK(w > -1e-10 * m.total());
  }
}
