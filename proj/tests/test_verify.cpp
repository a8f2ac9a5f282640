#include "doctest.h"
#include "support.hpp"
#include "zsspec/errors.hpp"
#include "zsspec/verify.hpp"

using namespace testing;

namespace {

const zs::AnchorSet kUnit = anchors({{0.0, 1.0}});

const zs::EquilibriumMeasure& vertical() {
  static const zs::EquilibriumMeasure m = zs::solve_equilibrium(segment({0.0, 1.0}, {0.0, 0.0}));
  return m;
}

const zs::EquilibriumMeasure& tilt15() {
  static const zs::EquilibriumMeasure m = zs::solve_equilibrium(tilted(deg(15)));
  return m;
}

}  // namespace

TEST_CASE("S-property: vertical segment holds, tilted segment fails") {
  CHECK(zs::s_property_residual(vertical()) < 1e-6);
  CHECK(zs::s_property_residual(tilt15()) > 1e-2);
}

TEST_CASE("mismatch equals -2 d(u~)/ds on the tilted segment") {
  const zs::SPropertyReport r = zs::s_property(tilt15());
  REQUIRE(r.profiles.size() == 1);
  const zs::MismatchProfile& p = r.profiles[0];
  REQUIRE_FALSE(p.mismatch.empty());
  for (std::size_t k = 0; k < p.mismatch.size(); ++k) {
    CHECK(std::abs(p.mismatch[k] + 2.0 * p.u_tilde_derivative[k]) < 1e-3);
    CHECK(p.mismatch[k] > 0.0);  // one consistent sign along the arc
  }
}

TEST_CASE("dominant side") {
  const zs::SideReport v = zs::dominant_side(vertical(), {0.0, 0.5});
  CHECK(v.ambiguous);
  CHECK_THROWS_AS(zs::dominant_side(vertical(), {0.0, 0.5}, 1e-8, true), zs::Error);
  const zs::EquilibriumMeasure& m = tilt15();
  const zs::SideReport t = zs::dominant_side(m, m.contour.arcs[0]->point(0.5));
  CHECK_FALSE(t.ambiguous);
  CHECK(t.side == zs::Side::Plus);
  CHECK(t.mismatch == doctest::Approx(t.mismatch_integral).epsilon(1e-3));
}

TEST_CASE("Schiffer certificate") {
  const zs::SchifferCertificate c = zs::schiffer_certificate(vertical(), kUnit);
  CHECK(c.residual < 1e-6);
  // E (1 - P'^2) = (z^2 + 1)(1 - z^2/(z^2 + 1)) = 1
  REQUIRE(c.coeffs.size() == 2);
  CHECK(std::abs(c.coeffs[0]) < 1e-6);
  CHECK(std::abs(c.coeffs[1] - 1.0) < 1e-6);
  CHECK(zs::schiffer_certificate(tilt15(), kUnit).residual > 1e-2);
  // translation covariance
  const zs::EquilibriumMeasure shifted = zs::solve_equilibrium(segment({2.0, 1.0}, {2.0, 0.0}));
  CHECK(zs::schiffer_certificate(shifted, kUnit.translated(2.0)).residual < 1e-6);
}

TEST_CASE("orthogonal trajectories") {
  const zs::QuasimomentumField f(vertical());
  for (zs::Side side : {zs::Side::Plus, zs::Side::Minus}) {
    const zs::OrthogonalTrajectory t = zs::orthogonal_trajectory(f, {0.0, 0.5}, side);
    CHECK(t.end == zs::TrajectoryEnd::Escaped);
    // level lines of Re sqrt(z^2+1), which is +-sqrt(3)/2 on the two sides at the start
    REQUIRE(t.points.size() > 2);
    for (std::size_t k = 1; k < t.points.size(); ++k)
      CHECK(std::abs(std::abs(f.P(t.points[k]).real()) - std::sqrt(0.75)) < 1e-4);
    // V increases along the ascent
    for (std::size_t k = 2; k < t.points.size(); ++k) CHECK(f.P(t.points[k]).imag() >= f.P(t.points[k - 1]).imag() - 1e-12);
  }
  // on the symmetry axis under a floating arch the ascent runs into the zero of P'
  zs::Contour arch;
  arch.arcs.push_back(zs::make_circular_arc({-1.0, 1.0}, {1.0, 1.0}, 0.5));
  const zs::EquilibriumMeasure m = zs::solve_equilibrium(arch);
  const zs::QuasimomentumField fa(m);
  const zs::PolyContinuum K = arch.continuum();
  const zs::OrthogonalTrajectory up = zs::ascent_from(fa, {0.0, 0.3}, &K);
  REQUIRE(up.end == zs::TrajectoryEnd::Stagnation);
  const zs::StagnationSet zeros = zs::stagnation_points(fa, 1);
  CHECK(std::abs(up.stagnation - zeros.points[0]) < 1e-8);
  CHECK(up.branches.size() == 2);
}

TEST_CASE("Jenkins interception") {
  CHECK(zs::jenkins_check(vertical(), segment({0.0, 1.0}, 0.0).continuum(), 16).overall);
  CHECK(zs::jenkins_check(vertical(), tilted(deg(15)).continuum(), 16).overall);
  zs::Contour circle;
  circle.arcs.push_back(zs::make_circular_arc({5.0, 0.5}, {5.0, 0.6}, 1.0));
  CHECK_FALSE(zs::jenkins_check(vertical(), circle.continuum(), 16).overall);
}

TEST_CASE("energy inequality probes") {
  const zs::ConnectivityMatrix M = zs::ConnectivityMatrix::from_rows({{0, 1}, {1, 1}});
  const auto family = [](double x) { return segment({0.0, 1.0}, {x, 0.0}); };
  const zs::ProbeReport r = zs::energy_inequality_probe(kUnit, M, 0.5, family, -0.5, 0.5, 5);
  CHECK(r.holds);
  for (const zs::ProbePoint& p : r.points) {
    if (p.theta == 0.0)
      CHECK(std::abs(p.margin) < 1e-9);
    else
      CHECK(p.margin > 0.0);
  }
  const auto bulged = [](double b) {
    zs::Contour K;
    K.arcs.push_back(zs::make_circular_arc({0.0, 1.0}, 0.0, b));
    return K;
  };
  const zs::ProbeReport c = zs::energy_inequality_probe(kUnit, M, 0.5, bulged, -0.4, 0.4, 5);
  CHECK(c.holds);
  CHECK(c.min_margin > -1e-9);
  // scaling the whole family by 2 scales energies by 4
  const auto scaled = [&](double x) { return family(x).affine(2.0, 0.0); };
  const zs::ProbeReport s = zs::energy_inequality_probe(kUnit.scaled(2.0), M, 2.0, scaled, -0.5, 0.5, 3);
  for (std::size_t k = 0; k < s.points.size(); ++k)
    CHECK(s.points[k].intensity == doctest::Approx(4.0 * r.points[2 * k].intensity).epsilon(1e-9));
}

TEST_CASE("continuity and raise probes") {
  const zs::ContinuityReport c = zs::continuity_probe(segment({0.0, 1.0}, 0.0), {0.1, 0.05, 0.025, 0.0125});
  CHECK(c.monotone);
  for (std::size_t k = 1; k < c.rows.size(); ++k) {
    const double ratio = c.rows[k - 1].difference / c.rows[k].difference;
    CHECK(ratio > 1.0);
    CHECK(ratio < 8.0);
  }
  CHECK(zs::continuity_probe(segment({0.0, 1.0}, 0.0), {0.0}).rows[0].difference == doctest::Approx(0.0));

  const zs::RaiseReport r = zs::raise_probe(segment({-0.5, 1.0}, {0.5, 1.0}), {0}, {1, 2, 4, 8});
  CHECK(r.increasing);
  // growth is faster than linear in h
  CHECK((r.intensities[3] - r.intensities[2]) / 4.0 > (r.intensities[1] - r.intensities[0]) / 1.0);
}

TEST_CASE("endpoint exponent is -1/2") {
  CHECK(zs::endpoint_exponent(vertical(), 0, true) == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(zs::endpoint_exponent(tilt15(), 0, true) == doctest::Approx(-0.5).epsilon(0.1));
}
