#include <random>

#include "doctest.h"
#include "support.hpp"
#include "zsspec/errors.hpp"

using namespace testing;
using zs::ConnectivityMatrix;

TEST_CASE("anchor validation") {
  CHECK_THROWS_WITH(anchors({{0.0, -1.0}}), doctest::Contains("anchor below real axis"));
  CHECK_THROWS_WITH(anchors({{0.0, 0.0}}), doctest::Contains("anchor below real axis"));
  CHECK_THROWS_WITH(anchors({{0.0, 1.0}, {0.0, 1.0}}), doctest::Contains("duplicate"));
  CHECK_THROWS(anchors({}));
  const zs::AnchorSet E = anchors({{-1.0, 1.0}, {1.0, 1.0}});
  CHECK(E.diameter() == doctest::Approx(std::sqrt(8.0)));
  // (z^2+2z+2)(z^2-2z+2) = z^4 + 4
  const zs::RealPoly D = E.denominator();
  REQUIRE(D.size() == 5);
  CHECK(D[0] == doctest::Approx(1.0));
  CHECK(std::abs(D[1]) < 1e-14);
  CHECK(std::abs(D[2]) < 1e-14);
  CHECK(std::abs(D[3]) < 1e-14);
  CHECK(D[4] == doctest::Approx(4.0));
}

TEST_CASE("connectivity of canned continua") {
  const zs::AnchorSet Ei = anchors({{0.0, 1.0}});
  const ConnectivityMatrix Mi = zs::connectivity_of(polyline({{{0, 1}, {0, 0}}}), Ei);
  CHECK(Mi(0, 1));

  const zs::AnchorSet E = anchors({{-1.0, 1.0}, {1.0, 1.0}});
  const ConnectivityMatrix floating = zs::connectivity_of(polyline({{{-1, 1}, {1, 1}}}), E);
  CHECK(floating(1, 2));
  CHECK_FALSE(floating(0, 1));
  CHECK_FALSE(floating(0, 2));

  const ConnectivityMatrix grounded = zs::connectivity_of(polyline({{{-1, 1}, {-1, 0}}, {{1, 1}, {1, 0}}}), E);
  CHECK(grounded(0, 1));
  CHECK(grounded(0, 2));
  CHECK(grounded(1, 2));  // both reach R, so they share a component of K u R

  CHECK_THROWS_AS(zs::connectivity_of(polyline({{{-1, 1}, {-1, 0}}}), E), zs::Error);
}

TEST_CASE("class membership") {
  const zs::AnchorSet E = anchors({{-1.0, 1.0}, {1.0, 1.0}});
  const zs::PolyContinuum two_floating = polyline({{{-1, 1}, {-1, 2}}, {{1, 1}, {1, 2}}});
  CHECK(zs::class_membership(two_floating, E, ConnectivityMatrix(2)));
  const ConnectivityMatrix joined = ConnectivityMatrix::from_rows({{0, 0, 0}, {0, 1, 1}, {0, 1, 1}});
  CHECK_FALSE(zs::class_membership(two_floating, E, joined));
  const zs::PolyContinuum arch_to_ground = polyline({{{-1, 1}, {1, 1}}, {{-1, 1}, {-1, 0}}});
  CHECK(zs::class_membership(arch_to_ground, E, joined));
  CHECK(zs::admissible(arch_to_ground, E));
}

TEST_CASE("connectivity matrix") {
  CHECK_THROWS(ConnectivityMatrix::from_rows({{0, 1}, {0, 1}}));
  CHECK_THROWS(ConnectivityMatrix::from_rows({{0, 1, 0}, {1, 1}}));
  const ConnectivityMatrix a = ConnectivityMatrix::from_rows({{0, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  const ConnectivityMatrix b = ConnectivityMatrix::from_rows({{0, 0, 0}, {0, 1, 1}, {0, 1, 1}});
  CHECK(a.dominates(b));
  CHECK_FALSE(b.dominates(a));
  CHECK(ConnectivityMatrix::from_rows(a.rows()) == a);
}

TEST_CASE("hausdorff distance examples") {
  const zs::PolyContinuum V = polyline({{{0, 0}, {0, 1}}});
  CHECK(zs::hausdorff_distance(V, V) == doctest::Approx(0.0));
  CHECK(zs::hausdorff_distance(V, polyline({{{0.1, 0}, {0.1, 1}}})) == doctest::Approx(0.1).epsilon(1e-12));
  const zs::PolyContinuum with_point = polyline({{{0, 0}, {0, 1}}, {{0.05, 0.5}, {0.05, 0.5}}});
  CHECK(zs::hausdorff_distance(V, with_point) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("property: hausdorff triangle inequality and refinement invariance") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.05, 2.0);
  auto random_polyline = [&]() {
    std::vector<cplx> p;
    for (int k = 0; k < 4; ++k) p.emplace_back(U(rng) - 1.0, U(rng));
    return polyline({p});
  };
  for (int trial = 0; trial < 30; ++trial) {
    const zs::PolyContinuum A = random_polyline(), B = random_polyline(), C = random_polyline();
    const double h = 1e-3;
    CHECK(zs::hausdorff_distance(A, B, h) <= zs::hausdorff_distance(A, C, h) + zs::hausdorff_distance(C, B, h) + h);
  }
  const zs::AnchorSet E = anchors({{-1.0, 1.0}, {1.0, 1.0}, {0.0, 2.0}});
  const zs::Contour K = zs::contour_from_polylines({{{-1, 1}, {0, 1.6}, {1, 1}}, {{0, 2}, {0.2, 1}, {0.3, 0}}});
  CHECK(zs::connectivity_of(K.continuum(64), E) == zs::connectivity_of(K.continuum(128), E));
}

TEST_CASE("property: enlarging K keeps class membership") {
  const zs::AnchorSet E = anchors({{-1.0, 1.0}, {1.0, 1.0}});
  const ConnectivityMatrix M = ConnectivityMatrix::from_rows({{0, 0, 0}, {0, 1, 1}, {0, 1, 1}});
  std::vector<std::vector<cplx>> arcs{{{-1, 1}, {1, 1}}};
  REQUIRE(zs::class_membership(polyline(arcs), E, M));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const cplx a(U(rng), 1.0);
    arcs.push_back({a, a + cplx(0.3 * U(rng), 0.5 + 0.5 * U(rng))});
    CHECK(zs::class_membership(polyline(arcs), E, M));
  }
}
