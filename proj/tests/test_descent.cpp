#include "doctest.h"
#include "support.hpp"
#include "zsspec/descent.hpp"
#include "zsspec/errors.hpp"
#include "zsspec/tracer.hpp"

using namespace testing;
using zs::ArcTemplate;
using zs::ConnectivityMatrix;

TEST_CASE("topologies of a class") {
  const zs::AnchorSet E = anchors({{-1.0, 1.0}, {1.0, 1.0}});
  const auto floating = ConnectivityMatrix::from_rows({{0, 0, 0}, {0, 1, 1}, {0, 1, 1}});
  const auto grounded = ConnectivityMatrix::from_rows({{0, 1, 1}, {1, 1, 0}, {1, 0, 1}});
  // the real axis links grounded anchors, so both topologies realize the floating class
  CHECK(zs::class_topologies(E, floating).size() == 2);
  CHECK(zs::class_topologies(E, grounded).size() == 1);
  CHECK(zs::class_topologies(E, ConnectivityMatrix(2)).size() == 2);

  zs::Topology t;
  t.arcs = {{0, 1}};
  const ConnectivityMatrix M = t.connectivity(2);
  CHECK(M(1, 2));
  CHECK_FALSE(M(0, 1));
  CHECK(t.to_string() == "e1-e2");

  const zs::AnchorSet E3 = anchors({{-1.0, 1.0}, {0.0, 1.0}, {1.0, 1.0}});
  // 3 anchors: all grounded, or one pair plus one grounded (3 ways)
  CHECK(zs::class_topologies(E3, ConnectivityMatrix(3)).size() == 4);
}

TEST_CASE("spline class parameters") {
  const zs::AnchorSet E = anchors({{0.5, 1.0}});
  zs::Topology t;
  t.arcs = {{0, ArcTemplate::kGround}};
  const zs::SplineClass cls{E, t, 3};
  CHECK(cls.dimension() == 4);
  const std::vector<double> x = cls.straight();
  const zs::Contour K = cls.contour(x);
  CHECK(zs::hausdorff_distance(K.continuum(), polyline({{{0.5, 1.0}, {0.5, 0.0}}})) < 1e-9);
  // fitting a polyline recovers the tilted straight segment
  const std::vector<double> y = cls.fit({{{0.5, 1.0}, {0.8, 0.0}}});
  CHECK(y[0] == doctest::Approx(0.8));
  for (std::size_t k = 1; k < y.size(); ++k) CHECK(std::abs(y[k]) < 1e-12);
  CHECK_THROWS_AS(cls.contour({0.1}), zs::Error);
}

TEST_CASE("descent from a 20 degree seed reaches the vertical segment") {
  const zs::AnchorSet E = anchors({{0.0, 1.0}});
  const auto M = ConnectivityMatrix::from_rows({{0, 1}, {1, 1}});
  zs::Topology t;
  t.arcs = {{0, ArcTemplate::kGround}};
  const zs::DescentResult r = zs::minimize_in_class(E, M, t, {{{0.0, 1.0}, {std::tan(deg(20)), 0.0}}});
  CHECK(r.converged);
  CHECK(r.rejected == 0);
  CHECK(std::abs(r.intensity - 0.5) < 1e-3);
  CHECK(zs::hausdorff_distance(r.continuum, polyline({{{0.0, 1.0}, {0.0, 0.0}}})) < 1e-2);
  // intensities never increase along the iterations
  for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k] <= r.history[k - 1]);
}

TEST_CASE("seed outside the class is rejected") {
  const zs::AnchorSet E = anchors({{-1.0, 1.0}, {1.0, 1.0}});
  const auto M = ConnectivityMatrix::from_rows({{0, 1, 1}, {1, 1, 0}, {1, 0, 1}});
  zs::Topology t;
  t.arcs = {{0, 1}};
  CHECK_THROWS_AS(zs::minimize_in_class(E, M, t, {}), zs::Error);
}
