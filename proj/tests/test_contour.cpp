#include "doctest.h"
#include "support.hpp"

using namespace testing;

TEST_CASE("cluster map and its complement") {
  for (double tau : {0.0, 1e-9, 0.1, 0.5, 0.9, 1.0 - 1e-9, 1.0}) {
    CHECK(zs::cluster(tau) + zs::cluster_comp(tau) == doctest::Approx(1.0));
    CHECK(zs::cluster(1.0 - tau) == doctest::Approx(zs::cluster_comp(tau)));
  }
  // derivative against a central difference
  for (double tau : {0.2, 0.5, 0.8}) {
    const double h = 1e-6;
    CHECK(zs::cluster_deriv(tau) == doctest::Approx((zs::cluster(tau + h) - zs::cluster(tau - h)) / (2 * h)).epsilon(1e-8));
  }
}

TEST_CASE("segment keeps relative accuracy near both ends") {
  const zs::ArcPtr s = zs::make_segment({0.0, 1.0}, {0.0, 0.0});
  CHECK(s->start() == cplx(0.0, 1.0));
  CHECK(s->finish() == cplx(0.0, 0.0));
  const double u = 1.0 - 1e-7;
  const double tau = 1.0 - u;  // exact complement of the argument actually passed
  // distance to the far end keeps relative accuracy instead of cancelling
  CHECK(std::abs(s->point(u).imag() - zs::cluster(tau)) < 1e-12 * zs::cluster(tau));
  CHECK(s->length() == doctest::Approx(1.0));
}

TEST_CASE("circular arc endpoints and bulge") {
  const zs::ArcPtr c = zs::make_circular_arc({-1.0, 1.0}, {1.0, 1.0}, 0.5);
  CHECK(std::abs(c->start() - cplx(-1.0, 1.0)) < 1e-14);
  CHECK(std::abs(c->finish() - cplx(1.0, 1.0)) < 1e-14);
  // sagitta 0.5 * half chord, to the left of a->b; every point on the circle through the ends
  CHECK(std::abs(c->point(0.5) - cplx(0.0, 1.5)) < 1e-14);
  const cplx center(0.0, 0.25);
  for (double tau : {0.1, 0.3, 0.7, 0.9}) {
    CHECK(std::abs(std::abs(c->point(tau) - center) - 1.25) < 1e-14);
    CHECK(c->point(tau).imag() > 1.0);
  }
  CHECK(zs::make_circular_arc({-1.0, 1.0}, {1.0, 1.0}, -0.5)->point(0.5).imag() == doctest::Approx(0.5));
  const double h = 1e-6;
  for (double tau : {0.3, 0.6}) {
    const cplx fd = (c->point(tau + h) - c->point(tau - h)) / (2 * h);
    CHECK(std::abs(c->deriv(tau) - fd) < 1e-6 * std::abs(fd));
  }
}

TEST_CASE("spline passes through its points") {
  const std::vector<cplx> pts{{0.0, 1.0}, {0.2, 0.7}, {0.1, 0.3}, {0.4, 0.0}};
  const zs::ArcPtr s = zs::make_spline(pts);
  CHECK(std::abs(s->start() - pts.front()) < 1e-14);
  CHECK(std::abs(s->finish() - pts.back()) < 1e-14);
  const zs::Arc a = s->sample(2000);
  for (const cplx& p : pts) CHECK(zs::distance_to(a, p) < 1e-3);
}

TEST_CASE("affine and displaced arcs") {
  const zs::Contour K = segment({0.0, 1.0}, {0.0, 0.0});
  const zs::Contour M = K.affine(2.0, 1.0);
  CHECK(std::abs(M.arcs[0]->start() - cplx(1.0, 2.0)) < 1e-14);
  CHECK(std::abs(M.arcs[0]->deriv(0.3) - 2.0 * K.arcs[0]->deriv(0.3)) < 1e-14);

  const zs::ArcPtr d = zs::make_displaced(K.arcs[0], 0.1);
  CHECK(std::abs(d->start() - K.arcs[0]->start()) < 1e-14);
  CHECK(std::abs(d->finish() - K.arcs[0]->finish()) < 1e-14);
  // left normal of a downward segment points to +x
  CHECK(d->point(0.5).real() == doctest::Approx(0.1));
  const double h = 1e-6;
  const cplx fd = (d->point(0.4 + h) - d->point(0.4 - h)) / (2 * h);
  CHECK(std::abs(d->deriv(0.4) - fd) < 1e-5);
}

TEST_CASE("contour from polylines") {
  const zs::Contour K = zs::contour_from_polylines({{{0, 1}, {0, 0}}, {{1, 1}, {1.2, 0.5}, {1, 0}}});
  REQUIRE(K.arcs.size() == 2);
  const zs::PolyContinuum P = K.continuum();
  CHECK(P.has_ground);
  CHECK(P.floating_count() == 0);
  CHECK(K.diameter() > 1.0);
}
