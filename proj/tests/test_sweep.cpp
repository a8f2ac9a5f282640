#include "doctest.h"
#include "support.hpp"
#include "zsspec/sweep.hpp"

using namespace testing;
using zs::ConnectivityMatrix;

namespace {

zs::AnchorSet triple(double t) { return anchors({{-0.3, 1.0}, {0.3, 1.0}, {0.0, t}}); }

const ConnectivityMatrix kPairUp = ConnectivityMatrix::from_rows({{0, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 1, 0}, {1, 0, 0, 1}});
const ConnectivityMatrix kAllFloating =
    ConnectivityMatrix::from_rows({{0, 0, 0, 0}, {0, 1, 1, 1}, {0, 1, 1, 1}, {0, 1, 1, 1}});

}  // namespace

TEST_CASE("traced solutions and their classes") {
  std::vector<std::string> failures;
  const auto sols = zs::traced_solutions(triple(0.4), {{{0.01, 0.6}}}, {}, {}, &failures);
  CHECK(failures.empty());
  REQUIRE(sols.size() == 2);
  CHECK(sols[0].odd == 0);
  CHECK(sols[1].odd == 1);
  CHECK(sols[0].connectivity == kPairUp);
  CHECK(sols[1].connectivity == kAllFloating);
  // the classes are incommensurable: neither solution lies in the other's class
  CHECK(zs::best_in_class(sols, kPairUp) == std::optional<std::size_t>(0));
  CHECK(zs::best_in_class(sols, kAllFloating) == std::optional<std::size_t>(1));
}

TEST_CASE("identical classes give coinciding curves and no crossover") {
  zs::SweepOptions o;
  o.lo = 0.3;
  o.hi = 0.5;
  o.n = 3;
  const zs::CrossoverReport r = zs::compare_classes(triple, kPairUp, kPairUp, {{{0.01, 0.6}}}, o);
  CHECK(r.identical);
  CHECK_FALSE(r.found);
  for (const zs::ClassCurvePoint& p : r.curve) CHECK(p.intensity[0] == p.intensity[1]);
}

TEST_CASE("far-separated pair: the grounded solution wins both classes") {
  const auto floating = ConnectivityMatrix::from_rows({{0, 0, 0}, {0, 1, 1}, {0, 1, 1}});
  const auto grounded = ConnectivityMatrix::from_rows({{0, 1, 1}, {1, 1, 0}, {1, 0, 1}});
  zs::SweepOptions o;
  o.lo = 2.0;
  o.hi = 6.0;
  o.n = 3;
  const zs::CrossoverReport r =
      zs::compare_classes([](double x) { return anchors({{-x, 1.0}, {x, 1.0}}); }, floating, grounded, {}, o);
  CHECK_FALSE(r.found);
  for (const zs::ClassCurvePoint& p : r.curve) {
    REQUIRE(p.intensity[0]);
    CHECK(*p.intensity[0] == *p.intensity[1]);
    CHECK(p.winner[0] == "011/111/111");
  }
}
