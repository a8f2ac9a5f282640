#include <random>

#include "doctest.h"
#include "support.hpp"
#include "zsspec/errors.hpp"
#include "zsspec/tracer.hpp"

using namespace testing;

namespace {

zs::QuadraticDifferential unit() { return zs::QuadraticDifferential::from_coeffs(anchors({{0.0, 1.0}}), {0.0, 0.0}); }

}  // namespace

TEST_CASE("critical directions") {
  const auto qd = unit();
  const auto d = zs::critical_directions(qd, cplx(0, 1));
  REQUIRE(d.size() == 1);
  CHECK(std::abs(std::exp(cplx(0, d[0])) - cplx(0, -1)) < 1e-9);

  // P = z^2 has a double zero at 0 on the real axis: four directions at right angles
  const auto d0 = zs::critical_directions(qd, 0.0);
  REQUIRE(d0.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    const double gap = std::remainder(d0[(k + 1) % 4] - d0[k], 2 * zs::kPi);
    CHECK(std::abs(std::abs(gap) - zs::kPi / 2) < 1e-9);
  }
}

TEST_CASE("simple zero has three directions at equal angles") {
  // one odd zero in the upper half-plane
  const auto qd = zs::solve_boutroux(anchors({{-0.3, 1.0}, {0.3, 1.0}, {0.0, 0.4}}), 3, {{0.01, 0.6}});
  REQUIRE(qd.odd_zeros().size() == 1);
  const auto d = zs::critical_directions(qd, qd.odd_zeros()[0]);
  REQUIRE(d.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const double gap = std::remainder(d[(k + 1) % 3] - d[k], 2 * zs::kPi);
    CHECK(std::abs(std::abs(gap) - 2 * zs::kPi / 3) < 1e-8);
  }
}

TEST_CASE("trajectory from i is the vertical segment") {
  for (const cplx e : {cplx(0, 1), cplx(1, 2)}) {
    const auto qd = zs::solve_boutroux(anchors({e}), 0);
    const auto d = zs::critical_directions(qd, e);
    REQUIRE(d.size() == 1);
    const zs::Trajectory t = zs::trace_trajectory(qd, e, d[0]);
    // the foot Re e is the double zero of Q, so the trace ends at a critical point on R
    CHECK(t.termination == zs::Termination::CriticalPoint);
    CHECK(std::abs(t.samples.back() - e.real()) < 1e-9);
    CHECK(t.max_level_drift < 1e-10);
    const zs::PolyContinuum got = zs::make_continuum({zs::Arc{t.samples, false}});
    CHECK(zs::hausdorff_distance(got, polyline({{e, e.real()}})) < 1e-6);
  }
}

TEST_CASE("a horizontal start on the real axis stays on the real axis") {
  const zs::Trajectory t = zs::trace_trajectory(unit(), 0.5, 0.0);
  for (const cplx& z : t.samples) CHECK(std::abs(z.imag()) < 1e-12);
}

TEST_CASE("graph and spectrum for E = {i}") {
  const zs::CriticalGraph g = zs::build_critical_graph(unit());
  CHECK(g.cycles == 0);
  const zs::ZSSpectrum sp = zs::extract_zs_spectrum(g);
  CHECK(zs::hausdorff_distance(sp.continuum, polyline({{{0, 0}, {0, 1}}})) < 1e-6);
  const zs::ConnectivityMatrix M = zs::connectivity_of(sp.continuum, anchors({{0.0, 1.0}}));
  CHECK(M(0, 1));
}

TEST_CASE("zs_measure closed forms for E = {ib}") {
  for (double b : {1.0, 2.0}) {
    const auto qd = zs::solve_boutroux(anchors({{0.0, b}}), 0);
    const zs::ZSSpectrum sp = zs::extract_zs_spectrum(zs::build_critical_graph(qd));
    const zs::ZSMeasure mu = zs::zs_measure(qd, sp);
    CHECK(mu.total() == doctest::Approx(b / zs::kPi).epsilon(1e-10));
    CHECK(mu.intensity() == doctest::Approx(b * b / 2).epsilon(1e-10));
    for (std::size_t k = 0; k < mu.nodes.size(); ++k) {
      const double y = mu.nodes[k].imag();
      if (y > 0.9 * b || y < 0.05 * b) continue;
      CHECK(mu.density[k] == doctest::Approx(y / (zs::kPi * std::sqrt(b * b - y * y))).epsilon(1e-9));
    }
  }
}

struct Instance {
  const char* name;
  zs::AnchorSet E;
  int genus;
  std::vector<cplx> seed;
};

TEST_CASE("property: traced instances satisfy the structural invariants") {
  const std::vector<Instance> cases{
      {"pair", anchors({{-1.0, 1.0}, {1.0, 1.0}}), 1, {}},
      {"triple", anchors({{-0.3, 1.0}, {0.3, 1.0}, {0.0, 0.4}}), 2, {}},
      {"triple with odd zero", anchors({{-0.3, 1.0}, {0.3, 1.0}, {0.0, 0.4}}), 3, {{0.01, 0.6}}},
      {"asymmetric", anchors({{-1.0, 1.0}, {0.5, 1.7}, {1.3, 0.6}}), 2, {}},
  };
  std::mt19937_64 rng(5);
  for (const Instance& c : cases) {
    const std::string name = c.name;
    CAPTURE(name);
    const auto qd = zs::solve_boutroux(c.E, c.genus, c.seed);
    const zs::TraceOptions opt;
    const zs::CriticalGraph g = zs::build_critical_graph(qd, opt);
    CHECK(g.cycles == 0);
    for (const zs::Trajectory& t : g.edges)
      if (t.level_zero) CHECK(t.max_level_drift < 1e-8);
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
      const zs::CriticalPoint& p = g.vertices[v];
      if (p.on_real || !p.level_zero) continue;
      int level_zero_degree = 0;
      for (int e : g.incidence[v]) level_zero_degree += g.edges[e].level_zero ? 1 : 0;
      const int expected = p.order < 0 ? 1 : p.order + 2;
      CHECK(static_cast<int>(g.incidence[v].size()) == expected);
      CHECK(level_zero_degree >= 1);
    }
    const zs::ZSSpectrum sp = zs::extract_zs_spectrum(g);
    const zs::ZSMeasure mu = zs::zs_measure(qd, sp);
    CHECK(std::abs(mu.intensity() - zs::residue_intensity(qd)) < 1e-6);
    // Sokhotski-Plemelj: (1 + Cauchy transform of the measure)^2 = Q off the spectrum
    std::uniform_real_distribution<double> X(-2.0, 2.0), Y(0.05, 2.5);
    int tested = 0;
    while (tested < 20) {
      const cplx z(X(rng), Y(rng));
      if (zs::distance_to(sp.continuum, z) < 0.05) continue;
      const cplx w = 1.0 + mu.cauchy(z);
      CHECK(std::abs(w * w - zs::eval_Q(qd, z)) < 1e-5 * std::max(1.0, std::abs(w * w)));
      ++tested;
    }
  }
}

TEST_CASE("pair spectrum is grounded and holds both anchors") {
  const zs::AnchorSet E = anchors({{-1.0, 1.0}, {1.0, 1.0}});
  const auto qd = zs::solve_boutroux(E, 1);
  const zs::ZSSpectrum sp = zs::extract_zs_spectrum(zs::build_critical_graph(qd));
  CHECK(zs::admissible(sp.continuum, E));
  const zs::ConnectivityMatrix M = zs::connectivity_of(sp.continuum, E);
  CHECK(M(0, 1));
  CHECK(M(0, 2));
}
