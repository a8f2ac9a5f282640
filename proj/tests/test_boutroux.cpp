#include <random>

#include "doctest.h"
#include "support.hpp"
#include "zsspec/boutroux.hpp"
#include "zsspec/errors.hpp"

using namespace testing;

namespace {

// mpmath oracles: direct quadrature of the Boutroux condition along a path
// from the real axis to an anchor, then root finding in the free coefficient.
constexpr double kPairIntensity = 0.913893162088927250753;     // E = {-1+i, 1+i}
constexpr double kTripleIntensity = 0.712489993618535713651;   // E = {-0.3+i, 0.3+i, 0.4i}, no odd zeros

const zs::AnchorSet kPair = anchors({{-1.0, 1.0}, {1.0, 1.0}});
const zs::AnchorSet kAsym = anchors({{-1.0, 1.0}, {0.5, 1.7}, {1.3, 0.6}});

}  // namespace

TEST_CASE("eval_Q closed form for E = {i}") {
  const auto qd = zs::QuadraticDifferential::from_coeffs(anchors({{0.0, 1.0}}), {0.0, 0.0});
  CHECK(std::abs(zs::eval_Q(qd, 1.0) - 0.5) < 1e-15);
  CHECK(std::abs(zs::eval_Q(qd, cplx(0, 2)) - 4.0 / 3.0) < 1e-15);
  CHECK(std::abs(zs::eval_Q(qd, 0.0)) < 1e-15);
  CHECK_THROWS_AS(zs::eval_Q(qd, cplx(0, 1)), zs::Error);
}

TEST_CASE("sqrtQ continuation and monodromy") {
  const auto qd = zs::QuadraticDifferential::from_coeffs(anchors({{0.0, 1.0}}), {0.0, 0.0});
  std::vector<cplx> path;
  for (int k = 0; k <= 50; ++k) path.emplace_back(1.0 + k / 50.0, 0.0);
  const auto v = zs::sqrtQ_along(qd, path, 1.0 / std::sqrt(2.0));
  CHECK(std::abs(v.back() - 2.0 / std::sqrt(5.0)) < 1e-14);

  auto circle = [](cplx c, double r) {
    std::vector<cplx> p;
    for (int k = 0; k <= 400; ++k) p.push_back(c + r * std::exp(cplx(0, 2 * zs::kPi * k / 400.0)));
    return p;
  };
  const auto far = circle({5.0, 0.0}, 1.0);
  const cplx w0 = qd.sqrt_main(far.front());
  CHECK(std::abs(zs::sqrtQ_along(qd, far, w0).back() - w0) < 1e-12);
  const auto small = circle({0.0, 1.0}, 0.1);
  const cplx s0 = qd.sqrt_main(small.front());
  CHECK(std::abs(zs::sqrtQ_along(qd, small, s0).back() + s0) < 1e-12);
  // both branch points inside: trivial monodromy
  const auto both = circle({0.0, 0.0}, 3.0);
  const cplx b0 = qd.sqrt_main(both.front());
  CHECK(std::abs(zs::sqrtQ_along(qd, both, b0).back() - b0) < 1e-12);
}

TEST_CASE("closed-form single anchor and its covariance") {
  for (const auto& [e, P1, I] : std::vector<std::tuple<cplx, double, double>>{
           {{0.0, 1.0}, 0.0, 0.5}, {{1.0, 2.0}, -2.0, 2.0}, {{0.0, 3.0}, 0.0, 4.5}}) {
    zs::BoutrouxReport rep;
    const auto qd = zs::solve_boutroux(anchors({e}), 0, {}, {}, &rep);
    const auto c = qd.coeffs();
    CHECK(std::abs(c[0] - P1) < 1e-9);            // P = (z - Re e)^2
    CHECK(std::abs(c[1] - P1 * P1 / 4.0) < 1e-9);
    CHECK(zs::residue_intensity(qd) == doctest::Approx(I).epsilon(1e-9));
    CHECK(zs::coefficient_intensity(qd) == doctest::Approx(I).epsilon(1e-12));
    CHECK(qd.genus() == 0);
    CHECK(zs::periods(qd, zs::build_cycle_basis(qd)).values.empty());
  }
}

TEST_CASE("pair: Boutroux residual, homologous basis and the oracle intensity") {
  zs::BoutrouxReport rep;
  const auto qd = zs::solve_boutroux(kPair, 1, {}, {}, &rep);
  CHECK(rep.residual < 1e-10);
  CHECK(rep.homologous_gap < 1e-9);
  CHECK(zs::residue_intensity(qd) == doctest::Approx(kPairIntensity).epsilon(1e-10));
  CHECK(zs::coefficient_intensity(qd) == doctest::Approx(kPairIntensity).epsilon(1e-10));
  // independent recomputation on the second loop family
  const zs::PeriodVector p0 = zs::periods(qd, zs::build_cycle_basis(qd, 0));
  const zs::PeriodVector p1 = zs::periods(qd, zs::build_cycle_basis(qd, 1));
  CHECK(p0.max_abs_imag() < 1e-10);
  REQUIRE(p0.values.size() == p1.values.size());
  for (std::size_t k = 0; k < p0.values.size(); ++k) CHECK(std::abs(p0.values[k] - p1.values[k]) < 1e-9);
}

TEST_CASE("symmetric triple without odd zeros matches the oracle") {
  const auto qd = zs::solve_boutroux(anchors({{-0.3, 1.0}, {0.3, 1.0}, {0.0, 0.4}}), 2);
  CHECK(zs::residue_intensity(qd) == doctest::Approx(kTripleIntensity).epsilon(1e-10));
}

TEST_CASE("asymmetric triple") {
  zs::BoutrouxReport rep;
  const auto qd = zs::solve_boutroux(kAsym, 2, {}, {}, &rep);
  CHECK(rep.residual < 1e-10);
  CHECK(rep.homologous_gap < 1e-9);
  CHECK(zs::residue_intensity(qd) > 0.0);
}

TEST_CASE("property: Schwarz symmetry of Q and of periods") {
  const auto qd = zs::solve_boutroux(kAsym, 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    const cplx z(U(rng), U(rng));
    CHECK(std::abs(zs::eval_Q(qd, std::conj(z)) - std::conj(zs::eval_Q(qd, z))) < 1e-12 * (1 + std::abs(zs::eval_Q(qd, z))));
  }
  const zs::CycleBasis basis = zs::build_cycle_basis(qd);
  for (const zs::Loop& l : basis.loops) {
    zs::Loop mirrored = l;
    for (cplx& z : mirrored.path) z = std::conj(z);
    mirrored.initial_branch = std::conj(l.initial_branch);
    const cplx a = zs::loop_integral(qd, l), b = zs::loop_integral(qd, mirrored);
    CHECK(std::abs(b - std::conj(a)) < 1e-9);
  }
}

TEST_CASE("property: intensity is translation invariant and scales quadratically") {
  const double I0 = zs::residue_intensity(zs::solve_boutroux(kAsym, 2));
  for (double a : {-2.5, 0.7, 4.0}) {
    const double I = zs::residue_intensity(zs::solve_boutroux(kAsym.translated(a), 2));
    CHECK(I == doctest::Approx(I0).epsilon(1e-9));
  }
  for (double lambda : {0.5, 2.0, 3.0}) {
    const double I = zs::residue_intensity(zs::solve_boutroux(kAsym.scaled(lambda), 2));
    CHECK(I == doctest::Approx(lambda * lambda * I0).epsilon(1e-9));
  }
}

TEST_CASE("serialization helpers: factored and expanded forms agree") {
  const auto qd = zs::solve_boutroux(kPair, 1);
  const auto back = zs::QuadraticDifferential::from_coeffs(kPair, qd.coeffs());
  CHECK(back.genus() == qd.genus());
  for (cplx z : {cplx(0.3, 0.2), cplx(2.0, 1.5), cplx(-1.2, 0.4)})
    CHECK(std::abs(back.sqrt_main(z) - qd.sqrt_main(z)) < 1e-10);
}
