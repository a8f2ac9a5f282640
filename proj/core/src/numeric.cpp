#include "zsspec/numeric.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

#include "zsspec/errors.hpp"

namespace zs {

namespace {

GaussRule make_gauss(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

template <class T>
std::vector<cplx> roots_impl(const std::vector<T>& p_in) {
  std::size_t lead = 0;
  while (lead < p_in.size() && std::abs(p_in[lead]) == 0.0) ++lead;
  std::vector<cplx> p(p_in.begin() + lead, p_in.end());
  if (p.size() <= 1) return {};
  const int n = static_cast<int>(p.size()) - 1;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) C(0, j) = -p[j + 1] / p[0];
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "companion eigenvalues");
  std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  CplxPoly pc(p.begin(), p.end());
  CplxPoly dpc = polyder(pc);
  for (auto& z : out) {
    cplx d = polyval(dpc, z);
    if (std::abs(d) > 0.0) {
      cplx step = polyval(pc, z) / d;
      // only accept the polish when it actually reduces the residual
      if (std::abs(polyval(pc, z - step)) < std::abs(polyval(pc, z))) z -= step;
    }
  }
  return out;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

cplx polyval(const RealPoly& p, cplx z) {
  cplx acc = 0.0;
  for (double c : p) acc = acc * z + c;
  return acc;
}

cplx polyval(const CplxPoly& p, cplx z) {
  cplx acc = 0.0;
  for (const cplx& c : p) acc = acc * z + c;
  return acc;
}

template <class C>
static std::vector<C> mul_impl(const std::vector<C>& a, const std::vector<C>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<C> r(a.size() + b.size() - 1, C(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

RealPoly polymul(const RealPoly& a, const RealPoly& b) { return mul_impl(a, b); }
CplxPoly polymul(const CplxPoly& a, const CplxPoly& b) { return mul_impl(a, b); }

template <class C>
static std::vector<C> der_impl(const std::vector<C>& p) {
  if (p.size() <= 1) return {C(0)};
  const std::size_t n = p.size() - 1;
  std::vector<C> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = p[i] * static_cast<double>(n - i);
  return d;
}

RealPoly polyder(const RealPoly& p) { return der_impl(p); }
CplxPoly polyder(const CplxPoly& p) { return der_impl(p); }

RealPoly conjugate_pair_poly(cplx b) { return {1.0, -2.0 * b.real(), std::norm(b)}; }

std::vector<cplx> poly_roots(const RealPoly& p) { return roots_impl(p); }
std::vector<cplx> poly_roots(const CplxPoly& p) { return roots_impl(p); }

}  // namespace zs
