#pragma once

#include <complex>
#include <vector>

namespace zs {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Gauss-Legendre rule on [-1, 1]. Rules are computed once and cached.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

/// Polynomials are stored with coefficients in descending powers.
using RealPoly = std::vector<double>;
using CplxPoly = std::vector<cplx>;

cplx polyval(const RealPoly& p, cplx z);
cplx polyval(const CplxPoly& p, cplx z);
RealPoly polymul(const RealPoly& a, const RealPoly& b);
CplxPoly polymul(const CplxPoly& a, const CplxPoly& b);
RealPoly polyder(const RealPoly& p);
CplxPoly polyder(const CplxPoly& p);

/// Real polynomial with roots b and conj(b): z^2 - 2 Re(b) z + |b|^2.
RealPoly conjugate_pair_poly(cplx b);

/// All complex roots via companion-matrix eigenvalues, each polished by Newton.
std::vector<cplx> poly_roots(const RealPoly& p);
std::vector<cplx> poly_roots(const CplxPoly& p);

}  // namespace zs

namespace zs {

/// Adaptive Gauss-Legendre on [a, b]: a panel is accepted when the 10- and
/// 20-point rules agree to tol (or to rounding level), otherwise it is bisected.
/// The error estimate is the sum of accepted-panel disagreements.
template <class F>
cplx adaptive_gl(F&& f, double a, double b, double tol, double* err = nullptr, int depth = 0) {
  const GaussRule& g10 = gauss_legendre(10);
  const GaussRule& g20 = gauss_legendre(20);
  const double m = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx s10 = 0.0, s20 = 0.0;
  double mag = 0.0;
  for (int i = 0; i < 10; ++i) s10 += g10.w[i] * f(m + h * g10.x[i]);
  for (int i = 0; i < 20; ++i) {
    const cplx v = f(m + h * g20.x[i]);
    s20 += g20.w[i] * v;
    mag += g20.w[i] * std::abs(v);
  }
  s10 *= h;
  s20 *= h;
  const double e = std::abs(s20 - s10);
  if (e <= tol || e <= 1e-14 * std::abs(h) * mag || depth >= 30) {
    if (err) *err += e;
    return s20;
  }
  return adaptive_gl(f, a, m, 0.5 * tol, err, depth + 1) + adaptive_gl(f, m, b, 0.5 * tol, err, depth + 1);
}

}  // namespace zs
