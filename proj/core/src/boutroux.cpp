#include "zsspec/boutroux.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "zsspec/errors.hpp"

namespace zs {

namespace {

// Factor of the main-sheet root belonging to branch point b: a square root of
// (z-b)(z-conj b) whose cut is the vertical segment [b, conj b]. The offset
// dz = z - b is passed separately so that points very close to b keep their
// relative accuracy.
inline cplx vertical_root_at(cplx b, cplx dz) {
  const cplx w = cplx(0.0, b.imag()) + dz;  // z - Re b
  if (w == 0.0) return cplx(0.0, b.imag());
  const cplx t = (dz / w) * ((dz + cplx(0.0, 2.0 * b.imag())) / w);
  return w * std::sqrt(t);
}

inline cplx vertical_root(cplx z, cplx b) { return vertical_root_at(b, z - b); }

// Half-open side test used for cut crossings: x == c counts as the right side.
inline int side_of(double x, double c) { return x >= c ? 1 : -1; }

RealPoly divide_pair(const RealPoly& p, cplx a) {
  // synthetic division by z^2 - 2 Re(a) z + |a|^2, remainder dropped
  const double s = 2.0 * a.real(), q = std::norm(a);
  const std::size_t n = p.size() - 1;
  if (n < 2) fail(ErrorCode::InvalidInput, "division of a polynomial of degree < 2");
  RealPoly out(n - 1, 0.0);
  RealPoly r = p;
  for (std::size_t i = 0; i + 2 <= n; ++i) {
    const double c = r[i];
    out[i] = c;
    r[i + 1] += s * c;
    r[i + 2] -= q * c;
  }
  return out;
}

double real_gap(cplx b, const std::vector<cplx>& B, double scale) {
  double gap = INFINITY;
  for (const cplx& o : B) {
    const double d = std::abs(o.real() - b.real());
    if (d > 1e-12 * scale) gap = std::min(gap, d);
  }
  return gap;
}

// Nearest branch point on the same vertical line strictly above b (distance).
double gap_above(cplx b, const std::vector<cplx>& B, double scale) {
  double g = INFINITY;
  for (const cplx& o : B)
    if (std::abs(o.real() - b.real()) <= 1e-12 * scale && o.imag() > b.imag() + 1e-12 * scale)
      g = std::min(g, o.imag() - b.imag());
  return g;
}

double scale_of(const std::vector<cplx>& B) {
  double s = 0.0;
  for (const cplx& a : B)
    for (const cplx& b : B) s = std::max({s, std::abs(a - b), std::abs(a - std::conj(b))});
  return s > 0.0 ? s : 1.0;
}

using Vec = Eigen::VectorXcd;

template <class F>
Vec adaptive_vec(F&& f, double a, double b, double tol, int n, int depth = 0) {
  const GaussRule& g10 = gauss_legendre(10);
  const GaussRule& g20 = gauss_legendre(20);
  const double m = 0.5 * (a + b), h = 0.5 * (b - a);
  Vec s10 = Vec::Zero(n), s20 = Vec::Zero(n);
  Eigen::VectorXd mag = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < 10; ++i) s10 += g10.w[i] * f(m + h * g10.x[i]);
  for (int i = 0; i < 20; ++i) {
    const Vec v = f(m + h * g20.x[i]);
    s20 += g20.w[i] * v;
    mag += g20.w[i] * v.cwiseAbs();
  }
  s10 *= h;
  s20 *= h;
  const Eigen::VectorXd e = (s20 - s10).cwiseAbs();
  bool ok = true;
  for (int k = 0; k < n; ++k) ok = ok && (e[k] <= tol || e[k] <= 1e-14 * h * mag[k]);
  if (ok || depth >= 30) return s20;
  return adaptive_vec(f, a, m, 0.5 * tol, n, depth + 1) + adaptive_vec(f, m, b, 0.5 * tol, n, depth + 1);
}

// Integrals of z^k / prod s_b(z), k = 0..L, from a real point to b (see
// endpoint_integral for the path).
Vec monomial_endpoint_integrals(cplx b, const std::vector<cplx>& B) {
  const int L = static_cast<int>(B.size());
  const double S = scale_of(B);
  // step sideways toward the larger free gap, by half of it
  double gl = INFINITY, gr = INFINITY;
  for (const cplx& o : B) {
    const double d = o.real() - b.real();
    if (d > 1e-12 * S) gr = std::min(gr, d);
    if (d < -1e-12 * S) gl = std::min(gl, -d);
  }
  const double sgn = gr >= gl ? 1.0 : -1.0;
  const double delta = 0.5 * std::min(std::max(gl, gr) == INFINITY ? S : std::max(gl, gr), S);

  // z is represented by its offset from b
  auto integrand = [&](cplx dz) {
    cplx den = vertical_root_at(b, dz);
    for (const cplx& o : B)
      if (o != b) den *= vertical_root_at(o, (b - o) + dz);
    const cplx z = b + dz;
    Vec v(L + 1);
    cplx zk = 1.0 / den;
    for (int k = 0; k <= L; ++k) {
      v[k] = zk;
      zk *= z;
    }
    return v;
  };
  const cplx z1 = b + sgn * delta;
  const double beta = b.imag();
  const double tol = 1e-16 * std::pow(std::max(1.0, S), L);
  // vertical leg x0 -> z1
  Vec vert = adaptive_vec(
      [&](double t) -> Vec { return integrand(cplx(sgn * delta, beta * (t - 1.0))) * cplx(0.0, beta); }, 0.0, 1.0, tol, L + 1);
  // horizontal leg z1 -> b with z = b + (z1 - b) u^2, u from 1 to 0
  Vec horiz = adaptive_vec(
      [&](double u) -> Vec {
        if (u <= 0.0) return Vec::Zero(L + 1);
        return integrand((z1 - b) * (u * u)) * (-2.0 * u * (z1 - b));
      },
      0.0, 1.0, tol, L + 1);
  return vert + horiz;
}

}  // namespace

// ---------------------------------------------------------------------------

QuadraticDifferential QuadraticDifferential::from_factors(const AnchorSet& E, RealPoly P_L,
                                                          std::vector<cplx> odd_zeros) {
  QuadraticDifferential q;
  q.E_ = E;
  q.PL_ = std::move(P_L);
  q.odd_ = std::move(odd_zeros);
  q.B_ = E.points();
  q.B_.insert(q.B_.end(), q.odd_.begin(), q.odd_.end());
  if (q.PL_.size() != q.B_.size() + 1)
    fail(ErrorCode::InvalidInput, "half numerator degree does not match branch point count");
  RealPoly P = polymul(q.PL_, q.PL_);
  for (const cplx& a : q.odd_) P = divide_pair(P, a);
  P[0] = 1.0;
  q.P_ = std::move(P);
  q.finish();
  return q;
}

QuadraticDifferential QuadraticDifferential::from_coeffs(const AnchorSet& E, const std::vector<double>& c,
                                                         double cluster_tol) {
  const std::size_t N = E.size();
  if (c.size() != 2 * N) fail(ErrorCode::InvalidInput, "expected 2N numerator coefficients");
  RealPoly P(2 * N + 1);
  P[0] = 1.0;
  std::copy(c.begin(), c.end(), P.begin() + 1);
  const double S = E.diameter();
  const double tol = cluster_tol * S;

  // cluster the roots that lie in the closed upper half-plane
  std::vector<cplx> roots = poly_roots(P);
  struct Cluster {
    cplx z;
    int mult;
  };
  std::vector<Cluster> upper, real;
  for (const cplx& r : roots) {
    if (r.imag() < -tol) continue;
    auto& bucket = std::abs(r.imag()) <= tol ? real : upper;
    bool merged = false;
    for (auto& cl : bucket)
      if (std::abs(cl.z - r) <= std::sqrt(tol * S)) {  // multiple roots split like tol^(1/m)
        cl.z = (cl.z * double(cl.mult) + r) / double(cl.mult + 1);
        ++cl.mult;
        merged = true;
        break;
      }
    if (!merged) bucket.push_back({r, 1});
  }
  // a root of multiplicity m is a simple root of P^(m-1); polish it there
  auto polish = [&](Cluster& cl) {
    if (cl.mult < 2) return;
    RealPoly d = P;
    for (int k = 1; k < cl.mult; ++k) d = polyder(d);
    const RealPoly dd = polyder(d);
    for (int it = 0; it < 8; ++it) {
      const cplx den = polyval(dd, cl.z);
      if (den == cplx(0.0)) break;
      const cplx step = polyval(d, cl.z) / den;
      if (!(std::abs(step) < tol + 1e-3 * S)) break;
      cl.z -= step;
      if (std::abs(step) <= 1e-16 * S) break;
    }
  };
  for (auto& cl : upper) polish(cl);
  for (auto& cl : real) {
    polish(cl);
    cl.z = cl.z.real();
  }

  QuadraticDifferential q;
  q.E_ = E;
  q.P_ = P;
  RealPoly PL{1.0};
  std::vector<int> anchor_hits(N, 0);
  for (auto& cl : upper) {
    int n = cl.mult;
    for (std::size_t j = 0; j < N; ++j)
      if (std::abs(cl.z - E[j]) <= 1e-5 * S) {
        anchor_hits[j] = cl.mult;
        cl.z = E[j];
        n -= 1;
      }
    const RealPoly pair = conjugate_pair_poly(cl.z);
    const int e = (n % 2 != 0) ? (n + 1) / 2 : n / 2;
    for (int k = 0; k < e; ++k) PL = polymul(PL, pair);
    const bool is_anchor = std::any_of(E.begin(), E.end(), [&](cplx a) { return a == cl.z; });
    if (n % 2 != 0 && !is_anchor) q.odd_.push_back(cl.z);
  }
  for (const auto& cl : real) {
    if (cl.mult % 2 != 0) fail(ErrorCode::InvalidInput, "real zero of odd multiplicity");
    for (int k = 0; k < cl.mult / 2; ++k) PL = polymul(PL, RealPoly{1.0, -cl.z.real()});
  }
  for (std::size_t j = 0; j < N; ++j) {
    if (anchor_hits[j] == 0) {
      q.B_.push_back(E[j]);
    } else {
      q.cancelled_.push_back(static_cast<int>(j));
      if ((anchor_hits[j] - 1) % 2 != 0) q.B_.push_back(E[j]);
    }
  }
  q.B_.insert(q.B_.end(), q.odd_.begin(), q.odd_.end());
  if (PL.size() != q.B_.size() + 1)
    fail(ErrorCode::DegenerateSurface, "could not factor the numerator consistently");
  q.PL_ = PL;
  q.degenerate = !q.cancelled_.empty();
  q.finish();
  return q;
}

void QuadraticDifferential::finish() {
  D_ = E_.denominator();
  const double S = E_.diameter();
  zeros_.clear();
  // zeros of Q in the closed upper half-plane: roots of P_L (each doubled)
  // with the odd zeros counted once
  std::vector<cplx> r = poly_roots(PL_);
  std::vector<std::pair<cplx, int>> z;
  for (const cplx& x : r) {
    if (x.imag() < -1e-9 * S) continue;
    cplx y = std::abs(x.imag()) <= 1e-9 * S ? cplx(x.real(), 0.0) : x;
    bool merged = false;
    for (auto& p : z)
      if (std::abs(p.first - y) <= 1e-7 * S) {
        p.second += 2;
        merged = true;
        break;
      }
    if (!merged) z.push_back({y, 2});
  }
  for (const cplx& a : odd_)
    for (auto& p : z)
      if (std::abs(p.first - a) <= 1e-6 * S) {
        p.first = a;
        p.second -= 1;
        break;
      }
  // real roots of P_L come with conj partner already: each real root of P_L
  // is a double zero of Q; roots in the upper half-plane likewise.
  for (auto& p : z) {
    bool at_anchor = false;
    for (const cplx& e : E_)
      if (std::abs(p.first - e) <= 1e-5 * S) at_anchor = true;
    if (at_anchor) {
      degenerate = true;
      continue;
    }
    zeros_.push_back(p);
  }
}

std::vector<double> QuadraticDifferential::coeffs() const { return std::vector<double>(P_.begin() + 1, P_.end()); }

cplx QuadraticDifferential::Q(cplx z) const { return polyval(P_, z) / polyval(D_, z); }

cplx QuadraticDifferential::dQ(cplx z) const {
  const cplx p = polyval(P_, z), d = polyval(D_, z);
  return (polyval(polyder(P_), z) * d - p * polyval(polyder(D_), z)) / (d * d);
}

cplx QuadraticDifferential::sqrt_main(cplx z) const {
  cplx den = 1.0;
  for (const cplx& b : B_) den *= vertical_root(z, b);
  return polyval(PL_, z) / den;
}

cplx QuadraticDifferential::sqrt_offset(cplx base, cplx dz) const {
  // P_L(base + dz) from its Taylor coefficients at base
  std::vector<cplx> a(PL_.begin(), PL_.end());
  cplx num = 0.0, pw = 1.0;
  while (!a.empty()) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      acc = acc * base + a[i];
      if (i + 1 < a.size()) a[i] = acc;
    }
    a.pop_back();
    num += acc * pw;
    pw *= dz;
  }
  cplx den = 1.0;
  for (const cplx& b : B_) den *= vertical_root_at(b, (base - b) + dz);
  return num / den;
}

// ---------------------------------------------------------------------------

cplx eval_Q(const QuadraticDifferential& qd, cplx z) {
  const double d = qd.delta_branch();
  for (const cplx& e : qd.anchors())
    if (std::abs(z - e) < d || std::abs(z - std::conj(e)) < d)
      fail(ErrorCode::PoleEvaluation, "evaluation at a pole of Q");
  return qd.Q(z);
}

namespace {

// Cut crossings of the open segment z0 -> z1, as parameters in (0,1] with the
// number of sign flips at each one.
std::vector<double> cut_crossings(const QuadraticDifferential& qd, cplx z0, cplx z1) {
  std::vector<double> ts;
  for (const cplx& b : qd.branch_points()) {
    const double c = b.real();
    if (side_of(z0.real(), c) == side_of(z1.real(), c)) continue;
    const double t = (c - z0.real()) / (z1.real() - z0.real());
    const double y = z0.imag() + t * (z1.imag() - z0.imag());
    if (std::abs(y) < b.imag()) ts.push_back(std::clamp(t, 0.0, 1.0));
  }
  std::sort(ts.begin(), ts.end());
  return ts;
}

void check_clearance(const QuadraticDifferential& qd, cplx z0, cplx z1) {
  const double d = qd.delta_branch();
  for (const cplx& b : qd.branch_points())
    if (segment_distance(b, z0, z1) < d || segment_distance(std::conj(b), z0, z1) < d)
      fail(ErrorCode::BranchJump, "path passes within delta_branch of a branch point");
}

}  // namespace

std::vector<cplx> sqrtQ_along(const QuadraticDifferential& qd, const std::vector<cplx>& path, cplx initial_branch) {
  std::vector<cplx> out;
  if (path.empty()) return out;
  const cplx w0 = qd.sqrt_main(path[0]);
  if (std::abs(initial_branch * initial_branch - qd.Q(path[0])) > 1e-8 * std::max(1.0, std::norm(w0)))
    fail(ErrorCode::InvalidInput, "initial branch does not square to Q at the path start");
  double sigma = std::abs(initial_branch - w0) <= std::abs(initial_branch + w0) ? 1.0 : -1.0;
  out.push_back(sigma * w0);
  for (std::size_t k = 1; k < path.size(); ++k) {
    check_clearance(qd, path[k - 1], path[k]);
    if (cut_crossings(qd, path[k - 1], path[k]).size() % 2 == 1) sigma = -sigma;
    out.push_back(sigma * qd.sqrt_main(path[k]));
  }
  return out;
}

cplx loop_integral(const QuadraticDifferential& qd, const Loop& loop, double* err) {
  const auto& p = loop.path;
  if (p.size() < 2) return 0.0;
  const cplx w0 = qd.sqrt_main(p[0]);
  double sigma = std::abs(loop.initial_branch - w0) <= std::abs(loop.initial_branch + w0) ? 1.0 : -1.0;
  const double tol = 1e-15 * std::max(1.0, qd.anchors().diameter());
  cplx total = 0.0;
  double e = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    const cplx z0 = p[k - 1], z1 = p[k];
    if (z0 == z1) continue;
    check_clearance(qd, z0, z1);
    const std::vector<double> ts = cut_crossings(qd, z0, z1);
    double t0 = 0.0;
    for (std::size_t i = 0; i <= ts.size(); ++i) {
      const double t1 = i < ts.size() ? ts[i] : 1.0;
      if (t1 > t0) {
        const double s = sigma;
        total += adaptive_gl(
            [&](double t) { return s * qd.sqrt_main(z0 + t * (z1 - z0)) * (z1 - z0); }, t0, t1, tol, &e);
      }
      if (i < ts.size()) sigma = -sigma;
      t0 = t1;
    }
  }
  if (err) *err += e;
  return total;
}

double PeriodVector::max_abs_imag(bool include_b) const {
  double m = 0.0;
  for (const cplx& v : values) m = std::max(m, std::abs(v.imag()));
  if (include_b)
    for (const cplx& v : b_values) m = std::max(m, std::abs(v.imag()));
  return m;
}

PeriodVector periods(const QuadraticDifferential& qd, const CycleBasis& basis) {
  PeriodVector pv;
  for (const Loop& l : basis.loops) pv.values.push_back(loop_integral(qd, l, &pv.quad_error));
  for (const Loop& l : basis.b_loops) pv.b_values.push_back(loop_integral(qd, l, &pv.quad_error));
  if (!(pv.quad_error < 1e-9)) fail(ErrorCode::QuadratureFailure, "period quadrature did not converge");
  return pv;
}

namespace {

std::vector<cplx> tube_around(const std::vector<cplx>& path, double r, int cap_pts = 16) {
  const std::size_t n = path.size();
  std::vector<cplx> dir(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) dir[k] = (path[k + 1] - path[k]) / std::abs(path[k + 1] - path[k]);
  auto normal = [&](std::size_t k) { return cplx(0.0, -1.0) * dir[k]; };  // right-hand normal
  auto offset = [&](std::size_t k, double sgn) {
    if (k == 0) return path[0] + sgn * r * normal(0);
    if (k == n - 1) return path[n - 1] + sgn * r * normal(n - 2);
    const cplx m = normal(k - 1) + normal(k);
    return path[k] + sgn * 2.0 * r * m / std::norm(m);
  };
  std::vector<cplx> loop;
  for (std::size_t k = 0; k < n; ++k) loop.push_back(offset(k, 1.0));
  // cap around the far end, from the right side to the left side
  const cplx dn = dir[n - 2], nn = normal(n - 2);
  for (int i = 1; i < cap_pts; ++i) {
    const double phi = kPi * i / cap_pts;
    loop.push_back(path[n - 1] + r * (nn * std::cos(phi) + dn * std::sin(phi)));
  }
  for (std::size_t k = n; k-- > 0;) loop.push_back(offset(k, -1.0));
  const cplx d0 = dir[0], n0 = normal(0);
  for (int i = 1; i < cap_pts; ++i) {
    const double phi = kPi * i / cap_pts;
    loop.push_back(path[0] + r * (-n0 * std::cos(phi) - d0 * std::sin(phi)));
  }
  loop.push_back(loop.front());
  return loop;
}

}  // namespace

CycleBasis build_cycle_basis(const QuadraticDifferential& qd, int variant) {
  CycleBasis cb;
  const auto& B = qd.branch_points();
  cb.genus = qd.genus();
  if (B.size() < 2) return cb;
  const double S = qd.anchors().diameter();
  const double wf = variant == 0 ? 0.5 : 0.3;
  const double mf = variant == 0 ? 0.5 : 0.25;
  double min_im = INFINITY;
  for (const cplx& b : B) min_im = std::min(min_im, b.imag());

  for (std::size_t i = 0; i + 1 < B.size(); ++i) {
    const cplx b = B[i];
    const double gap = real_gap(b, B, S);
    const double w = wf * std::min(std::isfinite(gap) ? gap : S, S);
    const double above = gap_above(b, B, S);
    const double m = mf * std::min({std::isfinite(above) ? above : S, w, b.imag()});
    const double c = b.real(), top = b.imag() + m;
    Loop l;
    l.path = {cplx(c + w, 0.0), cplx(c + w, top), cplx(c - w, top), cplx(c - w, -top), cplx(c + w, -top),
              cplx(c + w, 0.0)};
    l.initial_branch = qd.sqrt_main(l.path[0]);
    cb.loops.push_back(std::move(l));
  }

  // tubes around staircase paths joining consecutive branch points
  double H = 0.0;
  for (const cplx& b : B) H = std::max(H, b.imag());
  H += (variant == 0 ? 0.5 : 0.8) * S;
  for (std::size_t i = 0; i + 1 < B.size(); ++i) {
    const cplx bi = B[i], bj = B[i + 1];
    auto side_step = [&](cplx b) {
      const double g = real_gap(b, B, S);
      return 0.5 * std::min(std::isfinite(g) ? g : S, S) * (variant == 0 ? 1.0 : 0.6);
    };
    const double si = side_step(bi), sj = side_step(bj);
    std::vector<cplx> path = {bi, bi + si, cplx(bi.real() + si, H), cplx(bj.real() - sj, H), bj - sj, bj};
    if (std::abs(bj.real() - sj - (bi.real() + si)) < 1e-9 * S) {
      path = {bi, bi + si, cplx(bi.real() + si, H), cplx(bj.real() + sj, H), bj + sj, bj};
    }
    // drop zero-length legs
    std::vector<cplx> clean{path[0]};
    for (std::size_t k = 1; k < path.size(); ++k)
      if (std::abs(path[k] - clean.back()) > 1e-12 * S) clean.push_back(path[k]);
    double clear = INFINITY;
    for (const cplx& o : B) {
      if (o == bi || o == bj) continue;
      for (std::size_t k = 1; k < clean.size(); ++k) clear = std::min(clear, segment_distance(o, clean[k - 1], clean[k]));
    }
    double r = std::min({0.4 * clear, 0.5 * si, 0.5 * sj, 0.5 * min_im, 0.1 * S});
    if (variant != 0) r *= 0.6;
    Loop l;
    l.path = tube_around(clean, r);
    l.initial_branch = qd.sqrt_main(l.path[0]);
    cb.b_loops.push_back(std::move(l));
  }
  return cb;
}

cplx endpoint_integral(const QuadraticDifferential& qd, cplx b, const std::vector<cplx>& B_all, double* err) {
  (void)err;
  const Vec m = monomial_endpoint_integrals(b, B_all);
  const RealPoly& PL = qd.half_numerator();
  const int L = static_cast<int>(PL.size()) - 1;
  cplx s = 0.0;
  for (int k = 0; k <= L; ++k) s += PL[L - k] * m[k];
  return s;
}

RealPoly boutroux_half_numerator(const std::vector<cplx>& B_in) {
  const int L = static_cast<int>(B_in.size());
  if (L == 0) return {1.0};
  // work in normalized coordinates w = (z - c0)/S
  double c0 = 0.0;
  for (const cplx& b : B_in) c0 += b.real();
  c0 /= L;
  const double S = scale_of(B_in);
  std::vector<cplx> B(L);
  for (int i = 0; i < L; ++i) B[i] = (B_in[i] - c0) / S;

  double p1 = 0.0;
  for (const cplx& b : B) p1 -= b.real();
  RealPoly p(L + 1, 0.0);
  p[0] = 1.0;
  p[1] = p1;
  if (L >= 2) {
    Eigen::MatrixXd A(L, L - 1);
    Eigen::VectorXd rhs(L);
    for (int i = 0; i < L; ++i) {
      const Vec J = monomial_endpoint_integrals(B[i], B);  // J[k] ~ z^k
      for (int m = 2; m <= L; ++m) A(i, m - 2) = J[L - m].imag();
      rhs[i] = -(J[L] + p1 * J[L - 1]).imag();
    }
    Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(rhs);
    for (int m = 2; m <= L; ++m) p[m] = sol[m - 2];
  }
  // back to z: P_L(z) = S^L p((z - c0)/S)
  RealPoly out{0.0};
  RealPoly lin{1.0 / S, -c0 / S};
  RealPoly powk{1.0};
  std::vector<RealPoly> pows(L + 1);
  pows[0] = {1.0};
  for (int k = 1; k <= L; ++k) pows[k] = polymul(pows[k - 1], lin);
  out.assign(L + 1, 0.0);
  for (int k = 0; k <= L; ++k) {
    const double coef = p[L - k];  // coefficient of w^k
    const RealPoly& pw = pows[k];  // degree k, descending
    for (int i = 0; i <= k; ++i) out[L - k + i] += coef * pw[i];
  }
  const double sL = std::pow(S, L);
  for (double& v : out) v *= sL;
  out[0] = 1.0;
  return out;
}

namespace {

void check_degeneracy(QuadraticDifferential& qd, const BoutrouxOptions& opt) {
  const double S = qd.anchors().diameter();
  for (const cplx& r : poly_roots(qd.numerator()))
    for (const cplx& e : qd.anchors())
      if (std::abs(r - e) < opt.degenerate_tol * S) qd.degenerate = true;
}

void certify(QuadraticDifferential& qd, const BoutrouxOptions& opt, BoutrouxReport* rep) {
  check_degeneracy(qd, opt);
  const CycleBasis b0 = build_cycle_basis(qd, 0);
  const CycleBasis b1 = build_cycle_basis(qd, 1);
  const PeriodVector p0 = periods(qd, b0);
  const PeriodVector p1 = periods(qd, b1);
  double gap = 0.0;
  for (std::size_t i = 0; i < p0.values.size(); ++i) gap = std::max(gap, std::abs(p0.values[i] - p1.values[i]));
  for (std::size_t i = 0; i < p0.b_values.size(); ++i)
    gap = std::max(gap, std::abs(p0.b_values[i] - p1.b_values[i]));
  qd.boutroux_residual = p0.max_abs_imag();
  if (rep) {
    rep->residual = qd.boutroux_residual;
    rep->homologous_gap = gap;
    rep->degenerate = qd.degenerate;
  }
}

}  // namespace

QuadraticDifferential solve_boutroux(const AnchorSet& E, int target_genus, const std::vector<cplx>& seed_zeros,
                                     const BoutrouxOptions& opt, BoutrouxReport* report) {
  const int N = static_cast<int>(E.size());
  const int ell = target_genus - N + 1;
  if (ell < 0 || ell > N - 1)
    fail(ErrorCode::InvalidInput, "target genus must lie in [N-1, 2N-2]");
  if (static_cast<int>(seed_zeros.size()) != ell)
    fail(ErrorCode::InvalidInput, "seed must provide one odd zero per extra branch point");
  BoutrouxReport rep;
  const double S = E.diameter();

  std::vector<cplx> a = seed_zeros;
  auto assemble = [&](const std::vector<cplx>& zs) {
    std::vector<cplx> B = E.points();
    B.insert(B.end(), zs.begin(), zs.end());
    return B;
  };
  auto residual = [&](const std::vector<cplx>& zs) {
    const RealPoly PL = boutroux_half_numerator(assemble(zs));
    Eigen::VectorXd r(2 * ell);
    const double scale = std::pow(S, static_cast<double>(PL.size() - 1));
    for (int k = 0; k < ell; ++k) {
      const cplx v = polyval(PL, zs[k]) / scale;
      r[2 * k] = v.real();
      r[2 * k + 1] = v.imag();
    }
    return r;
  };
  auto admissible_zeros = [&](const std::vector<cplx>& zs) {
    for (std::size_t k = 0; k < zs.size(); ++k) {
      if (!(zs[k].imag() > 1e-4 * S) || std::abs(zs[k]) > 1e3 * (S + 1.0)) return false;
      for (const cplx& e : E)
        if (std::abs(zs[k] - e) < 1e-4 * S) return false;
      for (std::size_t j = 0; j < k; ++j)
        if (std::abs(zs[k] - zs[j]) < 1e-4 * S) return false;
    }
    return true;
  };

  if (ell > 0) {
    if (!admissible_zeros(a)) fail(ErrorCode::InvalidInput, "seed zeros must lie in the upper half-plane");
    Eigen::VectorXd r = residual(a);
    int it = 0;
    for (; it < opt.max_iter; ++it) {
      if (r.norm() < 1e-15) break;
      Eigen::MatrixXd J(2 * ell, 2 * ell);
      const double h = opt.fd_step * S;
      for (int k = 0; k < ell; ++k)
        for (int part = 0; part < 2; ++part) {
          std::vector<cplx> ap = a;
          ap[k] += part == 0 ? cplx(h, 0.0) : cplx(0.0, h);
          J.col(2 * k + part) = (residual(ap) - r) / h;
        }
      Eigen::VectorXd step = J.colPivHouseholderQr().solve(-r);
      if (!step.allFinite()) fail(ErrorCode::NewtonDivergence, "singular Jacobian");
      double lam = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 30; ++ls, lam *= 0.5) {
        std::vector<cplx> an = a;
        for (int k = 0; k < ell; ++k) an[k] += lam * cplx(step[2 * k], step[2 * k + 1]);
        if (!admissible_zeros(an)) continue;
        Eigen::VectorXd rn = residual(an);
        if (rn.squaredNorm() <= (1.0 - 1e-4 * lam) * r.squaredNorm()) {
          a = an;
          r = rn;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (r.norm() < 1e-11) break;
        fail(ErrorCode::NewtonDivergence, "line search failed to reduce the residual");
      }
      if (lam * step.norm() < 1e-15 * S) {
        ++it;
        break;
      }
    }
    rep.iterations = it;
    if (r.norm() > 1e-9) {
      std::ostringstream os;
      os << "odd-zero residual " << r.norm() << " after " << it << " iterations";
      fail(ErrorCode::NewtonDivergence, os.str());
    }
  }
  QuadraticDifferential qd = QuadraticDifferential::from_factors(E, boutroux_half_numerator(assemble(a)), a);
  certify(qd, opt, &rep);
  if (report) *report = rep;
  if (!(qd.boutroux_residual < opt.tol)) {
    std::ostringstream os;
    os << "Boutroux residual " << qd.boutroux_residual << " above tolerance " << opt.tol;
    fail(ErrorCode::NewtonDivergence, os.str());
  }
  return qd;
}

QuadraticDifferential solve_boutroux(const AnchorSet& E, const QuadraticDifferential& seed, int target_genus,
                                     const BoutrouxOptions& opt, BoutrouxReport* report) {
  double s = 0.0;
  for (const cplx& e : E) s += e.real();
  const std::vector<double> c = seed.coeffs();
  if (!c.empty() && std::abs(c[0] + 2.0 * s) > 1e-9 * std::max(1.0, std::abs(s)))
    fail(ErrorCode::InvalidInput, "seed violates the residue-free condition on c_1");
  return solve_boutroux(E, target_genus, seed.odd_zeros(), opt, report);
}

std::vector<QuadraticDifferential> find_boutroux_family(const AnchorSet& E, int ell,
                                                        const std::vector<std::vector<cplx>>& seeds,
                                                        const BoutrouxOptions& opt) {
  std::vector<QuadraticDifferential> out;
  const int g = static_cast<int>(E.size()) - 1 + ell;
  const double S = E.diameter();
  for (const auto& s : seeds) {
    try {
      QuadraticDifferential q = solve_boutroux(E, g, s, opt);
      bool dup = false;
      for (const auto& o : out) {
        double d = 0.0;
        for (std::size_t i = 0; i < o.numerator().size(); ++i)
          d = std::max(d, std::abs(o.numerator()[i] - q.numerator()[i]));
        if (d < 1e-7 * std::pow(std::max(1.0, S), 2.0 * E.size())) dup = true;
      }
      if (!dup) out.push_back(std::move(q));
    } catch (const Error&) {
    }
  }
  return out;
}

double residue_intensity(const QuadraticDifferential& qd, int M) {
  double R = 1.0;
  for (const cplx& b : qd.branch_points()) R = std::max(R, std::abs(b));
  for (const auto& z : qd.zeros()) R = std::max(R, std::abs(z.first));
  R *= 4.0;
  cplx s = 0.0;
  for (int k = 0; k < M; ++k) {
    const cplx z = std::polar(R, 2.0 * kPi * (k + 0.5) / M);
    s += z * z * qd.sqrt_main(z);
  }
  // the mean of z^2 sqrt(Q) also picks up the constant term z^2 * 1, which the
  // trapezoid rule annihilates exactly for M > 2; the real part carries I
  const cplx I = -s / static_cast<double>(M);
  if (!(std::abs(I.imag()) < 1e-8 * std::max(1.0, std::abs(I.real()))))
    fail(ErrorCode::QuadratureFailure, "residue intensity has a spurious imaginary part");
  return I.real();
}

double coefficient_intensity(const QuadraticDifferential& qd) {
  return 0.5 * (qd.denominator()[2] - qd.numerator()[2]);
}

}  // namespace zs
