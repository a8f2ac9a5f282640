#include "zsspec/equilibrium.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <future>
#include <numeric>
#include <thread>

#include "zsspec/errors.hpp"

namespace zs {

ExternalField::ExternalField(std::vector<double> coeffs) : t(std::move(coeffs)) {
  if (t.empty() || !(t.back() > 0.0)) fail(ErrorCode::InvalidInput, "external field needs a positive leading coefficient");
}

cplx ExternalField::value(cplx z) const {
  cplx s = 0.0;
  for (std::size_t l = t.size(); l-- > 0;) s = (s + t[l]) * z;
  return s;
}

cplx ExternalField::deriv(cplx z) const {
  cplx s = 0.0;
  for (std::size_t l = t.size(); l-- > 0;) s = s * z + static_cast<double>(l + 1) * t[l];
  return s;
}

cplx ExternalField::second(cplx z) const {
  cplx s = 0.0;
  for (std::size_t l = t.size(); l-- > 1;) s = s * z + static_cast<double>((l + 1) * l) * t[l];
  return s;
}

double EquilibriumMeasure::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double EquilibriumMeasure::intensity() const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += 2.0 * nodes[i].imag() * weights[i];
  return s;
}

int StagnationSet::total() const { return std::accumulate(multiplicities.begin(), multiplicities.end(), 0); }

namespace {

constexpr int kMaxDepth = 48;
constexpr double kMinPiece = 1e-13;  // relative to the panel length

struct Quad {
  double x, w;  // panel-local coordinate in [-1, 1], weight in tau
};

double kernel(cplx z, cplx w) { return 0.5 * std::log(std::norm(z - std::conj(w)) / std::norm(z - w)); }

// 1/c without the overflow guards of complex division
inline cplx recip(cplx c) { return std::conj(c) / std::norm(c); }

// Barycentric weights for the Gauss nodes of one panel.
std::vector<double> barycentric(const std::vector<double>& x) {
  std::vector<double> l(x.size(), 1.0);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = 0; k < x.size(); ++k)
      if (k != j) l[j] /= (x[j] - x[k]) * 2.0;  // rescaled to avoid underflow
  return l;
}

void lagrange(const std::vector<double>& x, const std::vector<double>& lam, double t, std::vector<double>& out) {
  out.assign(x.size(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j)
    if (t == x[j]) {
      out[j] = 1.0;
      return;
    }
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = lam[j] / (t - x[j]);
    s += out[j];
  }
  for (double& v : out) v /= s;
}

// Quadrature adapted to a target z near the panel: bisect until each piece is
// at least its own length away from z and from conj z. Pieces still touching
// z at the depth cap are dropped (their contribution is below 2^-48 * log).
void adapt(const ArcGeometry& g, const EquilibriumPanel& p, const GaussRule& rule, cplx z, double xa, double xb,
           int depth, std::vector<Quad>& out, bool& hit) {
  const double half = 0.5 * (p.b - p.a);
  const double xm = 0.5 * (xa + xb), hx = 0.5 * (xb - xa);
  const double tm = 0.5 * (p.a + p.b) + half * xm;
  const cplx wm = g.point(tm);
  const double size = std::abs(g.deriv(tm)) * half * (xb - xa);
  const double d2 = std::min(std::norm(z - wm), std::norm(std::conj(z) - wm));
  if (d2 > size * size) {
    for (std::size_t q = 0; q < rule.x.size(); ++q) out.push_back({xm + hx * rule.x[q], hx * rule.w[q] * half});
    return;
  }
  if (depth >= kMaxDepth || size < kMinPiece * p.size) {
    hit = true;
    return;
  }
  adapt(g, p, rule, z, xa, xm, depth + 1, out, hit);
  adapt(g, p, rule, z, xm, xb, depth + 1, out, hit);
}

bool is_far(const EquilibriumPanel& p, cplx z) {
  return std::min(std::norm(z - p.mid), std::norm(std::conj(z) - p.mid)) > p.size * p.size;
}

const std::vector<double>& barycentric_for(const GaussRule& rule) {
  static thread_local std::map<std::size_t, std::vector<double>> cache;
  auto it = cache.find(rule.x.size());
  if (it == cache.end()) it = cache.emplace(rule.x.size(), barycentric(rule.x)).first;
  return it->second;
}

// sum over the measure of kern(w), with near-field adaptivity
template <class T, class F>
T integrate(const EquilibriumMeasure& m, cplx z, F kern, bool* hit = nullptr) {
  const GaussRule& rule = gauss_legendre(m.order);
  static thread_local std::vector<Quad> quads;
  static thread_local std::vector<double> basis;
  const std::vector<double>& lam = barycentric_for(rule);
  T s{};
  bool h = false;
  for (const EquilibriumPanel& p : m.panels) {
    if (is_far(p, z)) {
      for (int q = 0; q < m.order; ++q) s += m.weights[p.first + q] * kern(m.nodes[p.first + q]);
      continue;
    }
    quads.clear();
    const ArcGeometry& g = *m.contour.arcs[p.arc];
    adapt(g, p, rule, z, -1.0, 1.0, 0, quads, h);
    for (const Quad& qd : quads) {
      lagrange(rule.x, lam, qd.x, basis);
      // mu and the panel geometry share the interpolant through the Gauss nodes
      double mu = 0.0;
      cplx w = 0.0;
      for (int j = 0; j < m.order; ++j) {
        mu += basis[j] * m.mu[p.first + j];
        w += basis[j] * m.nodes[p.first + j];
      }
      if (w == z) continue;
      s += (qd.w * mu) * kern(w);
    }
  }
  if (hit) *hit = h;
  return s;
}

bool on_real_axis(const ArcGeometry& g) {
  for (int k = 0; k <= 32; ++k)
    if (std::abs(g.point(k / 32.0).imag()) > kGlueTol) return false;
  return true;
}

template <class F>
void parallel_for(std::size_t n, F body) {
  const std::size_t T = std::max(1u, std::min(16u, std::thread::hardware_concurrency()));
  if (n < 64 || T == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t t = 0; t < T; ++t)
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t i = t; i < n; i += T) body(i);
    }));
  for (auto& j : jobs) j.get();
}

}  // namespace

EquilibriumMeasure solve_equilibrium(const Contour& K, const ExternalField& field, const EquilibriumOptions& opt) {
  if (field.t.empty() || !(field.t.back() > 0.0)) fail(ErrorCode::InvalidInput, "invalid external field");
  if (opt.order < 4 || opt.n_base < 2 || opt.n_grade < 0) fail(ErrorCode::InvalidInput, "invalid discretization");
  EquilibriumMeasure m;
  m.field = field;
  m.order = opt.order;
  for (const ArcPtr& a : K.arcs)
    if (!on_real_axis(*a)) m.contour.arcs.push_back(a);
  if (!K.arcs.empty()) m.support = K.continuum();
  if (m.contour.arcs.empty()) return m;  // arcs on the axis carry no measure

  const GaussRule& rule = gauss_legendre(opt.order);
  // Ends shared by several arcs get half the grading: the density is milder
  // there, and tightly packed nodes from different arcs ruin the conditioning.
  const double glue = kGlueTol * std::max(1.0, m.contour.diameter());
  auto junction = [&](cplx z) {
    int n = 0;
    for (const ArcPtr& b : m.contour.arcs) n += (std::abs(b->start() - z) < glue) + (std::abs(b->finish() - z) < glue);
    return n > 1;
  };
  // panels: uniform in tau with dyadic grading toward both ends
  for (std::size_t a = 0; a < m.contour.arcs.size(); ++a) {
    std::vector<double> br;
    const double h = 1.0 / opt.n_base;
    const int g0 = junction(m.contour.arcs[a]->start()) ? opt.n_grade / 2 : opt.n_grade;
    const int g1 = junction(m.contour.arcs[a]->finish()) ? opt.n_grade / 2 : opt.n_grade;
    br.push_back(0.0);
    for (int k = g0; k >= 1; --k) br.push_back(h * std::ldexp(1.0, -k));
    for (int k = 1; k < opt.n_base; ++k) br.push_back(k * h);
    for (int k = 1; k <= g1; ++k) br.push_back(1.0 - h * std::ldexp(1.0, -k));
    br.push_back(1.0);
    std::sort(br.begin(), br.end());
    const ArcGeometry& g = *m.contour.arcs[a];
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
      EquilibriumPanel p;
      p.arc = static_cast<int>(a);
      p.a = br[k];
      p.b = br[k + 1];
      p.first = static_cast<int>(m.nodes.size());
      const double half = 0.5 * (p.b - p.a);
      p.mid = g.point(0.5 * (p.a + p.b));
      p.size = std::abs(g.deriv(0.5 * (p.a + p.b))) * 2.0 * half;
      for (int q = 0; q < opt.order; ++q) {
        const double t = 0.5 * (p.a + p.b) + half * rule.x[q];
        m.nodes.push_back(g.point(t));
        m.tau.push_back(t);
        m.arc.push_back(static_cast<int>(a));
        m.weights.push_back(half * rule.w[q]);  // quadrature weight until mu is known
      }
      m.panels.push_back(p);
    }
  }

  const std::size_t n = m.nodes.size();
  const std::vector<double> lam = barycentric(rule.x);
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd rhs(n);
  parallel_for(n, [&](std::size_t i) {
    const cplx z = m.nodes[i];
    rhs(i) = field.value(z).imag();
    std::vector<Quad> quads;
    std::vector<double> basis;
    for (const EquilibriumPanel& p : m.panels) {
      if (is_far(p, z)) {
        for (int q = 0; q < opt.order; ++q) A(i, p.first + q) = m.weights[p.first + q] * kernel(z, m.nodes[p.first + q]);
        continue;
      }
      for (int q = 0; q < opt.order; ++q) A(i, p.first + q) = 0.0;
      quads.clear();
      bool hit = false;
      const ArcGeometry& g = *m.contour.arcs[p.arc];
      adapt(g, p, rule, z, -1.0, 1.0, 0, quads, hit);
      for (const Quad& qd : quads) {
        lagrange(rule.x, lam, qd.x, basis);
        cplx w = 0.0;
        for (int j = 0; j < opt.order; ++j) w += basis[j] * m.nodes[p.first + j];
        if (w == z) continue;
        const double kv = qd.w * kernel(z, w);
        for (int j = 0; j < opt.order; ++j) A(i, p.first + j) += kv * basis[j];
      }
    }
  });

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rc = lu.rcond();
  m.condition = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (m.condition > opt.cond_threshold)
    fail(ErrorCode::IllConditioned, "equilibrium system condition estimate " + std::to_string(m.condition));
  const Eigen::VectorXd mu = lu.solve(rhs);
  m.mu.assign(mu.data(), mu.data() + n);
  double mu_max = 0.0;
  for (double v : m.mu) mu_max = std::max(mu_max, std::abs(v));
  m.density.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.density[i] = m.mu[i] / std::abs(m.contour.arcs[m.arc[i]]->deriv(m.tau[i]));
    m.weights[i] *= m.mu[i];
    if (m.mu[i] < -1e-8 * mu_max) m.negative_density = true;
  }
  if (m.negative_density && field.is_default())
    fail(ErrorCode::NegativeDensity, "negative equilibrium density for the default field");

  // boundary residual halfway between consecutive nodes
  std::vector<double> res(m.panels.size(), 0.0);
  parallel_for(m.panels.size(), [&](std::size_t k) {
    const EquilibriumPanel& p = m.panels[k];
    const ArcGeometry& g = *m.contour.arcs[p.arc];
    for (int q = 0; q + 1 < opt.order; ++q) {
      const double x = 0.5 * (rule.x[q] + rule.x[q + 1]);
      const cplx z = g.point(0.5 * (p.a + p.b) + 0.5 * (p.b - p.a) * x);
      res[k] = std::max(res[k], std::abs(green_potential(m, z) - field.value(z).imag()));
    }
  });
  m.bc_residual = *std::max_element(res.begin(), res.end());
  return m;
}

EquilibriumMeasure solve_equilibrium(const PolyContinuum& K, const ExternalField& field, const EquilibriumOptions& opt) {
  Contour c;
  for (const Arc& a : K.arcs) {
    std::vector<cplx> pts = a.samples;
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 2) continue;
    c.arcs.push_back(make_spline(pts));
  }
  return solve_equilibrium(c, field, opt);
}

double green_potential(const EquilibriumMeasure& m, cplx z) {
  if (m.empty() || z.imag() == 0.0) return 0.0;
  return integrate<double>(m, z, [z](cplx w) { return kernel(z, w); });
}

QuasimomentumField::QuasimomentumField(const EquilibriumMeasure& m) : m_(&m) {}

QuasimomentumField quasimomentum(const EquilibriumMeasure& m) { return QuasimomentumField(m); }

namespace {

template <class F>
cplx off_support(const EquilibriumMeasure& m, cplx z, F kern) {
  if (m.empty()) return 0.0;
  bool hit = false;
  const cplx v = integrate<cplx>(m, z, kern, &hit);
  if (hit) fail(ErrorCode::EvaluationOnSupport, "quasimomentum evaluated on the support");
  return v;
}

}  // namespace

cplx QuasimomentumField::dg(cplx z) const {
  return off_support(*m_, z, [z](cplx w) { return kI * (recip(z - std::conj(w)) - recip(z - w)); });
}

cplx QuasimomentumField::P(cplx z) const {
  const cplx g = off_support(*m_, z, [z](cplx w) { return kI * std::log((z - std::conj(w)) / (z - w)); });
  return m_->field.value(z) - g;
}

cplx QuasimomentumField::dP(cplx z) const { return m_->field.deriv(z) - dg(z); }

cplx QuasimomentumField::d2P(cplx z) const {
  const cplx g2 = off_support(*m_, z, [z](cplx w) {
    const cplx a = z - std::conj(w), b = z - w;
    return kI * (recip(b * b) - recip(a * a));
  });
  return m_->field.second(z) - g2;
}

double QuasimomentumField::H(cplx z) const {
  const cplx g = off_support(*m_, z, [z](cplx w) { return kI * std::log((z - std::conj(w)) / (z - w)); });
  return g.real();
}

// ---------------------------------------------------------------------------

namespace {

struct Extent {
  double xmin, xmax, ymax, diam;
  double center() const { return 0.5 * (xmin + xmax); }
};

Extent extent_of(const EquilibriumMeasure& m) {
  Extent e{1e300, -1e300, 0.0, 0.0};
  for (const ArcPtr& a : m.contour.arcs)
    for (int k = 0; k <= 64; ++k) {
      const cplx z = a->point(k / 64.0);
      e.xmin = std::min(e.xmin, z.real());
      e.xmax = std::max(e.xmax, z.real());
      e.ymax = std::max(e.ymax, z.imag());
    }
  e.diam = std::hypot(e.xmax - e.xmin, 2.0 * e.ymax);
  return e;
}

std::vector<cplx> support_points(const EquilibriumMeasure& m, int per_arc) {
  std::vector<cplx> pts;
  for (const ArcPtr& a : m.contour.arcs)
    for (int k = 0; k <= per_arc; ++k) pts.push_back(a->point(static_cast<double>(k) / per_arc));
  return pts;
}

// largest distance between consecutive samples of one arc
double sample_gap(const std::vector<cplx>& pts, std::size_t per_arc) {
  double g = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (k % (per_arc + 1) != 0) g = std::max(g, std::abs(pts[k] - pts[k - 1]));
  return g;
}

double dist_to(const std::vector<cplx>& pts, cplx z) {
  double d = std::numeric_limits<double>::infinity();
  for (const cplx& p : pts) d = std::min(d, std::norm(z - p));
  return std::sqrt(d);
}

// (1/pi) * integral of |g'|^2 over the box [c-R, c+R] x [0, R] by an adaptive
// quadtree with 4x4 Gauss cells, refined around K down to h_min.
double dirichlet_box(const QuasimomentumField& f, const std::vector<cplx>& pts, std::size_t per_arc, double c,
                     double R, double h_min, std::size_t* cells) {
  struct Cell {
    double x, y, h;  // centre and half-size
  };
  std::vector<Cell> leaves, work{{c - 0.5 * R, 0.5 * R, 0.5 * R}, {c + 0.5 * R, 0.5 * R, 0.5 * R}};
  const double gap = sample_gap(pts, per_arc);
  while (!work.empty()) {
    Cell q = work.back();
    work.pop_back();
    const double d = dist_to(pts, cplx(q.x, q.y));
    if (d > 3.0 * q.h + 0.5 * gap || q.h <= h_min) {
      leaves.push_back(q);
      continue;
    }
    const double h = 0.5 * q.h;
    work.push_back({q.x - h, q.y - h, h});
    work.push_back({q.x + h, q.y - h, h});
    work.push_back({q.x - h, q.y + h, h});
    work.push_back({q.x + h, q.y + h, h});
  }
  if (cells) *cells = leaves.size();
  const GaussRule& g = gauss_legendre(4);
  std::vector<double> part(leaves.size(), 0.0);
  parallel_for(leaves.size(), [&](std::size_t k) {
    const Cell& q = leaves[k];
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const cplx z(q.x + q.h * g.x[i], q.y + q.h * g.x[j]);
        cplx v;
        try {
          v = f.dg(z);
        } catch (const Error&) {
          continue;  // a node on the support itself: measure zero
        }
        s += g.w[i] * g.w[j] * std::norm(v);
      }
    part[k] = s * q.h * q.h;
  });
  return std::accumulate(part.begin(), part.end(), 0.0) / kPi;
}

// (1/pi) * integral over the part of H outside the box of |I / z^2|^2.
double dirichlet_tail(double I, double R) {
  const GaussRule& g = gauss_legendre(32);
  double s = 0.0;
  // the box boundary seen from its base centre: x = +-R or y = R
  const double split[] = {0.0, kPi / 4, 3 * kPi / 4, kPi};
  for (int k = 0; k < 3; ++k) {
    const double a = split[k], b = split[k + 1], h = 0.5 * (b - a);
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const double th = a + h * (1.0 + g.x[q]);
      const double rho = std::min(R / std::max(std::abs(std::cos(th)), 1e-300), R / std::max(std::sin(th), 1e-300));
      s += h * g.w[q] / (2.0 * rho * rho);
    }
  }
  return I * I * s / kPi;
}

}  // namespace

EnergyReport intensity_report(const EquilibriumMeasure& m, int grid_res, double tol_energy) {
  if (grid_res < 8) fail(ErrorCode::InvalidInput, "grid resolution too small");
  EnergyReport r;
  r.bc_residual = m.bc_residual;
  r.condition = m.condition;
  r.nodes = m.nodes.size();
  if (m.empty()) return r;
  QuasimomentumField f(m);
  r.I_measure = m.intensity();

  const Extent ext = extent_of(m);
  const double c = ext.center();
  {
    // contour integral of z g'(z) on a circle enclosing K and its mirror image
    double Rc = 0.0;
    for (const cplx& z : m.nodes) Rc = std::max(Rc, std::abs(z - c));
    Rc *= 2.0;
    const int M = 256;
    cplx s = 0.0;
    for (int k = 0; k < M; ++k) {
      const cplx u = std::polar(1.0, 2.0 * kPi * (k + 0.5) / M);
      const cplx z = c + Rc * u;
      s += z * f.dg(z) * (Rc * u);
    }
    r.I_residue = (s / static_cast<double>(M)).real();
  }
  {
    const double R = 20.0 * ext.diam;
    const std::vector<cplx> pts = support_points(m, 512);
    const double h = ext.diam / grid_res;
    std::size_t cells = 0;
    const double tail = dirichlet_tail(r.I_measure, R);
    r.I_dirichlet = dirichlet_box(f, pts, 512, c, R, h, &cells) + tail;
    r.grid_cells = cells;
    const double coarse = dirichlet_box(f, pts, 512, c, R, 2.0 * h, nullptr) + tail;
    r.I_dirichlet_error = std::abs(r.I_dirichlet - coarse);
  }
  r.res_measure_residue = std::abs(r.I_measure - r.I_residue);
  r.res_measure_dirichlet = std::abs(r.I_measure - r.I_dirichlet);
  r.res_residue_dirichlet = std::abs(r.I_residue - r.I_dirichlet);
  if (!m.field.is_default()) r.I_phi = intensity_phi(m, m.field);
  if (r.I_dirichlet_error > tol_energy * std::max(1.0, r.I_measure))
    fail(ErrorCode::GridTooCoarse, "Dirichlet energy changed by " + std::to_string(r.I_dirichlet_error) +
                                       " between grid levels");
  return r;
}

double intensity_phi(const EquilibriumMeasure& m, const ExternalField& field) {
  if (!(field == m.field)) fail(ErrorCode::FieldMismatch, "measure was solved for a different field");
  double v = 0.0;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) v += 2.0 * field.value(m.nodes[i]).imag() * m.weights[i];
  if (m.empty()) return v;
  // residue form: (1/2 pi i) contour integral of Phi g' dz on a large circle
  QuasimomentumField f(m);
  const Extent ext = extent_of(m);
  const double c = ext.center();
  double Rc = 0.0;
  for (const cplx& z : m.nodes) Rc = std::max(Rc, std::abs(z - c));
  Rc *= 2.0;
  const int M = 256;
  cplx s = 0.0;
  for (int k = 0; k < M; ++k) {
    const cplx u = std::polar(1.0, 2.0 * kPi * (k + 0.5) / M);
    const cplx z = c + Rc * u;
    s += field.value(z) * f.dg(z) * (Rc * u);
  }
  const double res = (s / static_cast<double>(M)).real();
  if (std::abs(res - v) > 1e-6 * std::max(1.0, std::abs(v)))
    fail(ErrorCode::FieldMismatch, "moment and residue forms of the weighted intensity disagree");
  return v;
}

// ---------------------------------------------------------------------------

namespace {

// Winding number of P' around the rectangle, or INT_MIN when P' nearly
// vanishes on the boundary.
int winding(const QuasimomentumField& f, double x0, double y0, double x1, double y1) {
  const cplx corners[] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    std::function<double(cplx, cplx, cplx, cplx, int)> seg = [&](cplx a, cplx b, cplx fa, cplx fb, int depth) -> double {
      const double d = std::arg(fb / fa);
      if (std::abs(d) < 0.5) return d;
      // the edge crosses the support or passes a zero of P'
      if (depth > 12) fail(ErrorCode::EvaluationOnSupport, "winding walk did not resolve");
      const cplx m = 0.5 * (a + b);
      const cplx fm = f.dP(m);
      return seg(a, m, fa, fm, depth + 1) + seg(m, b, fm, fb, depth + 1);
    };
    const cplx a = corners[e], b = corners[e + 1];
    total += seg(a, b, f.dP(a), f.dP(b), 0);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

}  // namespace

StagnationSet stagnation_points(const QuasimomentumField& f, int expected) {
  StagnationSet out;
  const EquilibriumMeasure& m = f.measure();
  if (m.empty()) {
    if (expected > 0) fail(ErrorCode::CountMismatch, "no support but floating components expected");
    return out;
  }
  const Extent ext = extent_of(m);
  const std::vector<cplx> pts = support_points(m, 256);
  const double gap = sample_gap(pts, 256);
  const double D = std::max(ext.diam, 1e-12);
  // offset grid so that symmetry lines do not fall on cell edges
  const double X0 = ext.xmin - 0.7 * D - 0.0137 * D, X1 = ext.xmax + 0.7 * D + 0.0213 * D;
  const double Y0 = 1e-6 * D, Y1 = ext.ymax + 0.7 * D + 0.0171 * D;
  const double hmin = D / 256.0;

  struct Box {
    double x0, y0, x1, y1;
  };
  std::vector<Box> work;
  const int nx = 16, ny = 8;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      work.push_back({X0 + (X1 - X0) * i / nx, Y0 + (Y1 - Y0) * j / ny, X0 + (X1 - X0) * (i + 1) / nx,
                      Y0 + (Y1 - Y0) * (j + 1) / ny});
  std::vector<std::pair<Box, int>> found;
  while (!work.empty()) {
    const Box b = work.back();
    work.pop_back();
    const double w = b.x1 - b.x0, h = b.y1 - b.y0;
    const cplx c(0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1));
    const double diag = 0.5 * std::hypot(w, h);
    const bool touches = dist_to(pts, c) < diag + 0.5 * gap + 0.02 * D / 64;
    if (touches) {
      if (std::max(w, h) <= hmin) continue;  // cells through K are skipped at the finest level
    } else {
      int wn;
      try {
        wn = winding(f, b.x0, b.y0, b.x1, b.y1);
      } catch (const Error&) {
        wn = 1;  // force refinement
      }
      if (wn == 0) continue;
      if (std::max(w, h) <= D / 64.0) {
        found.push_back({b, wn});
        continue;
      }
    }
    const double xm = 0.5 * (b.x0 + b.x1), ym = 0.5 * (b.y0 + b.y1);
    work.push_back({b.x0, b.y0, xm, ym});
    work.push_back({xm, b.y0, b.x1, ym});
    work.push_back({b.x0, ym, xm, b.y1});
    work.push_back({xm, ym, b.x1, b.y1});
  }
  for (const auto& [b, wn] : found) {
    cplx z(0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1));
    const int mult = std::abs(wn);
    for (int it = 0; it < 60; ++it) {
      const cplx d = static_cast<double>(mult) * f.dP(z) / f.d2P(z);
      z -= d;
      if (std::abs(d) < 1e-14 * D) break;
    }
    out.points.push_back(z);
    out.multiplicities.push_back(mult);
  }
  if (expected >= 0 && out.total() != expected)
    fail(ErrorCode::CountMismatch, "found " + std::to_string(out.total()) + " stagnation points, expected " +
                                       std::to_string(expected));
  return out;
}

}  // namespace zs
