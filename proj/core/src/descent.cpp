#include "zsspec/descent.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numeric>

#include "zsspec/errors.hpp"

namespace zs {

ConnectivityMatrix Topology::connectivity(std::size_t n_anchors) const {
  std::vector<std::size_t> parent(n_anchors + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const ArcTemplate& t : arcs) {
    const std::size_t a = static_cast<std::size_t>(t.from) + 1;
    const std::size_t b = t.to == ArcTemplate::kGround ? 0 : static_cast<std::size_t>(t.to) + 1;
    parent[find(a)] = find(b);
  }
  ConnectivityMatrix M(n_anchors);
  for (std::size_t i = 0; i <= n_anchors; ++i)
    for (std::size_t j = 0; j <= n_anchors; ++j)
      if (i != j && find(i) == find(j)) M.set(i, j);
  return M;
}

std::string Topology::to_string() const {
  std::string s;
  for (const ArcTemplate& t : arcs) {
    if (!s.empty()) s += ' ';
    s += "e" + std::to_string(t.from + 1) + "-" + (t.to == ArcTemplate::kGround ? "R" : "e" + std::to_string(t.to + 1));
  }
  return s;
}

std::vector<Topology> class_topologies(const AnchorSet& E, const ConnectivityMatrix& M) {
  const int n = static_cast<int>(E.size());
  if (M.anchors() != E.size()) fail(ErrorCode::InvalidInput, "connectivity matrix does not match the anchors");
  std::vector<Topology> out;
  std::vector<bool> used(n, false);
  Topology cur;
  std::function<void()> rec = [&]() {
    int i = 0;
    while (i < n && used[i]) ++i;
    if (i == n) {
      if (cur.connectivity(E.size()).dominates(M)) out.push_back(cur);
      return;
    }
    used[i] = true;
    cur.arcs.push_back({i, ArcTemplate::kGround});
    rec();
    cur.arcs.pop_back();
    for (int j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = true;
      cur.arcs.push_back({i, j});
      rec();
      cur.arcs.pop_back();
      used[j] = false;
    }
    used[i] = false;
  };
  rec();
  return out;
}

std::size_t SplineClass::dimension() const {
  std::size_t d = 0;
  for (const ArcTemplate& t : topology.arcs) d += n_ctrl + (t.to == ArcTemplate::kGround ? 1 : 0);
  return d;
}

Contour SplineClass::contour(const std::vector<double>& x) const {
  if (x.size() != dimension()) fail(ErrorCode::InvalidInput, "parameter vector has the wrong size");
  Contour c;
  std::size_t k = 0;
  for (const ArcTemplate& t : topology.arcs) {
    const cplx a = E[t.from];
    const cplx b = t.to == ArcTemplate::kGround ? cplx(x[k++], 0.0) : E[t.to];
    const cplx chord = b - a;
    const cplx n = kI * chord / std::abs(chord);
    std::vector<cplx> pts{a};
    for (int j = 1; j <= n_ctrl; ++j) pts.push_back(a + chord * (static_cast<double>(j) / (n_ctrl + 1)) + x[k++] * n);
    pts.push_back(b);
    c.arcs.push_back(make_spline(pts));
  }
  return c;
}

std::vector<double> SplineClass::straight() const {
  std::vector<double> x;
  for (const ArcTemplate& t : topology.arcs) {
    if (t.to == ArcTemplate::kGround) x.push_back(E[t.from].real());
    for (int j = 0; j < n_ctrl; ++j) x.push_back(0.0);
  }
  return x;
}

std::vector<double> SplineClass::fit(const std::vector<std::vector<cplx>>& polylines) const {
  if (polylines.size() != topology.arcs.size()) fail(ErrorCode::InvalidInput, "one seed polyline per arc expected");
  std::vector<double> x;
  for (std::size_t i = 0; i < polylines.size(); ++i) {
    const ArcTemplate& t = topology.arcs[i];
    std::vector<cplx> p = polylines[i];
    if (p.size() < 2) fail(ErrorCode::InvalidInput, "seed polyline needs two points");
    const cplx a = E[t.from];
    if (std::abs(p.back() - a) < std::abs(p.front() - a)) std::reverse(p.begin(), p.end());
    const cplx b = t.to == ArcTemplate::kGround ? cplx(p.back().real(), 0.0) : E[t.to];
    if (t.to == ArcTemplate::kGround) x.push_back(b.real());
    const cplx chord = b - a;
    const cplx dir = chord / std::abs(chord);
    auto along = [&](cplx z) { return ((z - a) * std::conj(dir)).real() / std::abs(chord); };
    auto across = [&](cplx z) { return ((z - a) * std::conj(dir)).imag(); };
    for (int j = 1; j <= n_ctrl; ++j) {
      const double f = static_cast<double>(j) / (n_ctrl + 1);
      double off = 0.0;
      for (std::size_t q = 0; q + 1 < p.size(); ++q) {
        const double u0 = along(p[q]), u1 = along(p[q + 1]);
        if ((u0 - f) * (u1 - f) <= 0.0 && u0 != u1) {
          const double s = (f - u0) / (u1 - u0);
          off = across(p[q] + s * (p[q + 1] - p[q]));
          break;
        }
      }
      x.push_back(off);
    }
  }
  return x;
}

namespace {

struct Objective {
  const SplineClass* cls;
  const ConnectivityMatrix* M;
  const DescentOptions* opt;
  int evaluations = 0;
  int rejected = 0;

  bool in_class(const Contour& c) const {
    for (std::size_t a = 0; a < c.arcs.size(); ++a) {
      const bool grounded = cls->topology.arcs[a].to == ArcTemplate::kGround;
      for (int k = 1; k < 128; ++k) {
        const double y = c.arcs[a]->point(k / 128.0).imag();
        if (y < 0.0 || (!grounded && y <= kGlueTol)) return false;
      }
    }
    return class_membership(c.continuum(128), cls->E, *M);
  }

  double operator()(const std::vector<double>& x) {
    ++evaluations;
    try {
      const Contour c = cls->contour(x);
      if (!in_class(c)) {
        ++rejected;
        return std::numeric_limits<double>::infinity();
      }
      return solve_equilibrium(c, {}, opt->eq).intensity();
    } catch (const Error&) {
      ++rejected;
      return std::numeric_limits<double>::infinity();
    }
  }
};

}  // namespace

DescentResult descend(const SplineClass& cls, const ConnectivityMatrix& M, std::vector<double> x0,
                      const DescentOptions& opt, bool allow_budget) {
  const std::size_t d = cls.dimension();
  if (x0.size() != d) fail(ErrorCode::InvalidInput, "parameter vector has the wrong size");
  Objective F{&cls, &M, &opt};
  const double D = cls.E.diameter();
  const double h = opt.fd_frac * D;

  using Vec = Eigen::VectorXd;
  Vec x = Eigen::Map<Vec>(x0.data(), d);
  auto eval = [&](const Vec& v) { return F(std::vector<double>(v.data(), v.data() + d)); };
  auto gradient = [&](const Vec& v, double fv) {
    Vec g(d);
    for (std::size_t i = 0; i < d; ++i) {
      Vec p = v, m = v;
      p(i) += h;
      m(i) -= h;
      const double fp = eval(p), fm = eval(m);
      if (std::isfinite(fp) && std::isfinite(fm))
        g(i) = (fp - fm) / (2.0 * h);
      else if (std::isfinite(fp))
        g(i) = (fp - fv) / h;
      else if (std::isfinite(fm))
        g(i) = (fv - fm) / h;
      else
        g(i) = 0.0;
    }
    return g;
  };

  DescentResult res;
  res.topology = cls.topology;
  double f = eval(x);
  if (!std::isfinite(f)) fail(ErrorCode::ClassEscape, "seed contour is outside the class");
  res.history.push_back(f);
  Vec g = gradient(x, f);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d) * (0.05 * D / std::max(g.norm(), 1e-300));
  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it + 1;
    if (g.norm() * D < opt.grad_tol * std::max(f, 1e-300)) {
      res.converged = true;
      break;
    }
    Vec p = -H * g;
    if (p.dot(g) >= 0.0) {
      H = Eigen::MatrixXd::Identity(d, d) * (0.05 * D / g.norm());
      p = -H * g;
    }
    // Armijo backtracking; points outside the class evaluate to +inf
    double alpha = 1.0, fn = f;
    Vec xn = x;
    bool moved = false;
    for (int k = 0; k < 30; ++k, alpha *= 0.5) {
      xn = x + alpha * p;
      fn = eval(xn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * alpha * g.dot(p)) {
        moved = true;
        break;
      }
    }
    if (!moved) {
      res.converged = true;  // no descent direction left at this resolution
      break;
    }
    const Vec gn = gradient(xn, fn);
    const Vec s = xn - x, y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    const double gain = f - fn;
    x = xn;
    f = fn;
    g = gn;
    res.history.push_back(f);
    if (gain < opt.f_tol * std::max(1.0, f)) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged && !allow_budget)
    fail(ErrorCode::NoConvergence, "descent budget exhausted after " + std::to_string(res.iterations) + " iterations");

  res.params.assign(x.data(), x.data() + d);
  res.contour = cls.contour(res.params);
  res.continuum = res.contour.continuum();
  const EquilibriumMeasure m = solve_equilibrium(res.contour, {}, opt.final_eq);
  res.intensity = m.intensity();
  res.report = intensity_report(m, opt.grid_res);
  res.evaluations = F.evaluations;
  res.rejected = F.rejected;
  return res;
}

DescentResult minimize_in_class(const AnchorSet& E, const ConnectivityMatrix& M, const Topology& topo,
                                const std::vector<std::vector<cplx>>& seed, const DescentOptions& opt) {
  if (!topo.connectivity(E.size()).dominates(M)) fail(ErrorCode::ClassEscape, "topology lies outside the class");
  SplineClass cls{E, topo, opt.n_ctrl};
  return descend(cls, M, seed.empty() ? cls.straight() : cls.fit(seed), opt);
}

DescentResult minimize_in_class(const AnchorSet& E, const ConnectivityMatrix& M, const DescentOptions& opt) {
  const std::vector<Topology> topos = class_topologies(E, M);
  if (topos.empty()) fail(ErrorCode::ClassEscape, "no candidate topology realizes the class");
  DescentResult best;
  bool have = false;
  for (const Topology& t : topos) {
    SplineClass cls{E, t, opt.n_ctrl};
    DescentResult r;
    try {
      r = descend(cls, M, cls.straight(), opt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ClassEscape) throw;
      continue;  // straight seed crosses another arc or leaves the class
    }
    if (!have || r.intensity < best.intensity) {
      best = std::move(r);
      have = true;
    }
  }
  if (!have) fail(ErrorCode::ClassEscape, "no topology admits a straight seed inside the class");
  return best;
}

}  // namespace zs
