#include "zsspec/contour.hpp"

#include <algorithm>
#include <cmath>

#include "zsspec/errors.hpp"

namespace zs {

double ArcGeometry::length() const {
  const GaussRule& g = gauss_legendre(32);
  double L = 0.0;
  const int panels = 16;
  for (int k = 0; k < panels; ++k) {
    const double a = static_cast<double>(k) / panels, h = 0.5 / panels;
    for (std::size_t i = 0; i < g.x.size(); ++i) L += h * g.w[i] * std::abs(deriv(a + h * (1.0 + g.x[i])));
  }
  return L;
}

Arc ArcGeometry::sample(int n) const {
  Arc a;
  a.samples.reserve(n + 1);
  for (int k = 0; k <= n; ++k) a.samples.push_back(point(static_cast<double>(k) / n));
  // guard against repeated points from exactly degenerate parametrizations
  a.samples.erase(std::unique(a.samples.begin(), a.samples.end()), a.samples.end());
  return a;
}

namespace {

class Segment final : public ArcGeometry {
 public:
  Segment(cplx a, cplx b) : a_(a), b_(b) {}
  cplx point(double tau) const override {
    if (tau <= 0.0) return a_;
    if (tau >= 1.0) return b_;
    return tau < 0.5 ? a_ + (b_ - a_) * cluster(tau) : b_ - (b_ - a_) * cluster_comp(tau);
  }
  cplx deriv(double tau) const override { return (b_ - a_) * cluster_deriv(tau); }

 private:
  cplx a_, b_;
};

class Circular final : public ArcGeometry {
 public:
  Circular(cplx a, cplx b, double bulge) : a_(a), b_(b) {
    // sagitta h = bulge * c/2; the arc subtends 4 atan(bulge)
    theta_ = 4.0 * std::atan(bulge);
    const cplx mid = 0.5 * (a + b), chord = b - a;
    const double half = 0.5 * std::abs(chord);
    const double R = half / std::sin(0.5 * theta_);
    const double d = R * std::cos(0.5 * theta_);  // center offset from chord midpoint
    const cplx left = kI * chord / std::abs(chord);
    center_ = mid - left * d;
    radius_ = std::abs(R);
    phi0_ = std::arg(a - center_);
    theta_ = -theta_;  // a left bulge turns clockwise about the center
  }
  cplx point(double tau) const override {
    if (tau <= 0.0) return a_;
    if (tau >= 1.0) return b_;
    // offset from the nearer endpoint, so points close to it stay distinct
    const bool near_a = tau < 0.5;
    const double x = near_a ? theta_ * cluster(tau) : -theta_ * cluster_comp(tau);
    const cplx step = 2.0 * kI * std::sin(0.5 * x) * std::polar(1.0, 0.5 * x);
    return (near_a ? a_ : b_) + radius_ * std::polar(1.0, near_a ? phi0_ : phi0_ + theta_) * step;
  }
  cplx deriv(double tau) const override {
    return kI * theta_ * cluster_deriv(tau) * radius_ * std::polar(1.0, phi0_ + theta_ * cluster(tau));
  }

 private:
  cplx a_, b_, center_;
  double radius_ = 0.0, phi0_ = 0.0, theta_ = 0.0;
};

class Spline final : public ArcGeometry {
 public:
  explicit Spline(const std::vector<cplx>& pts) : z_(pts) {
    const std::size_t n = z_.size();
    t_.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) t_[i] = t_[i - 1] + std::abs(z_[i] - z_[i - 1]);
    const double L = t_.back();
    for (double& v : t_) v /= L;
    // natural spline second derivatives (tridiagonal solve)
    m_.assign(n, 0.0);
    if (n > 2) {
      std::vector<double> diag(n, 2.0), up(n, 0.0), lo(n, 0.0);
      std::vector<cplx> rhs(n, 0.0);
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = t_[i] - t_[i - 1], h1 = t_[i + 1] - t_[i];
        lo[i] = h0 / (h0 + h1);
        up[i] = h1 / (h0 + h1);
        rhs[i] = 6.0 * ((z_[i + 1] - z_[i]) / h1 - (z_[i] - z_[i - 1]) / h0) / (h0 + h1);
      }
      diag[0] = diag[n - 1] = 1.0;
      for (std::size_t i = 1; i < n; ++i) {
        const double w = lo[i] / diag[i - 1];
        diag[i] -= w * up[i - 1];
        rhs[i] -= w * rhs[i - 1];
      }
      m_[n - 1] = rhs[n - 1] / diag[n - 1];
      for (std::size_t i = n - 1; i-- > 0;) m_[i] = (rhs[i] - up[i] * m_[i + 1]) / diag[i];
    }
  }
  cplx point(double tau) const override { return eval(cluster(std::clamp(tau, 0.0, 1.0)), false); }
  cplx deriv(double tau) const override { return eval(cluster(tau), true) * cluster_deriv(tau); }

 private:
  cplx eval(double t, bool derivative) const {
    std::size_t i = std::upper_bound(t_.begin(), t_.end(), t) - t_.begin();
    i = std::clamp<std::size_t>(i, 1, t_.size() - 1);
    const double h = t_[i] - t_[i - 1];
    const double a = (t_[i] - t) / h, b = (t - t_[i - 1]) / h;
    if (!derivative)
      return a * z_[i - 1] + b * z_[i] + ((a * a * a - a) * m_[i - 1] + (b * b * b - b) * m_[i]) * (h * h) / 6.0;
    return (z_[i] - z_[i - 1]) / h + ((1.0 - 3.0 * a * a) * m_[i - 1] + (3.0 * b * b - 1.0) * m_[i]) * h / 6.0;
  }

  std::vector<cplx> z_;
  std::vector<double> t_;
  std::vector<cplx> m_;
};

class Hermite final : public ArcGeometry {
 public:
  Hermite(const std::vector<double>& s, const std::vector<cplx>& z, const std::vector<cplx>& t) : z_(z) {
    const double L = s.back() - s.front();
    const std::size_t n = s.size();
    tau_.resize(n);
    dz_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double u = std::clamp((s[k] - s.front()) / L, 0.0, 1.0);
      tau_[k] = std::acos(1.0 - 2.0 * u) / kPi;
      dz_[k] = t[k] * (L * cluster_deriv(tau_[k]));
    }
    tau_.front() = 0.0;
    tau_.back() = 1.0;
    length_ = L;
  }
  cplx point(double tau) const override { return eval(tau, false); }
  // tau encodes arc length exactly, so only the direction is interpolated
  cplx deriv(double tau) const override {
    const cplx d = eval(tau, true);
    const double speed = length_ * cluster_deriv(std::clamp(tau, 0.0, 1.0));
    return std::abs(d) > 0.0 ? d / std::abs(d) * speed : d;
  }

 private:
  cplx eval(double tau, bool derivative) const {
    tau = std::clamp(tau, 0.0, 1.0);
    std::size_t i = std::upper_bound(tau_.begin(), tau_.end(), tau) - tau_.begin();
    i = std::clamp<std::size_t>(i, 1, tau_.size() - 1);
    const double h = tau_[i] - tau_[i - 1];
    const double x = (tau - tau_[i - 1]) / h;
    const cplx p0 = z_[i - 1], p1 = z_[i], m0 = dz_[i - 1] * h, m1 = dz_[i] * h;
    if (!derivative) {
      const double h00 = (1 + 2 * x) * (1 - x) * (1 - x), h10 = x * (1 - x) * (1 - x);
      const double h01 = x * x * (3 - 2 * x), h11 = x * x * (x - 1);
      return h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1;
    }
    const double d00 = 6 * x * x - 6 * x, d10 = 3 * x * x - 4 * x + 1;
    const double d01 = -6 * x * x + 6 * x, d11 = 3 * x * x - 2 * x;
    return (d00 * p0 + d10 * m0 + d01 * p1 + d11 * m1) / h;
  }

  std::vector<double> tau_;
  std::vector<cplx> z_, dz_;
  double length_ = 0.0;
};

class Chebyshev final : public ArcGeometry {
 public:
  struct Panel {
    double a, b;
    std::vector<cplx> c, dc;  // coefficients of f and of df/dx
  };
  explicit Chebyshev(std::vector<Panel> panels) : panels_(std::move(panels)) {}
  cplx point(double tau) const override {
    const Panel& p = find(tau);
    return clenshaw(p.c, x_of(p, tau));
  }
  cplx deriv(double tau) const override {
    const Panel& p = find(tau);
    return clenshaw(p.dc, x_of(p, tau)) * (2.0 / (p.b - p.a));
  }

  static cplx clenshaw(const std::vector<cplx>& c, double x) {
    cplx b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
      const cplx t = 2.0 * x * b1 - b2 + c[k];
      b2 = b1;
      b1 = t;
    }
    return x * b1 - b2 + c[0];
  }
  static std::vector<cplx> derivative(const std::vector<cplx>& c) {
    const std::size_t n = c.size();
    std::vector<cplx> d(n, 0.0);
    if (n < 2) return d;
    d[n - 2] = 2.0 * static_cast<double>(n - 1) * c[n - 1];
    for (std::size_t k = n - 2; k-- > 0;) d[k] = (k + 2 < n ? d[k + 2] : 0.0) + 2.0 * static_cast<double>(k + 1) * c[k + 1];
    d[0] *= 0.5;
    return d;
  }

 private:
  static double x_of(const Panel& p, double tau) {
    return std::clamp((2.0 * tau - p.a - p.b) / (p.b - p.a), -1.0, 1.0);
  }
  const Panel& find(double tau) const {
    auto it = std::upper_bound(panels_.begin(), panels_.end(), tau, [](double t, const Panel& p) { return t < p.b; });
    if (it == panels_.end()) --it;
    return *it;
  }
  std::vector<Panel> panels_;
};

}  // namespace

ArcPtr make_chebyshev_arc(const std::function<cplx(double)>& f, double tol, int order) {
  const int n = order;
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = std::cos(kPi * (j + 0.5) / n);
  std::vector<Chebyshev::Panel> done;
  double scale = 0.0;
  for (int k = 0; k <= 8; ++k) scale = std::max(scale, std::abs(f(k / 8.0)));
  scale = std::max(scale, 1e-300);
  std::function<void(double, double, int)> build = [&](double a, double b, int depth) {
    std::vector<cplx> v(n);
    for (int j = 0; j < n; ++j) v[j] = f(0.5 * (a + b) + 0.5 * (b - a) * x[j]);
    std::vector<cplx> c(n, 0.0);
    for (int k = 0; k < n; ++k) {
      cplx s = 0.0;
      for (int j = 0; j < n; ++j) s += v[j] * std::cos(kPi * k * (j + 0.5) / n);
      c[k] = s * ((k == 0 ? 1.0 : 2.0) / n);
    }
    const double tail = std::max({std::abs(c[n - 1]), std::abs(c[n - 2]), std::abs(c[n - 3])});
    if (tail > tol * scale && depth < 24) {
      build(a, 0.5 * (a + b), depth + 1);
      build(0.5 * (a + b), b, depth + 1);
      return;
    }
    done.push_back({a, b, c, Chebyshev::derivative(c)});
  };
  for (int k = 0; k < 4; ++k) build(k / 4.0, (k + 1) / 4.0, 0);
  return std::make_shared<Chebyshev>(std::move(done));
}

ArcPtr make_segment(cplx a, cplx b) {
  if (a == b) fail(ErrorCode::InvalidInput, "degenerate segment");
  return std::make_shared<Segment>(a, b);
}

ArcPtr make_circular_arc(cplx a, cplx b, double bulge) {
  if (std::abs(bulge) < 1e-12) return make_segment(a, b);
  return std::make_shared<Circular>(a, b, bulge);
}

ArcPtr make_spline(const std::vector<cplx>& points) {
  if (points.size() < 2) fail(ErrorCode::InvalidInput, "spline needs at least two points");
  if (points.size() == 2) return make_segment(points[0], points[1]);
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i] == points[i - 1]) fail(ErrorCode::InvalidInput, "repeated spline point");
  return std::make_shared<Spline>(points);
}

ArcPtr make_hermite(const std::vector<double>& s, const std::vector<cplx>& z, const std::vector<cplx>& t) {
  if (s.size() < 2 || s.size() != z.size() || s.size() != t.size())
    fail(ErrorCode::InvalidInput, "inconsistent Hermite data");
  return std::make_shared<Hermite>(s, z, t);
}

namespace {

class Affine final : public ArcGeometry {
 public:
  Affine(ArcPtr base, cplx scale, cplx shift) : base_(std::move(base)), scale_(scale), shift_(shift) {}
  cplx point(double tau) const override { return scale_ * base_->point(tau) + shift_; }
  cplx deriv(double tau) const override { return scale_ * base_->deriv(tau); }

 private:
  ArcPtr base_;
  cplx scale_, shift_;
};

class Displaced final : public ArcGeometry {
 public:
  Displaced(ArcPtr base, double eps) : base_(std::move(base)), eps_(eps) {}
  cplx point(double tau) const override {
    const double b = bump(tau);
    return b == 0.0 ? base_->point(tau) : base_->point(tau) + eps_ * b * normal(tau);
  }
  cplx deriv(double tau) const override {
    // the normal is differentiated numerically; only its rate enters
    const double h = 1e-6;
    const double a = std::max(0.0, tau - h), c = std::min(1.0, tau + h);
    const cplx dn = (normal(c) - normal(a)) / (c - a);
    const double db = kPi * std::sin(2.0 * kPi * tau);
    return base_->deriv(tau) + eps_ * (db * normal(tau) + bump(tau) * dn);
  }

 private:
  static double bump(double tau) {
    const double s = std::sin(kPi * tau);
    return s * s;
  }
  cplx normal(double tau) const {
    // the tangent direction at the very ends comes from a nearby point
    const double t = std::clamp(tau, 1e-9, 1.0 - 1e-9);
    const cplx d = base_->deriv(t);
    return kI * d / std::abs(d);
  }

  ArcPtr base_;
  double eps_;
};

}  // namespace

ArcPtr make_affine(ArcPtr base, cplx scale, cplx shift) {
  if (scale == 0.0) fail(ErrorCode::InvalidInput, "zero scale");
  return std::make_shared<Affine>(std::move(base), scale, shift);
}

ArcPtr make_displaced(ArcPtr base, double eps) {
  if (eps == 0.0) return base;
  return std::make_shared<Displaced>(std::move(base), eps);
}

Contour Contour::affine(cplx scale, cplx shift) const {
  Contour c;
  for (const ArcPtr& a : arcs) c.arcs.push_back(make_affine(a, scale, shift));
  return c;
}

PolyContinuum Contour::continuum(int samples_per_arc, double glue_tol) const {
  std::vector<Arc> out;
  for (const ArcPtr& a : arcs) out.push_back(a->sample(samples_per_arc));
  return make_continuum(std::move(out), glue_tol);
}

double Contour::diameter() const {
  std::vector<cplx> pts;
  for (const ArcPtr& a : arcs)
    for (int k = 0; k <= 32; ++k) pts.push_back(a->point(k / 32.0));
  double d = 0.0;
  for (const cplx& p : pts)
    for (const cplx& q : pts) d = std::max(d, std::abs(p - q));
  return d;
}

Contour contour_from_polylines(const std::vector<std::vector<cplx>>& polylines) {
  Contour c;
  for (const auto& p : polylines) c.arcs.push_back(make_spline(p));
  return c;
}

}  // namespace zs
