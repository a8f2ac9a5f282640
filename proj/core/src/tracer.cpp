#include "zsspec/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <numeric>

#include "zsspec/errors.hpp"

namespace zs {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::RealAxis: return "RealAxis";
    case Termination::CriticalPoint: return "CriticalPoint";
    case Termination::Escaped: return "Escaped";
  }
  return "?";
}

namespace {

// Taylor coefficients of p at c: p(c + t) = sum_k out[k] t^k.
std::vector<cplx> taylor_at(const RealPoly& p, cplx c) {
  std::vector<cplx> a(p.begin(), p.end());
  std::vector<cplx> out;
  while (!a.empty()) {
    // synthetic division by (z - c): remainder is the next Taylor coefficient
    std::vector<cplx> q(a.size() > 1 ? a.size() - 1 : 0);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      acc = acc * c + a[i];
      if (i + 1 < a.size()) q[i] = acc;
    }
    out.push_back(acc);
    a = std::move(q);
  }
  return out;
}

bool in_branch_set(const QuadraticDifferential& qd, cplx c, double tol) {
  for (const cplx& b : qd.branch_points())
    if (std::abs(b - c) < tol) return true;
  return false;
}

// Leading coefficient C in Q(z) ~ C (z-c)^k.
cplx leading_coefficient(const QuadraticDifferential& qd, cplx c, int k) {
  const double tol = 1e-9 * std::max(1.0, qd.anchors().diameter());
  const bool branch = in_branch_set(qd, c, tol);
  const int j = branch ? (k + 1) / 2 : k / 2;  // multiplicity of c as a root of P_L
  const std::vector<cplx> t = taylor_at(qd.half_numerator(), c);
  const cplx num = j < static_cast<int>(t.size()) ? t[j] : cplx(0.0);
  cplx den = branch ? (c - std::conj(c)) : cplx(1.0);
  for (const cplx& b : qd.branch_points()) {
    if (std::abs(b - c) < tol) continue;
    den *= (c - b) * (c - std::conj(b));
  }
  return num * num / den;
}

double clearance_scale(const QuadraticDifferential& qd) { return std::max(1.0, qd.anchors().diameter()); }

// Imag part of the integral of sqrt(Q) from the real axis to z.
double level_of(const QuadraticDifferential& qd, cplx z) {
  const double D = qd.anchors().diameter();
  const double offsets[] = {0.0371, -0.0413, 0.0137, -0.0171, 0.0613, -0.0797, 0.1231, -0.1493};
  for (double o : offsets) {
    const double x0 = z.real() + o * D;
    Loop l;
    l.path = {cplx(x0, 0.0), cplx(x0, z.imag()), z};
    l.initial_branch = qd.sqrt_main(l.path[0]);
    try {
      return std::abs(loop_integral(qd, l).imag());
    } catch (const Error&) {
    }
  }
  fail(ErrorCode::QuadratureFailure, "no clear path to evaluate the level of a critical point");
}

struct Tracer {
  const QuadraticDifferential& qd;
  TraceOptions opt;
  std::vector<CriticalPoint> crit;
  double diam, merge, esc;
  cplx center;

  Tracer(const QuadraticDifferential& q, const TraceOptions& o) : qd(q), opt(o), crit(critical_points(q)) {
    diam = std::max(qd.anchors().diameter(), 1e-300);
    merge = opt.merge_frac * diam;
    esc = opt.escape_frac * diam;
    center = 0.0;
    for (const cplx& e : qd.anchors()) center += e.real();
    center /= static_cast<double>(qd.anchors().size());
  }

  // sqrt(Q) at base + dz on the branch nearest to ref
  cplx root_near(cplx base, cplx dz, cplx ref) const {
    const cplx w = qd.sqrt_offset(base, dz);
    return std::abs(w - ref) <= std::abs(w + ref) ? w : -w;
  }

  double dist_critical(cplx base, cplx dz) const {
    double d = std::numeric_limits<double>::infinity();
    for (const CriticalPoint& c : crit) {
      d = std::min(d, std::abs((base - c.z) + dz));
      if (c.order < 0) d = std::min(d, std::abs((base - std::conj(c.z)) + dz));
    }
    return d;
  }

  int match_critical(cplx p) const {
    for (std::size_t i = 0; i < crit.size(); ++i)
      if (std::abs(crit[i].z - p) < 1e-9 * diam) return static_cast<int>(i);
    return -1;
  }

  // Integral of w along the chord base+d0 -> base+d1; signs follow continuity from w0.
  cplx chord(cplx base, cplx d0, cplx w0, cplx d1) const {
    const GaussRule& g = gauss_legendre(10);
    cplx s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double t = 0.5 * (1.0 + g.x[i]);
      s += 0.5 * g.w[i] * root_near(base, d0 + t * (d1 - d0), w0);
    }
    return s * (d1 - d0);
  }

  // Integral of w from the critical point c (local order k) to c + d, where w1
  // is the branch there. Substituting z = c + d u^2 leaves an integrand that is
  // analytic on a neighbourhood of [0, 1] much larger than the interval, since
  // |d| is far below the spacing of critical points.
  cplx from_critical(cplx c, int k, cplx d, cplx w1) const {
    const GaussRule& g = gauss_legendre(20);
    cplx s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double u = 0.5 * (1.0 + g.x[i]);
      const cplx ref = w1 * std::pow(u, static_cast<double>(k));
      s += 0.5 * g.w[i] * root_near(c, d * (u * u), ref) * (2.0 * u) * d;
    }
    return s;
  }

  // One Dormand-Prince 5(4) step of length h from base + dz, followed by a
  // projection back onto the level set. Returns false when the step is
  // rejected; `grow` is the suggested step factor in both cases.
  bool rk_step(cplx base, cplx dz, cplx w, cplx q, double h, cplx& dn, cplx& wn, cplx& qn, double& grow) const {
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
    auto f = [&](cplx d) {
      const cplx ww = root_near(base, d, w);
      return std::conj(ww) / std::abs(ww);
    };
    const double atol = 1e-11 * diam;
    const cplx k1 = f(dz);
    const cplx k2 = f(dz + h * a21 * k1);
    const cplx k3 = f(dz + h * (a31 * k1 + a32 * k2));
    const cplx k4 = f(dz + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const cplx k5 = f(dz + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const cplx k6 = f(dz + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const cplx d5 = dz + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const cplx k7 = f(d5);
    const double err = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    grow = err > 0 ? std::clamp(0.9 * std::pow(atol / err, 0.2), 0.2, 4.0) : 4.0;
    if (err > atol && h > 1e-12 * diam) return false;
    const double level_tol = 1e-3 * opt.tol_traj * std::max(1.0, diam);
    dn = d5;
    for (int it = 0; it < 4; ++it) {
      wn = root_near(base, dn, w);
      qn = q + chord(base, dz, w, dn);
      if (std::abs(qn.imag()) <= level_tol) break;
      dn -= kI * qn.imag() / wn;
    }
    return true;
  }

  // Point at arc length ds beyond z0 along the trajectory whose unit tangent at
  // z0 is t0. The level of z0 is taken as the reference level.
  cplx advance(cplx z0, cplx t0, double ds, cplx* t_end = nullptr) const {
    cplx base = z0, dz = 0.0;
    for (const CriticalPoint& c : crit)
      if (std::abs(z0 - c.z) < 1e-3 * diam) {
        base = c.z;
        dz = z0 - c.z;
      }
    cplx w = qd.sqrt_offset(base, dz);
    if (std::abs(std::conj(w) / std::abs(w) - t0) > std::abs(-std::conj(w) / std::abs(w) - t0)) w = -w;
    cplx q = 0.0;
    double left = ds, h = std::min(ds, std::min(0.25 * dist_critical(base, dz), opt.max_step_frac * diam));
    for (int step = 0; left > 0.0; ++step) {
      if (step > opt.max_steps) fail(ErrorCode::StepCollapse, "advance exceeded the step budget");
      h = std::min({h, left, 0.25 * dist_critical(base, dz), opt.max_step_frac * diam});
      if (h < 1e-15 * diam) break;
      cplx dn, wn, qn;
      double grow;
      if (!rk_step(base, dz, w, q, h, dn, wn, qn, grow)) {
        h *= grow;
        continue;
      }
      left -= h;
      dz = dn;
      w = wn;
      q = qn;
      h *= grow;
    }
    if (t_end) *t_end = std::conj(w) / std::abs(w);
    return base + dz;
  }

  // Smooth geometry for an edge joining two critical points. Node positions
  // come from the trajectory itself, so the interpolant is exact up to the
  // integration tolerance. s_values must be exact arc lengths.
  ArcPtr edge_geometry(const Trajectory& e) const {
    const std::vector<double>& sv = e.s_values;
    const std::size_t n = sv.size();
    const double L = sv.back();
    auto f = [&](double tau) -> cplx {
      const double s = L * cluster(tau);
      if (s <= sv[1]) return e.samples[0] + s * e.tangents[0];
      if (s >= sv[n - 2]) return e.samples[n - 1] - (L - s) * e.tangents[n - 1];
      const std::size_t k = std::upper_bound(sv.begin(), sv.end(), s) - sv.begin() - 1;
      if (s == sv[k]) return e.samples[k];
      return advance(e.samples[k], e.tangents[k], s - sv[k]);
    };
    return make_chebyshev_arc(f, 1e-12);
  }

  // Arc length from z0 (unit tangent t0) to the nearby point z1 on the same trajectory.
  double arc_gap(cplx z0, cplx t0, cplx z1) const {
    double l = std::abs(z1 - z0);
    for (int it = 0; it < 3; ++it) {
      cplx t;
      const cplx zs = advance(z0, t0, l, &t);
      l += (std::conj(t) * (z1 - zs)).real();
    }
    return l;
  }

  Trajectory trace(cplx start, double dir) const {
    Trajectory tr;
    const int origin = match_critical(start);
    tr.origin = origin;
    const cplx e_dir = std::polar(1.0, dir);
    const bool on_real_start = std::abs(start.imag()) < kGlueTol * clearance_scale(qd);

    // The position is kept as base + dz, with base snapped to a nearby
    // critical point so that offsets from it are exact.
    cplx base = start, dz = 0.0, q = 0.0;
    double s = 0.0;
    int k0 = 0;
    if (origin >= 0) {
      k0 = crit[origin].order;
      base = crit[origin].z;
      const double r = (k0 < 0 ? 1e-8 : 1e-6) * diam;
      tr.samples.push_back(base);
      tr.p_values.push_back(0.0);
      tr.s_values.push_back(0.0);
      tr.tangents.push_back(e_dir);
      dz = r * e_dir;
      s = r;
    }
    cplx w = qd.sqrt_offset(base, dz);
    // pick the branch whose horizontal direction matches dir
    if (std::abs(std::conj(w) / std::abs(w) - e_dir) > std::abs(-std::conj(w) / std::abs(w) - e_dir)) w = -w;

    const double qscale = std::max(1.0, diam);
    const double level_tol = 1e-3 * opt.tol_traj * qscale;
    if (origin >= 0) {
      q = from_critical(base, k0, dz, w);
      for (int it = 0; it < 3 && std::abs(q.imag()) > level_tol; ++it) {
        dz -= kI * q.imag() / w;
        w = root_near(base, dz, w);
        q = from_critical(base, k0, dz, w);
      }
    }
    auto push = [&](cplx zz, cplx ww, cplx qq, double ss) {
      tr.samples.push_back(zz);
      tr.p_values.push_back(qq.real());
      tr.s_values.push_back(ss);
      tr.tangents.push_back(std::conj(ww) / std::abs(ww));
      tr.max_level_drift = std::max(tr.max_level_drift, std::abs(qq.imag()));
    };
    push(base + dz, w, q, s);

    const double near = 1e-3 * diam;
    int base_id = origin;
    bool left_origin = origin < 0;
    double h = std::min(0.25 * dist_critical(base, dz), opt.max_step_frac * diam);
    for (int step = 0;; ++step) {
      if (step > opt.max_steps) fail(ErrorCode::StepCollapse, "trajectory exceeded the step budget");
      h = std::min(h, std::min(0.25 * dist_critical(base, dz), opt.max_step_frac * diam));
      if (h < 1e-14 * diam) fail(ErrorCode::StepCollapse, "step size collapsed");
      cplx dn, wn, qn;
      double grow;
      if (!rk_step(base, dz, w, q, h, dn, wn, qn, grow)) {
        h *= grow;
        continue;
      }
      const double ds = h;
      const cplx zn = base + dn;

      if (!left_origin && std::abs((base - crit[origin].z) + dn) > 10.0 * merge) left_origin = true;
      int hit = -1;
      for (std::size_t i = 0; i < crit.size(); ++i) {
        if (static_cast<int>(i) == origin && !left_origin) continue;
        if (std::abs((base - crit[i].z) + dn) < merge) {
          hit = static_cast<int>(i);
          break;
        }
      }
      if (hit >= 0) {
        push(zn, wn, qn, s + ds);
        const CriticalPoint& c = crit[hit];
        const cplx d = (base - c.z) + dn;
        const cplx qe = qn - from_critical(c.z, c.order, d, wn);
        tr.samples.push_back(c.z);
        tr.p_values.push_back(qe.real());
        tr.s_values.push_back(s + ds + std::abs(d));
        // arrival tangent: reverse of the nearest critical direction at the target
        const std::vector<double> dirs = critical_directions(qd, c.z);
        const cplx u = d / std::abs(d);
        double best = dirs.front();
        for (double a : dirs)
          if (std::abs(std::polar(1.0, a) - u) < std::abs(std::polar(1.0, best) - u)) best = a;
        tr.tangents.push_back(-std::polar(1.0, best));
        tr.max_level_drift = std::max(tr.max_level_drift, std::abs(qe.imag()));
        tr.termination = Termination::CriticalPoint;
        tr.target = hit;
        return tr;
      }
      if (!on_real_start && zn.imag() < kGlueTol * clearance_scale(qd)) {
        // land on the axis by linear interpolation
        const cplx z0 = base + dz;
        const double t = z0.imag() / (z0.imag() - zn.imag());
        const cplx dr = dz + t * (dn - dz);
        const cplx wr = root_near(base, dr, w);
        push(cplx((base + dr).real(), 0.0), wr, q + chord(base, dz, w, dr), s + t * ds);
        tr.termination = Termination::RealAxis;
        return tr;
      }
      if (std::abs(zn - center) > esc) {
        push(zn, wn, qn, s + ds);
        tr.termination = Termination::Escaped;
        return tr;
      }
      dz = dn;
      w = wn;
      q = qn;
      s += ds;
      push(zn, w, q, s);
      h *= std::max(0.2, grow);

      // rebase: onto a critical point we are approaching, or off the one we left
      int closest = -1;
      for (std::size_t i = 0; i < crit.size(); ++i)
        if (static_cast<int>(i) != base_id && std::abs((base - crit[i].z) + dz) < near &&
            (static_cast<int>(i) != origin || left_origin))
          closest = static_cast<int>(i);
      if (closest >= 0) {
        dz = (base - crit[closest].z) + dz;
        base = crit[closest].z;
        base_id = closest;
      } else if (base_id >= 0 && std::abs(dz) > 2.0 * near) {
        base += dz;
        dz = 0.0;
        base_id = -1;
      }
    }
  }
};

int direction_index(const std::vector<double>& dirs, cplx tangent_out) {
  int best = 0;
  for (std::size_t i = 1; i < dirs.size(); ++i)
    if (std::abs(std::polar(1.0, dirs[i]) - tangent_out) < std::abs(std::polar(1.0, dirs[best]) - tangent_out))
      best = static_cast<int>(i);
  return best;
}

double min_distance(const std::vector<cplx>& a, const std::vector<cplx>& b, const std::vector<cplx>& shared,
                    double exclude) {
  double m = std::numeric_limits<double>::infinity();
  auto excluded = [&](cplx z) {
    for (const cplx& c : shared)
      if (std::abs(z - c) < exclude) return true;
    return false;
  };
  for (const cplx& p : a) {
    if (excluded(p)) continue;
    for (const cplx& q : b) {
      if (excluded(q)) continue;
      m = std::min(m, std::abs(p - q));
    }
  }
  return m;
}

}  // namespace

std::vector<CriticalPoint> critical_points(const QuadraticDifferential& qd) {
  std::vector<CriticalPoint> out;
  const auto& cancelled = qd.cancelled_anchors();
  for (std::size_t j = 0; j < qd.anchors().size(); ++j) {
    if (std::find(cancelled.begin(), cancelled.end(), static_cast<int>(j)) != cancelled.end()) continue;
    CriticalPoint c;
    c.z = qd.anchors()[j];
    c.order = -1;
    c.anchor = static_cast<int>(j);
    out.push_back(c);
  }
  const double tol = 1e-12 * std::max(1.0, qd.anchors().diameter());
  for (const auto& [z, m] : qd.zeros()) {
    CriticalPoint c;
    c.z = z;
    c.order = m;
    c.on_real = std::abs(z.imag()) <= tol;
    if (c.on_real) c.z = cplx(z.real(), 0.0);
    if (!c.on_real && m % 2 == 0) {
      c.level = level_of(qd, z);
      c.level_zero = c.level < 1e-7 * std::max(1.0, qd.anchors().diameter());
    }
    out.push_back(c);
  }
  return out;
}

std::vector<double> critical_directions(const QuadraticDifferential& qd, cplx p) {
  const std::vector<CriticalPoint> cps = critical_points(qd);
  const double tol = 1e-9 * std::max(1.0, qd.anchors().diameter());
  for (const CriticalPoint& c : cps) {
    if (std::abs(c.z - p) > tol) continue;
    const cplx C = leading_coefficient(qd, c.z, c.order);
    const int n = c.order + 2;
    std::vector<double> dirs;
    for (int k = 0; k < n; ++k) dirs.push_back(std::remainder((-std::arg(C) + 2.0 * kPi * k) / n, 2.0 * kPi));
    return dirs;
  }
  fail(ErrorCode::NotCritical, "point is neither a pole nor a zero of Q");
}

Trajectory trace_trajectory(const QuadraticDifferential& qd, cplx start, double dir, const TraceOptions& opt) {
  Tracer t(qd, opt);
  if (t.match_critical(start) < 0) {
    const cplx v = qd.Q(start) * std::polar(1.0, 2.0 * dir);
    if (std::abs(v.imag()) > 1e-6 * std::abs(v) || v.real() <= 0.0)
      fail(ErrorCode::InvalidInput, "direction is not horizontal at the start point");
  }
  return t.trace(start, dir);
}

CriticalGraph build_critical_graph(const QuadraticDifferential& qd, const TraceOptions& opt) {
  Tracer tracer(qd, opt);
  CriticalGraph g;
  g.vertices = tracer.crit;
  g.diameter = tracer.diam;
  const std::size_t nv = g.vertices.size();

  struct Half {
    int vertex, dir;
    Trajectory tr;
    int arrival = -1;
  };
  std::vector<Half> halves;
  std::vector<std::vector<double>> dirs(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    dirs[i] = critical_directions(qd, g.vertices[i].z);
    for (std::size_t k = 0; k < dirs[i].size(); ++k) {
      if (g.vertices[i].on_real && std::sin(dirs[i][k]) < 1e-6) continue;  // the axis itself is adjoined
      halves.push_back({static_cast<int>(i), static_cast<int>(k), {}, -1});
    }
  }
  std::vector<std::future<Trajectory>> jobs;
  for (const Half& h : halves)
    jobs.push_back(std::async(std::launch::async,
                              [&tracer, &g, &dirs, h] { return tracer.trace(g.vertices[h.vertex].z, dirs[h.vertex][h.dir]); }));
  for (std::size_t i = 0; i < halves.size(); ++i) {
    halves[i].tr = jobs[i].get();
    const Trajectory& tr = halves[i].tr;
    if (tr.termination == Termination::CriticalPoint)
      halves[i].arrival = direction_index(dirs[tr.target], -tr.tangents.back());
  }

  std::map<std::pair<int, int>, int> by_start;
  for (std::size_t i = 0; i < halves.size(); ++i) by_start[{halves[i].vertex, halves[i].dir}] = static_cast<int>(i);

  g.incidence.assign(nv, {});
  std::vector<bool> used(halves.size(), false);
  for (std::size_t i = 0; i < halves.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    Half& a = halves[i];
    Trajectory edge;
    if (a.tr.termination == Termination::CriticalPoint) {
      auto it = by_start.find({a.tr.target, a.arrival});
      if (it == by_start.end() || used[it->second])
        fail(ErrorCode::GraphInconsistency, "trajectory arrives along a direction with no partner");
      Half& b = halves[it->second];
      if (b.tr.termination != Termination::CriticalPoint || b.tr.target != a.vertex || b.arrival != a.dir)
        fail(ErrorCode::GraphInconsistency, "the two halves of a critical trajectory disagree");
      used[it->second] = true;
      // stitch at the midpoint of p
      const double Pa = a.tr.p_values.back(), Pb = b.tr.p_values.back();
      const double P = 0.5 * (Pa + Pb);
      edge.origin = a.vertex;
      edge.target = b.vertex;
      edge.termination = Termination::CriticalPoint;
      std::size_t ia = 0;
      while (ia + 1 < a.tr.samples.size() && a.tr.p_values[ia + 1] <= 0.5 * Pa) ++ia;
      std::size_t ib = 0;
      while (ib + 1 < b.tr.samples.size() && b.tr.p_values[ib + 1] < 0.5 * Pb) ++ib;
      for (std::size_t k = 0; k <= ia; ++k) {
        edge.samples.push_back(a.tr.samples[k]);
        edge.p_values.push_back(a.tr.p_values[k]);
        edge.s_values.push_back(a.tr.s_values[k]);
        edge.tangents.push_back(a.tr.tangents[k]);
      }
      const double S =
          a.tr.s_values[ia] + tracer.arc_gap(a.tr.samples[ia], a.tr.tangents[ia], b.tr.samples[ib]) + b.tr.s_values[ib];
      for (std::size_t k = ib + 1; k-- > 0;) {
        edge.samples.push_back(b.tr.samples[k]);
        edge.p_values.push_back(P - b.tr.p_values[k]);
        edge.s_values.push_back(S - b.tr.s_values[k]);
        edge.tangents.push_back(-b.tr.tangents[k]);
      }
      edge.max_level_drift = std::max(a.tr.max_level_drift, b.tr.max_level_drift);
    } else {
      edge = a.tr;
    }
    edge.level_zero = g.vertices[a.vertex].level_zero;
    if (edge.level_zero && edge.termination == Termination::CriticalPoint) edge.geometry = tracer.edge_geometry(edge);
    const int id = static_cast<int>(g.edges.size());
    g.incidence[edge.origin].push_back(id);
    if (edge.termination == Termination::CriticalPoint) g.incidence[edge.target].push_back(id);
    if (edge.level_zero && edge.termination == Termination::Escaped)
      fail(ErrorCode::GraphInconsistency, "a zero-level trajectory escaped to infinity");
    g.edges.push_back(std::move(edge));
  }

  // valences
  for (std::size_t i = 0; i < nv; ++i) {
    const CriticalPoint& c = g.vertices[i];
    const std::size_t expected = c.on_real ? static_cast<std::size_t>(c.order / 2) : static_cast<std::size_t>(c.order + 2);
    if (g.incidence[i].size() != expected)
      fail(ErrorCode::GraphInconsistency, "valence mismatch at a critical point");
  }

  // forest check on the zero level with the real axis collapsed to one vertex
  std::vector<int> parent(nv + 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  auto node = [&](int v) { return g.vertices[v].on_real ? static_cast<int>(nv) : v; };
  g.cycles = 0;
  for (const Trajectory& e : g.edges) {
    if (!e.level_zero) continue;
    const int u = node(e.origin);
    const int v = e.termination == Termination::CriticalPoint ? node(e.target) : static_cast<int>(nv);
    const int ru = find(u), rv = find(v);
    if (ru == rv)
      ++g.cycles;
    else
      parent[ru] = rv;
  }
  if (g.cycles > 0) fail(ErrorCode::GraphInconsistency, "the zero-level graph contains a cycle");

  // smallest gap between distinct zero-level edges away from shared vertices
  g.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (!g.edges[i].level_zero) continue;
    for (std::size_t j = i + 1; j < g.edges.size(); ++j) {
      if (!g.edges[j].level_zero) continue;
      std::vector<cplx> shared;
      for (const Trajectory* e : {&g.edges[i], &g.edges[j]}) {
        shared.push_back(e->samples.front());
        shared.push_back(e->samples.back());
      }
      g.min_gap = std::min(g.min_gap, min_distance(g.edges[i].samples, g.edges[j].samples, shared, 0.05 * g.diameter));
    }
  }
  return g;
}

ZSSpectrum extract_zs_spectrum(const CriticalGraph& graph) {
  ZSSpectrum sp;
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const Trajectory& e = graph.edges[i];
    if (!e.level_zero) continue;
    bool on_axis = true;
    for (const cplx& z : e.samples) on_axis = on_axis && std::abs(z.imag()) < kGlueTol;
    if (on_axis) continue;
    Arc a;
    a.samples = e.samples;
    arcs.push_back(std::move(a));
    sp.contour.arcs.push_back(e.geometry ? e.geometry : make_hermite(e.s_values, e.samples, e.tangents));
    sp.edge_of_arc.push_back(static_cast<int>(i));
    const int o0 = graph.vertices[e.origin].order;
    const int o1 = e.termination == Termination::CriticalPoint ? graph.vertices[e.target].order : 0;
    sp.endpoint_order.emplace_back(o0, o1);
  }
  if (arcs.empty()) fail(ErrorCode::DegenerateSpectrum, "the critical graph has no arcs off the real axis");
  sp.continuum = make_continuum(std::move(arcs));
  sp.min_gap = graph.min_gap;
  return sp;
}

double ZSMeasure::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double ZSMeasure::intensity() const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += 2.0 * nodes[i].imag() * weights[i];
  return s;
}

cplx ZSMeasure::cauchy(cplx z) const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    s += weights[i] * (1.0 / (std::conj(nodes[i]) - z) - 1.0 / (nodes[i] - z));
  return kI * s;
}

ZSMeasure zs_measure(const QuadraticDifferential& qd, const ZSSpectrum& spectrum, int panels, int order) {
  ZSMeasure m;
  const GaussRule& g = gauss_legendre(order);
  for (std::size_t a = 0; a < spectrum.contour.arcs.size(); ++a) {
    const ArcGeometry& arc = *spectrum.contour.arcs[a];
    for (int p = 0; p < panels; ++p) {
      const double t0 = static_cast<double>(p) / panels, h = 0.5 / panels;
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double tau = t0 + h * (1.0 + g.x[i]);
        const cplx z = arc.point(tau);
        const double rho = std::abs(qd.sqrt_main(z)) / kPi;
        m.nodes.push_back(z);
        m.density.push_back(rho);
        m.weights.push_back(rho * std::abs(arc.deriv(tau)) * h * g.w[i]);
        m.arc.push_back(static_cast<int>(a));
      }
    }
  }
  return m;
}

}  // namespace zs
