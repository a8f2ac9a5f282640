#include "zsspec/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "zsspec/errors.hpp"

namespace zs {

std::string to_string(Side s) { return s == Side::Plus ? "plus" : "minus"; }

std::string to_string(TrajectoryEnd e) {
  switch (e) {
    case TrajectoryEnd::Hit: return "hit";
    case TrajectoryEnd::Escaped: return "escaped";
    case TrajectoryEnd::Stagnation: return "stagnation";
    case TrajectoryEnd::StepLimit: return "step-limit";
  }
  return "?";
}

bool OrthogonalTrajectory::hits() const {
  if (end == TrajectoryEnd::Hit) return true;
  return std::any_of(branches.begin(), branches.end(), [](const OrthogonalTrajectory& b) { return b.hits(); });
}

namespace {

double support_diameter(const EquilibriumMeasure& m) {
  double d = m.contour.diameter();
  // include the mirror image so that short horizontal pieces get a sensible scale
  for (const ArcPtr& a : m.contour.arcs) d = std::max(d, 2.0 * std::max(a->start().imag(), a->finish().imag()));
  return std::max(d, 1e-12);
}

double V(const QuasimomentumField& f, cplx z) { return f.measure().field.value(z).imag() - f.G(z); }

struct Frame {
  cplx z, t, n;  // point, unit tangent, left unit normal
};

Frame frame_at(const ArcGeometry& g, double tau) {
  const cplx d = g.deriv(tau);
  const cplx t = d / std::abs(d);
  return {g.point(tau), t, kI * t};
}

struct Derivs {
  double plus, minus, pv;  // normal derivatives and Re[t (P'+ + P'-)]
};

Derivs normal_derivatives(const QuasimomentumField& f, const Frame& fr, double h) {
  // V vanishes on the arc, so the one-sided Richardson form needs only two offsets
  auto one_side = [&](cplx n) {
    const double f1 = V(f, fr.z + h * n), f2 = V(f, fr.z + 2.0 * h * n);
    return (4.0 * f1 - f2) / (2.0 * h);
  };
  auto sum = [&](double k) { return f.dP(fr.z + k * h * fr.n) + f.dP(fr.z - k * h * fr.n); };
  const cplx avg = 2.0 * sum(1.0) - sum(2.0);
  return {one_side(fr.n), one_side(-fr.n), (fr.t * avg).real()};
}

// Polylines of all arcs, used for proximity tests.
std::vector<Arc> polylines(const Contour& c, int n = 256) {
  std::vector<Arc> out;
  for (const ArcPtr& a : c.arcs) out.push_back(a->sample(n));
  return out;
}

bool near_other_arcs(const std::vector<Arc>& lines, int self, cplx z, double r) {
  for (std::size_t k = 0; k < lines.size(); ++k)
    if (static_cast<int>(k) != self && distance_to(lines[k], z) < r) return true;
  return false;
}

MismatchProfile profile_impl(const EquilibriumMeasure& m, int arc, const SPropertyOptions& opt,
                             const std::vector<Arc>& lines, const std::vector<cplx>& avoid, std::size_t* excluded) {
  if (arc < 0 || arc >= static_cast<int>(m.contour.arcs.size())) fail(ErrorCode::InvalidInput, "arc index out of range");
  if (opt.samples_per_arc < 1 || !(opt.h_frac > 0.0)) fail(ErrorCode::InvalidInput, "invalid S-property options");
  const double D = support_diameter(m);
  const double h = opt.h_frac * D;
  const ArcGeometry& g = *m.contour.arcs[arc];
  QuasimomentumField f(m);
  MismatchProfile p;
  p.arc = arc;
  // arc length by Gauss on the clustered parameter
  const GaussRule& rule = gauss_legendre(20);
  auto length_to = [&](double tau) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.x.size(); ++q)
      s += 0.5 * tau * rule.w[q] * std::abs(g.deriv(0.5 * tau * (1.0 + rule.x[q])));
    return s;
  };
  const double margin = std::clamp(opt.tau_margin, 0.0, 0.49);
  for (int k = 0; k < opt.samples_per_arc; ++k) {
    const double tau = margin + (1.0 - 2.0 * margin) * (k + 0.5) / opt.samples_per_arc;
    const Frame fr = frame_at(g, tau);
    bool skip = fr.z.imag() < 10.0 * h || near_other_arcs(lines, arc, fr.z, 20.0 * h);
    for (const cplx& a : avoid) skip = skip || std::abs(fr.z - a) < 0.05 * D;
    if (skip) {
      if (excluded) ++*excluded;
      continue;
    }
    const Derivs d = normal_derivatives(f, fr, h);
    p.tau.push_back(tau);
    p.s.push_back(length_to(tau));
    p.points.push_back(fr.z);
    p.normal_plus.push_back(d.plus);
    p.normal_minus.push_back(d.minus);
    p.mismatch.push_back(d.plus - d.minus);
    p.u_tilde_derivative.push_back(-0.5 * d.pv);
  }
  return p;
}

SPropertyReport s_property_impl(const EquilibriumMeasure& m, const SPropertyOptions& opt,
                                const std::vector<cplx>& avoid) {
  SPropertyReport r;
  if (m.empty()) return r;
  const std::vector<Arc> lines = polylines(m.contour);
  for (std::size_t a = 0; a < m.contour.arcs.size(); ++a) {
    r.profiles.push_back(profile_impl(m, static_cast<int>(a), opt, lines, avoid, &r.excluded));
    for (double v : r.profiles.back().mismatch) {
      r.residual = std::max(r.residual, std::abs(v));
      ++r.samples;
    }
  }
  if (r.samples == 0) fail(ErrorCode::TooCloseToEndpoint, "every S-property sample lies in an excluded zone");
  return r;
}

// Nearest point of the support: (arc, tau).
std::pair<int, double> locate(const EquilibriumMeasure& m, cplx z) {
  int best_arc = -1;
  double best_tau = 0.0, best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < m.contour.arcs.size(); ++a) {
    const ArcGeometry& g = *m.contour.arcs[a];
    const int n = 400;
    for (int k = 0; k <= n; ++k) {
      const double d = std::abs(g.point(static_cast<double>(k) / n) - z);
      if (d < best) {
        best = d;
        best_arc = static_cast<int>(a);
        best_tau = static_cast<double>(k) / n;
      }
    }
  }
  if (best_arc < 0) fail(ErrorCode::EmptyContinuum, "empty support");
  const ArcGeometry& g = *m.contour.arcs[best_arc];
  double lo = std::max(0.0, best_tau - 1.0 / 400), hi = std::min(1.0, best_tau + 1.0 / 400);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (std::abs(g.point(a) - z) < std::abs(g.point(b) - z))
      hi = b;
    else
      lo = a;
  }
  return {best_arc, 0.5 * (lo + hi)};
}

struct Segment2 {
  cplx a, b;
  double xmin, xmax, ymin, ymax;
};

std::vector<Segment2> segments_of(const PolyContinuum& K) {
  std::vector<Segment2> out;
  for (const Arc& arc : K.arcs) {
    if (arc.samples.size() == 1) {
      const cplx p = arc.samples[0];
      out.push_back({p, p, p.real(), p.real(), p.imag(), p.imag()});
    }
    for (std::size_t i = 0; i + 1 < arc.samples.size(); ++i) {
      const cplx a = arc.samples[i], b = arc.samples[i + 1];
      out.push_back({a, b, std::min(a.real(), b.real()), std::max(a.real(), b.real()), std::min(a.imag(), b.imag()),
                     std::max(a.imag(), b.imag())});
    }
  }
  return out;
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// First point of [p, q] within tol of the segment set, if any.
std::optional<cplx> first_contact(const std::vector<Segment2>& segs, cplx p, cplx q, double tol) {
  const double xmin = std::min(p.real(), q.real()) - tol, xmax = std::max(p.real(), q.real()) + tol;
  const double ymin = std::min(p.imag(), q.imag()) - tol, ymax = std::max(p.imag(), q.imag()) + tol;
  double best_t = 2.0;
  for (const Segment2& s : segs) {
    if (s.xmax < xmin || s.xmin > xmax || s.ymax < ymin || s.ymin > ymax) continue;
    const cplx r = q - p, e = s.b - s.a;
    const double den = cross(r, e);
    if (den != 0.0) {
      const double t = cross(s.a - p, e) / den, u = cross(s.a - p, r) / den;
      if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) best_t = std::min(best_t, t);
    }
    if (segment_distance(q, s.a, s.b) < tol) best_t = std::min(best_t, 1.0);
    if (segment_distance(p, s.a, s.b) < tol) best_t = 0.0;
  }
  if (best_t > 1.0) return std::nullopt;
  return p + best_t * (q - p);
}

struct AscentContext {
  const QuasimomentumField* f;
  std::vector<Segment2> target;
  std::vector<Arc> support;
  cplx centre;
  double D;      // length scale
  double R_esc;  // escape radius around centre
  OrthoOptions opt;
};

AscentContext make_context(const QuasimomentumField& f, const PolyContinuum* target, const OrthoOptions& opt) {
  AscentContext c;
  c.f = &f;
  c.opt = opt;
  const EquilibriumMeasure& m = f.measure();
  c.support = polylines(m.contour, 128);
  double xmin = 1e300, xmax = -1e300, ymax = 0.0;
  auto take = [&](cplx z) {
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymax = std::max(ymax, z.imag());
  };
  for (const Arc& a : c.support)
    for (const cplx& z : a.samples) take(z);
  if (target) {
    c.target = segments_of(*target);
    for (const Arc& a : target->arcs)
      for (const cplx& z : a.samples) take(z);
  }
  if (xmin > xmax) fail(ErrorCode::EmptyContinuum, "nothing to trace against");
  c.D = std::max(std::hypot(xmax - xmin, 2.0 * ymax), 1e-12);
  c.centre = cplx(0.5 * (xmin + xmax), 0.5 * ymax);
  c.R_esc = opt.escape_frac * c.D;
  return c;
}

double dist_support(const AscentContext& c, cplx z) {
  double d = std::numeric_limits<double>::infinity();
  for (const Arc& a : c.support) d = std::min(d, distance_to(a, z));
  return d;
}

cplx ascent_dir(const QuasimomentumField& f, cplx z) {
  const cplx d = f.dP(z);
  const double a = std::abs(d);
  if (a == 0.0) return 0.0;
  return kI * std::conj(d) / a;
}

OrthogonalTrajectory ascend(const AscentContext& c, cplx z0, std::vector<cplx> prefix, bool explore) {
  OrthogonalTrajectory tr;
  tr.points = std::move(prefix);
  tr.points.push_back(z0);
  const QuasimomentumField& f = *c.f;
  const double tol_hit = c.opt.hit_frac * c.D;
  cplx z = z0;
  for (int step = 0; step < c.opt.max_steps; ++step) {
    if (std::abs(z - c.centre) > c.R_esc) {
      tr.end = TrajectoryEnd::Escaped;
      return tr;
    }
    const double h = std::clamp(0.5 * dist_support(c, z), 1e-7 * c.D, c.opt.step_frac * c.D);
    cplx zn;
    try {
      const cplx k1 = ascent_dir(f, z);
      const cplx k2 = ascent_dir(f, z + 0.5 * h * k1);
      const cplx k3 = ascent_dir(f, z + 0.5 * h * k2);
      const cplx k4 = ascent_dir(f, z + h * k3);
      zn = z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const Error&) {
      tr.end = TrajectoryEnd::StepLimit;
      return tr;
    }
    if (!c.target.empty()) {
      if (auto hit = first_contact(c.target, z, zn, tol_hit)) {
        tr.points.push_back(*hit);
        tr.end = TrajectoryEnd::Hit;
        tr.hit_point = *hit;
        return tr;
      }
    }
    z = zn;
    tr.points.push_back(z);
    const cplx dp = f.dP(z);
    if (std::abs(dp) < 1e-2 * std::max(1.0, std::abs(f.measure().field.deriv(z)))) {
      // close to a zero of P': polish and decide whether the ascent stalls there
      cplx s = z;
      bool ok = true;
      for (int it = 0; it < 30; ++it) {
        const cplx d2 = f.d2P(s);
        if (d2 == 0.0) {
          ok = false;
          break;
        }
        const cplx ds = f.dP(s) / d2;
        s -= ds;
        if (std::abs(ds) < 1e-14 * c.D) break;
      }
      if (ok && std::abs(f.dP(s)) < 1e-10 && std::abs(s - z) < std::max(c.opt.stagnation_frac, 1e-3) * c.D) {
        tr.end = TrajectoryEnd::Stagnation;
        tr.stagnation = s;
        tr.points.push_back(s);
        if (explore) {
          // ascent directions of V = V(s) + Im(c (z-s)^2 / 2)
          const cplx c2 = f.d2P(s);
          const double phi = 0.5 * (0.5 * kPi - std::arg(c2));
          const double r = 1e-3 * c.D;
          for (int k = 0; k < 2; ++k) {
            const cplx start = s + r * std::polar(1.0, phi + k * kPi);
            tr.branches.push_back(ascend(c, start, {s}, false));
          }
        }
        return tr;
      }
    }
  }
  tr.end = TrajectoryEnd::StepLimit;
  return tr;
}

}  // namespace

MismatchProfile mismatch_profile(const EquilibriumMeasure& m, int arc, const SPropertyOptions& opt) {
  return profile_impl(m, arc, opt, polylines(m.contour), {}, nullptr);
}

SPropertyReport s_property(const EquilibriumMeasure& m, const SPropertyOptions& opt) {
  return s_property_impl(m, opt, {});
}

double s_property_residual(const EquilibriumMeasure& m, const SPropertyOptions& opt) {
  return s_property(m, opt).residual;
}

double s_property_residual(const QuadraticDifferential& qd, const ZSSpectrum& spectrum, const EquilibriumMeasure& m,
                           const SPropertyOptions& opt) {
  if (spectrum.contour.arcs.size() != m.contour.arcs.size())
    fail(ErrorCode::InvalidInput, "measure was not solved on this spectrum");
  std::vector<cplx> avoid;
  for (const auto& [z, mult] : qd.zeros())
    if (z.imag() > 0.0) avoid.push_back(z);
  return s_property_impl(m, opt, avoid).residual;
}

SideReport dominant_side(const EquilibriumMeasure& m, cplx z_on_K, double noise_floor, bool throw_ambiguous) {
  const auto [arc, tau] = locate(m, z_on_K);
  if (tau < 1e-3 || tau > 1.0 - 1e-3) fail(ErrorCode::TooCloseToEndpoint, "point is at an arc end");
  const double h = SPropertyOptions{}.h_frac * support_diameter(m);
  const Derivs d = normal_derivatives(QuasimomentumField(m), frame_at(*m.contour.arcs[arc], tau), h);
  SideReport r;
  r.arc = arc;
  r.tau = tau;
  r.mismatch = d.plus - d.minus;
  r.mismatch_integral = d.pv;
  r.strength = std::abs(r.mismatch);
  r.side = r.mismatch >= 0.0 ? Side::Plus : Side::Minus;
  r.ambiguous = r.strength < noise_floor;
  if (r.ambiguous && throw_ambiguous)
    fail(ErrorCode::AmbiguousSide, "normal derivative mismatch " + std::to_string(r.mismatch) + " below noise floor");
  return r;
}

OrthogonalTrajectory orthogonal_trajectory(const QuasimomentumField& f, cplx z, Side side, const PolyContinuum* target,
                                           const OrthoOptions& opt) {
  const EquilibriumMeasure& m = f.measure();
  const AscentContext c = make_context(f, target, opt);
  if (target && distance_to(*target, z) < opt.hit_frac * c.D) {
    OrthogonalTrajectory tr;
    tr.points = {z};
    tr.end = TrajectoryEnd::Hit;
    tr.hit_point = z;
    return tr;
  }
  const auto [arc, tau] = locate(m, z);
  const Frame fr = frame_at(*m.contour.arcs[arc], tau);
  const cplx n = side == Side::Plus ? fr.n : -fr.n;
  // leave the support along the normal before following the gradient
  const double h0 = 1e-5 * c.D;
  const cplx z1 = fr.z + h0 * n;
  if (!c.target.empty())
    if (auto hit = first_contact(c.target, fr.z, z1, opt.hit_frac * c.D)) {
      OrthogonalTrajectory tr;
      tr.points = {fr.z, *hit};
      tr.end = TrajectoryEnd::Hit;
      tr.hit_point = *hit;
      return tr;
    }
  return ascend(c, z1, {fr.z}, opt.explore_stagnation);
}

OrthogonalTrajectory ascent_from(const QuasimomentumField& f, cplx z, const PolyContinuum* target,
                                 const OrthoOptions& opt) {
  if (!(z.imag() > 0.0)) fail(ErrorCode::InvalidInput, "start point must lie in the upper half-plane");
  const AscentContext c = make_context(f, target, opt);
  return ascend(c, z, {}, opt.explore_stagnation);
}

OrthogonalTrajectory orthogonal_trajectory_strict(const QuasimomentumField& f, cplx z, Side side,
                                                  const PolyContinuum* target, const OrthoOptions& opt) {
  OrthoOptions o = opt;
  o.explore_stagnation = false;
  OrthogonalTrajectory tr = orthogonal_trajectory(f, z, side, target, o);
  if (tr.end == TrajectoryEnd::Stagnation)
    fail(ErrorCode::StalledAtStagnation, "ascent stalled at " + std::to_string(tr.stagnation.real()) + "+" +
                                             std::to_string(tr.stagnation.imag()) + "i");
  return tr;
}

InterceptionReport jenkins_check(const EquilibriumMeasure& ref, const PolyContinuum& K, int n_samples,
                                 const JenkinsOptions& opt) {
  if (n_samples < 1) fail(ErrorCode::InvalidInput, "n_samples must be positive");
  if (ref.empty()) fail(ErrorCode::EmptyContinuum, "reference measure is empty");
  InterceptionReport rep;
  rep.s_residual = s_property_residual(ref);
  rep.either_side = rep.s_residual < opt.s_threshold;
  QuasimomentumField f(ref);
  const double D = support_diameter(ref);

  std::vector<double> len;
  double total = 0.0;
  for (const ArcPtr& a : ref.contour.arcs) {
    len.push_back(a->length());
    total += len.back();
  }
  rep.overall = true;
  for (std::size_t a = 0; a < ref.contour.arcs.size(); ++a) {
    const int n = std::max(1, static_cast<int>(std::lround(n_samples * len[a] / total)));
    const ArcGeometry& g = *ref.contour.arcs[a];
    for (int k = 0; k < n; ++k) {
      // uniform in arc length, away from the ends
      const double u = (k + 0.5) / n;
      const double tau = std::acos(1.0 - 2.0 * u) / kPi;
      InterceptionSample s;
      s.point = g.point(tau);
      s.arc = static_cast<int>(a);
      if (distance_to(K, s.point) < opt.ortho.hit_frac * D) {
        s.hit = true;
        s.hit_point = s.point;
        rep.samples.push_back(std::move(s));
        continue;
      }
      s.side = dominant_side(ref, s.point, opt.noise_floor);
      std::vector<Side> sides;
      if (rep.either_side || s.side.ambiguous)
        sides = {Side::Plus, Side::Minus};
      else
        sides = {s.side.side};
      for (Side sd : sides) {
        s.trajectories.push_back(orthogonal_trajectory(f, s.point, sd, &K, opt.ortho));
        const OrthogonalTrajectory& t = s.trajectories.back();
        if (t.hits()) {
          s.hit = true;
          s.hit_point = t.end == TrajectoryEnd::Hit ? t.hit_point : t.points.back();
          break;
        }
      }
      rep.overall = rep.overall && s.hit;
      rep.samples.push_back(std::move(s));
    }
  }
  return rep;
}

ProbeReport energy_inequality_probe(const AnchorSet& E, const ConnectivityMatrix& M, double reference,
                                    const ContourFamily& family, double lo, double hi, int n, double tol_energy,
                                    const EquilibriumOptions& opt) {
  if (n < 1) fail(ErrorCode::InvalidInput, "probe needs at least one member");
  ProbeReport r;
  r.reference = reference;
  r.min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    ProbePoint p;
    p.theta = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    const Contour K = family(p.theta);
    const PolyContinuum pc = K.continuum();
    if (!class_membership(pc, E, M)) {
      p.in_class = false;
      p.note = to_string(ErrorCode::DeformationLeftClass);
      r.points.push_back(p);
      continue;
    }
    p.intensity = solve_equilibrium(K, {}, opt).intensity();
    p.margin = p.intensity - reference;
    r.min_margin = std::min(r.min_margin, p.margin);
    r.points.push_back(p);
  }
  r.holds = r.min_margin >= -tol_energy;
  return r;
}

SchifferCertificate schiffer_certificate(const EquilibriumMeasure& m, const AnchorSet& E) {
  if (m.empty()) fail(ErrorCode::EmptyContinuum, "empty measure");
  const int N = static_cast<int>(E.size());
  const int r = static_cast<int>(m.field.t.size());
  SchifferCertificate cert;
  cert.degree = 2 * N + r - 2;
  const std::size_t M = static_cast<std::size_t>(4 * (4 * N + 2 * r));
  cert.test_points = M;

  double xmin = 1e300, xmax = -1e300;
  for (const ArcPtr& a : m.contour.arcs)
    for (int k = 0; k <= 64; ++k) {
      const double x = a->point(k / 64.0).real();
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
  for (const cplx& e : E) {
    xmin = std::min(xmin, e.real());
    xmax = std::max(xmax, e.real());
  }
  const double c = 0.5 * (xmin + xmax);
  double R = 0.0;
  for (const cplx& z : m.nodes) R = std::max(R, std::abs(z - c));
  for (const cplx& e : E) R = std::max(R, std::abs(e - c));
  R *= 1.5;

  QuasimomentumField f(m);
  const RealPoly Epoly = E.denominator();
  Eigen::MatrixXcd A(M, cert.degree + 1);
  Eigen::VectorXcd F(M);
  for (std::size_t k = 0; k < M; ++k) {
    const cplx u = std::polar(1.0, 2.0 * kPi * (k + 0.5) / M);
    const cplx x = c + R * u;
    const cplx dphi = m.field.deriv(x), dp = f.dP(x);
    F(k) = polyval(Epoly, x) * (dphi * dphi - dp * dp);
    for (int j = 0; j <= cert.degree; ++j) A(k, j) = std::pow(u, j);
  }
  const Eigen::VectorXcd a = A.colPivHouseholderQr().solve(F);
  const Eigen::VectorXcd misfit = A * a - F;
  cert.residual = misfit.cwiseAbs().maxCoeff() / std::max(F.cwiseAbs().maxCoeff(), 1e-300);

  // sum_j a_j ((x - c)/R)^j expanded in powers of x, highest first
  std::vector<cplx> asc(cert.degree + 1, 0.0);
  for (int j = 0; j <= cert.degree; ++j) {
    // (x - c)^j = sum_i binom(j, i) x^i (-c)^(j-i)
    double binom = 1.0;
    for (int i = 0; i <= j; ++i) {
      asc[i] += a(j) / std::pow(R, j) * binom * std::pow(-c, j - i);
      binom = binom * (j - i) / (i + 1);
    }
  }
  cert.coeffs.assign(asc.rbegin(), asc.rend());
  return cert;
}

Contour displace(const Contour& K, double eps) {
  Contour out;
  for (const ArcPtr& a : K.arcs) out.arcs.push_back(make_displaced(a, eps));
  return out;
}

ContinuityReport continuity_probe(const Contour& K, const std::vector<double>& epsilons, const EquilibriumOptions& opt) {
  ContinuityReport r;
  r.base = solve_equilibrium(K, {}, opt).intensity();
  for (double eps : epsilons) {
    ContinuityRow row;
    row.eps = eps;
    row.intensity = eps == 0.0 ? r.base : solve_equilibrium(displace(K, eps), {}, opt).intensity();
    row.difference = std::abs(row.intensity - r.base);
    r.rows.push_back(row);
  }
  std::vector<ContinuityRow> sorted = r.rows;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.eps > b.eps; });
  r.monotone = true;
  for (std::size_t k = 1; k < sorted.size(); ++k)
    r.monotone = r.monotone && sorted[k].difference < sorted[k - 1].difference;
  return r;
}

RaiseReport raise_probe(const Contour& K, const std::vector<int>& component_arcs, const std::vector<double>& heights,
                        const EquilibriumOptions& opt) {
  RaiseReport r;
  r.heights = heights;
  for (double h : heights) {
    Contour c = K;
    for (int a : component_arcs) {
      if (a < 0 || a >= static_cast<int>(c.arcs.size())) fail(ErrorCode::InvalidInput, "arc index out of range");
      c.arcs[a] = make_affine(c.arcs[a], 1.0, cplx(0.0, h));
    }
    r.intensities.push_back(solve_equilibrium(c, {}, opt).intensity());
  }
  r.increasing = true;
  for (std::size_t k = 1; k < r.intensities.size(); ++k)
    r.increasing = r.increasing && (r.heights[k] > r.heights[k - 1]) == (r.intensities[k] > r.intensities[k - 1]);
  return r;
}

double endpoint_exponent(const EquilibriumMeasure& m, int arc, bool at_start) {
  if (arc < 0 || arc >= static_cast<int>(m.contour.arcs.size())) fail(ErrorCode::InvalidInput, "arc index out of range");
  const ArcGeometry& g = *m.contour.arcs[arc];
  const cplx end = at_start ? g.start() : g.finish();
  const double L = g.length();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    if (m.arc[i] != arc) continue;
    const double r = std::abs(m.nodes[i] - end);
    if (r < 1e-10 * L || r > 1e-4 * L || !(m.density[i] > 0.0)) continue;
    const double x = std::log(r), y = std::log(m.density[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 3) fail(ErrorCode::TooCloseToEndpoint, "too few nodes near the arc end");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace zs
