#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "zsspec/geom.hpp"
#include "zsspec/numeric.hpp"

namespace zs {

/// Smooth parametrized arc. The parameter tau in [0, 1] is cosine-clustered:
/// a native parameter t = (1 - cos(pi tau))/2 is used internally, so arc length
/// grows like tau^2 at both ends. Square-root endpoint behaviour then becomes
/// analytic in tau.
class ArcGeometry {
 public:
  virtual ~ArcGeometry() = default;
  virtual cplx point(double tau) const = 0;
  virtual cplx deriv(double tau) const = 0;

  cplx start() const { return point(0.0); }
  cplx finish() const { return point(1.0); }
  double length() const;
  /// Polyline with n+1 samples at uniform tau (hence clustered at the ends).
  Arc sample(int n = 256) const;
};

using ArcPtr = std::shared_ptr<const ArcGeometry>;

inline double cluster(double tau) {
  const double s = std::sin(0.5 * kPi * tau);
  return s * s;
}
/// 1 - cluster(tau) without cancellation near tau = 1.
inline double cluster_comp(double tau) {
  const double s = std::sin(0.5 * kPi * (1.0 - tau));  // 1 - tau is exact for tau >= 1/2
  return s * s;
}
inline double cluster_deriv(double tau) { return 0.5 * kPi * std::sin(kPi * tau); }

ArcPtr make_segment(cplx a, cplx b);
/// Circular arc from a to b; bulge is the signed sagitta divided by half the
/// chord (0 gives the straight segment, positive bulges to the left of a->b).
ArcPtr make_circular_arc(cplx a, cplx b, double bulge);
/// Natural cubic spline through the points in chord-length parametrization.
ArcPtr make_spline(const std::vector<cplx>& points);
/// Piecewise cubic Hermite arc through samples z_k at arc lengths s_k with
/// unit tangents t_k. Interpolation happens in tau, which keeps trajectories
/// ending at simple poles or zeros analytic.
ArcPtr make_hermite(const std::vector<double>& s, const std::vector<cplx>& z, const std::vector<cplx>& t);

/// Piecewise Chebyshev interpolant of f on [0, 1] in tau. Panels are bisected
/// until the trailing coefficients fall below tol * max|f|.
ArcPtr make_chebyshev_arc(const std::function<cplx(double)>& f, double tol = 1e-13, int order = 24);

/// z -> scale * z + shift applied to an arc.
ArcPtr make_affine(ArcPtr base, cplx scale, cplx shift);
/// base + eps * sin^2(pi tau) * n(tau), with n the left unit normal. The ends stay fixed.
ArcPtr make_displaced(ArcPtr base, double eps);

/// A poly-continuum given by smooth arcs.
struct Contour {
  std::vector<ArcPtr> arcs;

  PolyContinuum continuum(int samples_per_arc = 256, double glue_tol = kGlueTol) const;
  double diameter() const;
  Contour affine(cplx scale, cplx shift) const;
};

/// Arcs from a configuration: two points give a segment, more give a spline.
Contour contour_from_polylines(const std::vector<std::vector<cplx>>& polylines);

}  // namespace zs
