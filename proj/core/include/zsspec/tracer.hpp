#pragma once

#include <vector>

#include "zsspec/boutroux.hpp"
#include "zsspec/contour.hpp"
#include "zsspec/geom.hpp"

namespace zs {

enum class Termination { RealAxis, CriticalPoint, Escaped };

std::string to_string(Termination t);

/// Horizontal trajectory: a level curve of Im of the integral of sqrt(Q).
struct Trajectory {
  std::vector<cplx> samples;
  std::vector<double> p_values;  // Re of the integral from the origin; Im is held at zero
  std::vector<double> s_values;  // arc length from the origin
  std::vector<cplx> tangents;    // unit tangents at the samples
  int origin = -1;               // critical point id, -1 for a regular start
  Termination termination = Termination::Escaped;
  int target = -1;               // critical point id when termination == CriticalPoint
  double max_level_drift = 0.0;  // max |Im p| along the samples
  bool level_zero = false;       // lies on the zero level set of V
  ArcPtr geometry;               // smooth parametrization (zero-level critical edges)

  double length() const { return s_values.empty() ? 0.0 : s_values.back(); }
};

struct CriticalPoint {
  cplx z;
  int order = 0;      // -1 for a simple pole, m for a zero of multiplicity m
  int anchor = -1;    // anchor index for poles
  bool on_real = false;
  double level = 0.0; // |Im p| relative to the real axis
  bool level_zero = true;
};

struct TraceOptions {
  double tol_traj = 1e-10;     // relative to diam^2 scale of p
  double merge_frac = 1e-5;    // delta_merge / diameter
  double escape_frac = 50.0;   // R_esc / diameter
  double max_step_frac = 0.01; // largest step / diameter
  int max_steps = 400000;
};

/// Poles and zeros of Q in the closed upper half-plane.
std::vector<CriticalPoint> critical_points(const QuadraticDifferential& qd);

/// The k_p+2 directions (angles) of trajectories leaving the critical point p.
std::vector<double> critical_directions(const QuadraticDifferential& qd, cplx p);

/// Traces the trajectory leaving `start` in direction `dir`. `start` is either
/// a critical point (dir from critical_directions) or a regular point.
Trajectory trace_trajectory(const QuadraticDifferential& qd, cplx start, double dir,
                            const TraceOptions& opt = {});

struct CriticalGraph {
  std::vector<CriticalPoint> vertices;
  std::vector<Trajectory> edges;
  std::vector<std::vector<int>> incidence;  // edge ids per vertex
  double min_gap = 0.0;                     // smallest distance between distinct level-zero edges
  int cycles = 0;                           // independent cycles in H with R collapsed
  double diameter = 1.0;
};

/// Traces every critical direction into the upper half-plane, stitches the two
/// halves of each edge, and checks valences and the forest property
/// (GraphInconsistency on failure).
CriticalGraph build_critical_graph(const QuadraticDifferential& qd, const TraceOptions& opt = {});

/// The level-zero part of the critical graph.
struct ZSSpectrum {
  PolyContinuum continuum;
  Contour contour;              // smooth arcs (Hermite in tau), one per edge
  std::vector<int> edge_of_arc;
  std::vector<std::pair<int, int>> endpoint_order;  // (order at start, order at end)
  double min_gap = 0.0;
};

ZSSpectrum extract_zs_spectrum(const CriticalGraph& graph);

struct ZSMeasure {
  std::vector<cplx> nodes;
  std::vector<double> weights;  // measure of each node's share
  std::vector<double> density;  // |sqrt Q| / pi per unit length
  std::vector<int> arc;

  double total() const;
  /// 2 * integral of Im w d rho.
  double intensity() const;
  /// i * integral of (1/(conj w - z) - 1/(w - z)) d rho.
  cplx cauchy(cplx z) const;
};

/// Composite Gauss quadrature in the clustered parameter of each spectrum arc.
ZSMeasure zs_measure(const QuadraticDifferential& qd, const ZSSpectrum& spectrum, int panels = 16,
                     int order = 16);

}  // namespace zs
