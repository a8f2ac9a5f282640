#pragma once

#include <string>
#include <vector>

#include "zsspec/contour.hpp"
#include "zsspec/equilibrium.hpp"
#include "zsspec/geom.hpp"

namespace zs {

/// One spline arc of a candidate: from an anchor to another anchor, or to a
/// free foot on the real axis (to == kGround).
struct ArcTemplate {
  static constexpr int kGround = -1;
  int from = 0;
  int to = kGround;
};

struct Topology {
  std::vector<ArcTemplate> arcs;

  /// Connectivity of any contour realizing the topology (components in K and R).
  ConnectivityMatrix connectivity(std::size_t n_anchors) const;
  std::string to_string() const;
};

/// Topologies in which every anchor is grounded or joined to exactly one
/// other anchor, restricted to those whose connectivity dominates M.
std::vector<Topology> class_topologies(const AnchorSet& E, const ConnectivityMatrix& M);

/// Parameters per arc: the foot abscissa (grounded arcs only), then n_ctrl
/// offsets of interior spline points normal to the chord.
struct SplineClass {
  AnchorSet E;
  Topology topology;
  int n_ctrl = 3;

  std::size_t dimension() const;
  Contour contour(const std::vector<double>& x) const;
  /// Parameters reproducing the given polylines (one per template arc) as closely as the spline allows.
  std::vector<double> fit(const std::vector<std::vector<cplx>>& polylines) const;
  /// Straight arcs: grounded arcs drop vertically.
  std::vector<double> straight() const;
};

struct DescentOptions {
  int n_ctrl = 3;
  int max_iter = 80;
  double grad_tol = 1e-6;     // on |grad I| * diameter
  double fd_frac = 1e-3;      // finite-difference step / diameter
  double f_tol = 1e-10;       // stop when an iteration gains less than this
  EquilibriumOptions eq = EquilibriumOptions::light();
  EquilibriumOptions final_eq{};
  int grid_res = 512;
};

struct DescentResult {
  Topology topology;
  std::vector<double> params;
  Contour contour;
  PolyContinuum continuum;
  double intensity = 0.0;  // from the final, full-resolution solve
  EnergyReport report;
  int iterations = 0;
  int evaluations = 0;
  int rejected = 0;        // trial points outside the class
  bool converged = false;
  std::vector<double> history;  // working-resolution intensity per iteration
};

/// Quasi-Newton descent of the intensity over one topology starting at x0.
/// ClassEscape if x0 is outside the class; NoConvergence if the budget runs
/// out before the gradient test passes (unless allow_budget is set).
DescentResult descend(const SplineClass& cls, const ConnectivityMatrix& M, std::vector<double> x0,
                      const DescentOptions& opt = {}, bool allow_budget = true);

/// Descent from seed polylines (one per template arc of topo).
DescentResult minimize_in_class(const AnchorSet& E, const ConnectivityMatrix& M, const Topology& topo,
                                const std::vector<std::vector<cplx>>& seed, const DescentOptions& opt = {});

/// Descent over every topology of class_topologies from straight seeds,
/// returning the lowest.
DescentResult minimize_in_class(const AnchorSet& E, const ConnectivityMatrix& M, const DescentOptions& opt = {});

}  // namespace zs
