#pragma once

#include <optional>
#include <vector>

#include "zsspec/contour.hpp"
#include "zsspec/geom.hpp"
#include "zsspec/numeric.hpp"

namespace zs {

/// Phi(z) = sum_{l=1..r} t_l z^l with t_r > 0.
struct ExternalField {
  std::vector<double> t{1.0};

  ExternalField() = default;
  explicit ExternalField(std::vector<double> coeffs);

  cplx value(cplx z) const;
  cplx deriv(cplx z) const;
  cplx second(cplx z) const;
  bool is_default() const { return t.size() == 1 && t[0] == 1.0; }
  bool operator==(const ExternalField&) const = default;
};

struct EquilibriumOptions {
  int order = 16;          // Gauss points per panel
  int n_base = 8;          // uniform panels per arc in tau
  int n_grade = 10;        // dyadic refinements toward each arc end
  double tol_bc = 1e-8;    // boundary residual at check points
  double cond_threshold = 1e10;

  /// Coarser discretization for descent loops.
  static EquilibriumOptions light() { return {12, 4, 6, 1e-6, 1e10}; }
};

struct EquilibriumPanel {
  int arc = 0;
  double a = 0.0, b = 1.0;  // tau range
  int first = 0;            // index of the first node
  cplx mid;                 // point at the panel centre
  double size = 0.0;        // approximate panel length
};

/// Equilibrium measure d rho = mu(tau) d tau on each arc, stored at Gauss nodes.
struct EquilibriumMeasure {
  Contour contour;
  PolyContinuum support;
  ExternalField field;
  int order = 16;

  std::vector<EquilibriumPanel> panels;
  std::vector<cplx> nodes;
  std::vector<double> tau;
  std::vector<int> arc;
  std::vector<double> mu;       // d rho / d tau
  std::vector<double> weights;  // measure carried by each node
  std::vector<double> density;  // u = d rho / |dw|

  double bc_residual = 0.0;
  double condition = 0.0;
  bool negative_density = false;

  bool empty() const { return nodes.empty(); }
  double total() const;
  /// 2 * integral of Im w d rho.
  double intensity() const;
};

EquilibriumMeasure solve_equilibrium(const Contour& K, const ExternalField& field = {},
                                     const EquilibriumOptions& opt = {});
/// Polyline arcs are turned into splines through their samples.
EquilibriumMeasure solve_equilibrium(const PolyContinuum& K, const ExternalField& field = {},
                                     const EquilibriumOptions& opt = {});

/// G(z) = integral of ln|(z - conj w)/(z - w)| d rho(w); valid on the support too.
double green_potential(const EquilibriumMeasure& m, cplx z);

/// P(z) = Phi(z) - g(z) with Im g = G.
class QuasimomentumField {
 public:
  explicit QuasimomentumField(const EquilibriumMeasure& m);

  cplx P(cplx z) const;
  cplx dP(cplx z) const;
  cplx d2P(cplx z) const;
  double G(cplx z) const { return green_potential(*m_, z); }
  double H(cplx z) const;
  /// g'(z) alone (the Cauchy-type transform of the measure).
  cplx dg(cplx z) const;
  const EquilibriumMeasure& measure() const { return *m_; }

 private:
  const EquilibriumMeasure* m_;
};

QuasimomentumField quasimomentum(const EquilibriumMeasure& m);

struct EnergyReport {
  double I_measure = 0.0;
  double I_residue = 0.0;
  double I_dirichlet = 0.0;
  double I_dirichlet_error = 0.0;  // change against the half-resolution grid
  double res_measure_residue = 0.0;
  double res_measure_dirichlet = 0.0;
  double res_residue_dirichlet = 0.0;
  double bc_residual = 0.0;
  double condition = 0.0;
  std::size_t nodes = 0;
  std::size_t grid_cells = 0;
  std::optional<double> I_phi;
};

/// tol_energy bounds I_dirichlet_error (GridTooCoarse otherwise).
EnergyReport intensity_report(const EquilibriumMeasure& m, int grid_res = 512, double tol_energy = 1e-2);

/// 2 * sum_l t_l * integral of Im(w^l) d rho, cross-checked with the contour form at infinity.
double intensity_phi(const EquilibriumMeasure& m, const ExternalField& field);

struct StagnationSet {
  std::vector<cplx> points;
  std::vector<int> multiplicities;

  int total() const;
};

/// Zeros of P' in H \ K. `expected` (the number of floating components) is
/// checked when non-negative.
StagnationSet stagnation_points(const QuasimomentumField& f, int expected = -1);

}  // namespace zs
