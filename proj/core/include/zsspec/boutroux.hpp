#pragma once

#include <optional>
#include <vector>

#include "zsspec/geom.hpp"
#include "zsspec/numeric.hpp"

namespace zs {

/// Q(z) = P(z) / E(z), with P monic of degree 2N and E(z) = prod (z-e)(z-conj e).
///
/// Besides the expanded numerator we keep the factored form
///   Q = P_L^2 / prod_{b in B} (z-b)(z-conj b),
/// where B holds the branch points in the upper half-plane (uncancelled
/// anchors and odd-order zeros). The main sheet of sqrt(Q) has a vertical cut
/// [b, conj b] below every b in B and tends to 1 at infinity.
class QuadraticDifferential {
 public:
  QuadraticDifferential() = default;

  /// From c_1..c_{2N}; the factored form is recovered from the roots of P.
  static QuadraticDifferential from_coeffs(const AnchorSet& E, const std::vector<double>& c,
                                           double cluster_tol = 1e-6);
  /// From the factored form: P = P_L^2 / prod_k (z-a_k)(z-conj a_k).
  static QuadraticDifferential from_factors(const AnchorSet& E, RealPoly P_L, std::vector<cplx> odd_zeros);

  const AnchorSet& anchors() const { return E_; }
  const RealPoly& numerator() const { return P_; }
  const RealPoly& denominator() const { return D_; }
  const RealPoly& half_numerator() const { return PL_; }
  const std::vector<cplx>& branch_points() const { return B_; }
  const std::vector<cplx>& odd_zeros() const { return odd_; }
  /// Anchors whose pole is cancelled by a zero of P (degenerate surface).
  const std::vector<int>& cancelled_anchors() const { return cancelled_; }

  /// c_1..c_{2N}.
  std::vector<double> coeffs() const;
  int genus() const { return B_.empty() ? 0 : static_cast<int>(B_.size()) - 1; }
  double delta_branch() const { return 1e-6 * E_.diameter(); }

  cplx Q(cplx z) const;
  cplx dQ(cplx z) const;
  /// Main-sheet square root.
  cplx sqrt_main(cplx z) const;
  /// sqrt_main(base + dz) without forming base + dz, so that points very close
  /// to a pole or zero at `base` keep their relative accuracy.
  cplx sqrt_offset(cplx base, cplx dz) const;
  /// Distinct zeros of P in the closed upper half-plane with multiplicities,
  /// excluding zeros that cancel anchors.
  const std::vector<std::pair<cplx, int>>& zeros() const { return zeros_; }

  /// Flags produced by the solver.
  double boutroux_residual = -1.0;
  bool degenerate = false;

 private:
  void finish();

  AnchorSet E_;
  RealPoly P_, D_, PL_;
  std::vector<cplx> B_, odd_;
  std::vector<int> cancelled_;
  std::vector<std::pair<cplx, int>> zeros_;
};

/// Exact rational evaluation; PoleEvaluation within delta_branch of a pole.
cplx eval_Q(const QuadraticDifferential& qd, cplx z);

/// Continuation of sqrt(Q) along a sampled path. The branch flips exactly at
/// crossings of the vertical cuts, so arbitrary step sizes are safe; the path
/// must keep delta_branch away from every branch point (BranchJump otherwise).
std::vector<cplx> sqrtQ_along(const QuadraticDifferential& qd, const std::vector<cplx>& path,
                              cplx initial_branch);

struct Loop {
  std::vector<cplx> path;  // closed: path.front() == path.back()
  cplx initial_branch{1.0, 0.0};
};

struct CycleBasis {
  std::vector<Loop> loops;    // genus many A-type loops around [b, conj b]
  std::vector<Loop> b_loops;  // tubes around paths b_i -> b_{i+1} in the upper half-plane
  int genus = 0;
};

/// variant 0 and 1 give homologous loops drawn with different widths and margins.
CycleBasis build_cycle_basis(const QuadraticDifferential& qd, int variant = 0);

struct PeriodVector {
  std::vector<cplx> values;
  std::vector<cplx> b_values;
  double quad_error = 0.0;

  double max_abs_imag(bool include_b = true) const;
};

cplx loop_integral(const QuadraticDifferential& qd, const Loop& loop, double* err = nullptr);
PeriodVector periods(const QuadraticDifferential& qd, const CycleBasis& basis);

/// Integral of sqrt(Q) dz from a real point to b along a path that stays in
/// the cut plane (vertical leg at Re b +- delta, then horizontal into b).
/// The A-period around [b, conj b] equals 4i Im of this value.
cplx endpoint_integral(const QuadraticDifferential& qd, cplx b, const std::vector<cplx>& B_all,
                       double* err = nullptr);

struct BoutrouxOptions {
  double tol = 1e-10;
  int max_iter = 100;
  double fd_step = 1e-7;
  double degenerate_tol = 1e-5;
};

struct BoutrouxReport {
  int iterations = 0;
  double residual = 0.0;  // max |Im period| on an independent loop basis
  double homologous_gap = 0.0;
  bool degenerate = false;
};

/// Solve the Boutroux conditions for the given anchors and genus. The genus
/// fixes the number of odd zeros l = genus - N + 1; their starting positions
/// come from seed_zeros (required when l > 0).
QuadraticDifferential solve_boutroux(const AnchorSet& E, int target_genus,
                                     const std::vector<cplx>& seed_zeros = {},
                                     const BoutrouxOptions& opt = {}, BoutrouxReport* report = nullptr);

/// Seed-based variant: reuses the odd zeros of an existing differential.
QuadraticDifferential solve_boutroux(const AnchorSet& E, const QuadraticDifferential& seed,
                                     int target_genus, const BoutrouxOptions& opt = {},
                                     BoutrouxReport* report = nullptr);

/// Linear part of the solve: P_L for fixed branch points B (anchors first).
RealPoly boutroux_half_numerator(const std::vector<cplx>& B);

/// Multi-start search for Boutroux differentials with l odd zeros.
std::vector<QuadraticDifferential> find_boutroux_family(const AnchorSet& E, int ell,
                                                        const std::vector<std::vector<cplx>>& seeds,
                                                        const BoutrouxOptions& opt = {});

/// I with sqrt(Q) = 1 - I/z^2 + O(z^-3), by the trapezoid rule on a large circle.
double residue_intensity(const QuadraticDifferential& qd, int M = 128);

/// I from the coefficients alone: (d_2 - c_2)/2 where d_2, c_2 are the
/// z^{2N-2} coefficients of E and P.
double coefficient_intensity(const QuadraticDifferential& qd);

}  // namespace zs
