#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zsspec/boutroux.hpp"
#include "zsspec/geom.hpp"
#include "zsspec/tracer.hpp"

namespace zs {

/// A Boutroux differential together with its traced spectrum.
struct TracedSolution {
  int odd = 0;    // number of odd zeros
  int seed = -1;  // index of the seed set, -1 for the solution without odd zeros
  QuadraticDifferential qd;
  ZSSpectrum spectrum;
  ConnectivityMatrix connectivity;
  double intensity = 0.0;  // residue form
  BoutrouxReport boutroux;
};

/// The solution without odd zeros, then one per seed set of odd zeros.
/// Seeds that fail to solve or trace are skipped and described in `failures`.
std::vector<TracedSolution> traced_solutions(const AnchorSet& E, const std::vector<std::vector<cplx>>& seeds,
                                             const BoutrouxOptions& bopt = {}, const TraceOptions& topt = {},
                                             std::vector<std::string>* failures = nullptr);

/// Index of the lowest-intensity solution whose connectivity dominates M.
std::optional<std::size_t> best_in_class(const std::vector<TracedSolution>& sols, const ConnectivityMatrix& M);

using AnchorFamily = std::function<AnchorSet(double)>;

struct ClassCurvePoint {
  double t = 0.0;
  std::array<std::optional<double>, 2> intensity;
  std::array<std::string, 2> winner;  // connectivity of the minimizing solution
};

struct SweepOptions {
  double lo = 0.0, hi = 1.0;
  int n = 9;
  double bracket_tol = 1e-4;  // bisection stops below this bracket width
  int max_bisect = 40;
  BoutrouxOptions boutroux;
  TraceOptions trace;
};

struct CrossoverReport {
  std::vector<ClassCurvePoint> curve;  // the sweep, in increasing t
  bool identical = false;              // same class twice; no crossover is reported
  bool found = false;
  double lo = 0.0, hi = 0.0;           // final bracket
  double diff_lo = 0.0, diff_hi = 0.0; // I_1 - I_2 at the bracket ends
  double t_star = 0.0;
  double I1 = 0.0, I2 = 0.0;           // at t_star
  std::array<PolyContinuum, 2> minimizers;  // at t_star
  AnchorSet anchors_star;
  int evaluations = 0;
  std::vector<std::string> failures;
};

/// Class energies along a one-parameter anchor family, with the crossover
/// bracketed by bisection on the first sign change of I_1 - I_2. The odd-zero
/// seeds are continued from one parameter value to the next.
CrossoverReport compare_classes(const AnchorFamily& family, const ConnectivityMatrix& M1,
                                const ConnectivityMatrix& M2, const std::vector<std::vector<cplx>>& seeds,
                                const SweepOptions& opt);

}  // namespace zs
