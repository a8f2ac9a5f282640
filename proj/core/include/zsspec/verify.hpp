#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zsspec/boutroux.hpp"
#include "zsspec/contour.hpp"
#include "zsspec/equilibrium.hpp"
#include "zsspec/geom.hpp"
#include "zsspec/tracer.hpp"

namespace zs {

/// Normal derivatives of V = Im P on both sides of one arc. The plus side is
/// to the left of the arc direction (increasing tau).
struct MismatchProfile {
  int arc = 0;
  std::vector<double> tau;
  std::vector<double> s;             // arc length from the start
  std::vector<cplx> points;
  std::vector<double> normal_plus;
  std::vector<double> normal_minus;
  std::vector<double> mismatch;      // normal_plus - normal_minus
  std::vector<double> u_tilde_derivative;  // d(u~)/ds from the averaged boundary values of P'
};

struct SPropertyOptions {
  double h_frac = 1e-4;      // offset h relative to the support diameter
  int samples_per_arc = 24;
  double tau_margin = 0.1;   // samples keep this far (in tau) from the arc ends
};

struct SPropertyReport {
  double residual = 0.0;      // max |mismatch| over the samples
  std::size_t samples = 0;
  std::size_t excluded = 0;   // samples dropped near the ends or other arcs
  std::vector<MismatchProfile> profiles;
};

MismatchProfile mismatch_profile(const EquilibriumMeasure& m, int arc, const SPropertyOptions& opt = {});

/// Max over interior samples of |dV/dn+ - dV/dn-| by one-sided Richardson
/// differences at offsets h and 2h. TooCloseToEndpoint if every sample is excluded.
SPropertyReport s_property(const EquilibriumMeasure& m, const SPropertyOptions& opt = {});
double s_property_residual(const EquilibriumMeasure& m, const SPropertyOptions& opt = {});
/// Same, for a traced spectrum of qd. Samples near zeros of Q are excluded too.
double s_property_residual(const QuadraticDifferential& qd, const ZSSpectrum& spectrum,
                           const EquilibriumMeasure& m, const SPropertyOptions& opt = {});

enum class Side { Plus, Minus };
std::string to_string(Side s);

struct SideReport {
  Side side = Side::Plus;
  double strength = 0.0;        // |mismatch| from the finite differences
  double mismatch = 0.0;        // signed, plus minus minus
  double mismatch_integral = 0.0;  // the same from the averaged boundary values of P'
  bool ambiguous = false;       // below the noise floor; either side is dominant
  int arc = -1;
  double tau = 0.0;
};

/// Dominant side at the point of m's support nearest to z. With throw_ambiguous
/// set, AmbiguousSide is raised instead of returning a flagged report.
SideReport dominant_side(const EquilibriumMeasure& m, cplx z_on_K, double noise_floor = 1e-8,
                         bool throw_ambiguous = false);

enum class TrajectoryEnd { Hit, Escaped, Stagnation, StepLimit };
std::string to_string(TrajectoryEnd e);

struct OrthogonalTrajectory {
  std::vector<cplx> points;
  TrajectoryEnd end = TrajectoryEnd::Escaped;
  cplx hit_point;        // for Hit
  cplx stagnation;       // for Stagnation
  std::vector<OrthogonalTrajectory> branches;  // continuations past a stagnation point
  bool hits() const;
};

struct OrthoOptions {
  double step_frac = 5e-3;     // nominal step / diameter
  double escape_frac = 4.0;    // escape radius / diameter of support and target
  double hit_frac = 1e-6;      // delta_hit / diameter
  double stagnation_frac = 1e-6;
  int max_steps = 20000;
  bool explore_stagnation = true;
};

/// Steepest ascent of V = Im P from z into the given side of the arc through z
/// (or from an arbitrary off-support point when side is ignored). Stops on
/// hitting `target`, at a stagnation point, or beyond the escape radius.
OrthogonalTrajectory orthogonal_trajectory(const QuasimomentumField& f, cplx z, Side side,
                                           const PolyContinuum* target = nullptr, const OrthoOptions& opt = {});
/// From an off-support point.
OrthogonalTrajectory ascent_from(const QuasimomentumField& f, cplx z, const PolyContinuum* target,
                                 const OrthoOptions& opt = {});
/// Throws StalledAtStagnation when the trace ends at a zero of P'.
OrthogonalTrajectory orthogonal_trajectory_strict(const QuasimomentumField& f, cplx z, Side side,
                                                  const PolyContinuum* target = nullptr,
                                                  const OrthoOptions& opt = {});

struct InterceptionSample {
  cplx point;
  int arc = -1;
  SideReport side;
  std::vector<OrthogonalTrajectory> trajectories;  // one, or both sides at S-points
  bool hit = false;
  cplx hit_point;
};

struct InterceptionReport {
  std::vector<InterceptionSample> samples;
  bool either_side = false;  // reference has the S-property
  double s_residual = 0.0;
  bool overall = false;
};

struct JenkinsOptions {
  double s_threshold = 1e-5;
  double noise_floor = 1e-8;
  OrthoOptions ortho;
};

/// Jenkins interception of K by the dominant orthogonal trajectories of the
/// reference measure, sampled at n points of its support.
InterceptionReport jenkins_check(const EquilibriumMeasure& ref, const PolyContinuum& K, int n_samples,
                                 const JenkinsOptions& opt = {});

struct ProbePoint {
  double theta = 0.0;
  double intensity = 0.0;
  double margin = 0.0;  // intensity minus the reference
  bool in_class = true;
  std::string note;
};

struct ProbeReport {
  double reference = 0.0;
  std::vector<ProbePoint> points;
  double min_margin = 0.0;  // over in-class members
  bool holds = false;       // min_margin >= -tol_energy
};

using ContourFamily = std::function<Contour(double)>;

/// Intensities of K_theta for theta at n points of [lo, hi] against the
/// reference intensity. Members outside the class are excluded and reported.
ProbeReport energy_inequality_probe(const AnchorSet& E, const ConnectivityMatrix& M, double reference,
                                    const ContourFamily& family, double lo, double hi, int n,
                                    double tol_energy = 1e-3, const EquilibriumOptions& opt = {});

struct SchifferCertificate {
  std::vector<cplx> coeffs;  // fitted polynomial, descending powers of z
  double residual = 0.0;     // sup misfit over the test points relative to sup |F|
  int degree = 0;
  std::size_t test_points = 0;
};

/// F(x) = E(x) (Phi'(x)^2 - P'(x)^2) sampled on a circle around K and its
/// mirror image, fitted by a polynomial of degree 2N + r - 2.
SchifferCertificate schiffer_certificate(const EquilibriumMeasure& m, const AnchorSet& E);

struct ContinuityRow {
  double eps = 0.0;
  double intensity = 0.0;
  double difference = 0.0;
};

struct ContinuityReport {
  double base = 0.0;
  std::vector<ContinuityRow> rows;
  bool monotone = false;  // differences strictly decrease as eps decreases
};

/// Normal displacement of every arc by eps * sin^2(pi tau).
Contour displace(const Contour& K, double eps);
ContinuityReport continuity_probe(const Contour& K, const std::vector<double>& epsilons,
                                  const EquilibriumOptions& opt = {});

struct RaiseReport {
  std::vector<double> heights;
  std::vector<double> intensities;
  bool increasing = false;
};

/// Raises the arcs of one floating component by i*h for each h.
RaiseReport raise_probe(const Contour& K, const std::vector<int>& component_arcs, const std::vector<double>& heights,
                        const EquilibriumOptions& opt = {});

/// Slope of log density against log distance at one end of an arc.
double endpoint_exponent(const EquilibriumMeasure& m, int arc, bool at_start);

}  // namespace zs
