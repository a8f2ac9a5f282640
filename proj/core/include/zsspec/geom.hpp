#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zsspec/numeric.hpp"

namespace zs {

inline constexpr double kGlueTol = 1e-9;
inline constexpr double kAnchorTol = 1e-7;

/// Anchor points e_1..e_N in the open upper half-plane.
class AnchorSet {
 public:
  AnchorSet() = default;
  explicit AnchorSet(std::vector<cplx> points);

  std::size_t size() const { return pts_.size(); }
  const cplx& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<cplx>& points() const { return pts_; }
  auto begin() const { return pts_.begin(); }
  auto end() const { return pts_.end(); }

  /// Diameter of E together with its mirror image.
  double diameter() const;
  /// E(z) = prod (z - e_j)(z - conj e_j), real monic of degree 2N.
  RealPoly denominator() const;

  AnchorSet translated(double a) const;
  AnchorSet scaled(double lambda) const;

 private:
  std::vector<cplx> pts_;
};

struct Arc {
  std::vector<cplx> samples;
  bool closed = false;

  double length() const;
  cplx front() const { return samples.front(); }
  cplx back() const { return samples.back(); }
};

/// Symmetric (N+1)x(N+1) bit matrix; index 0 stands for the real axis.
class ConnectivityMatrix {
 public:
  ConnectivityMatrix() = default;
  explicit ConnectivityMatrix(std::size_t n_anchors);
  static ConnectivityMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t anchors() const { return n_; }
  bool operator()(std::size_t i, std::size_t j) const { return bits_[i * (n_ + 1) + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v = true);

  /// Entrywise comparison over all off-diagonal entries.
  bool dominates(const ConnectivityMatrix& other) const;
  bool operator==(const ConnectivityMatrix& other) const = default;

  std::vector<std::vector<int>> rows() const;
  std::string to_string() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Finite union of arcs, partitioned into components. Every piece that touches
/// the real axis is merged into component 0 (the grounded component K_0).
struct PolyContinuum {
  std::vector<Arc> arcs;
  std::vector<std::vector<int>> components;  // arc indices per component
  bool has_ground = false;                   // components[0] is K_0 when set
  std::vector<int> component_of_arc;

  bool empty() const { return arcs.empty(); }
  std::size_t floating_count() const { return components.size() - (has_ground ? 1 : 0); }
};

PolyContinuum make_continuum(std::vector<Arc> arcs, double glue_tol = kGlueTol);

double segment_distance(cplx p, cplx a, cplx b);
double distance_to(const Arc& arc, cplx z);
double distance_to(const PolyContinuum& K, cplx z);

/// Component index hosting every anchor; throws AnchorNotOnContinuum.
std::vector<int> anchor_components(const PolyContinuum& K, const AnchorSet& E,
                                   double anchor_tol = kAnchorTol);

ConnectivityMatrix connectivity_of(const PolyContinuum& K, const AnchorSet& E,
                                   double anchor_tol = kAnchorTol);
bool class_membership(const PolyContinuum& K, const AnchorSet& E, const ConnectivityMatrix& M,
                      double anchor_tol = kAnchorTol);

/// Every component holds two anchors or joins an anchor to the real axis.
bool admissible(const PolyContinuum& K, const AnchorSet& E, double anchor_tol = kAnchorTol);

/// Brute-force Hausdorff distance. Each polyline is resampled at spacing h
/// (default: 1e-3 of the larger bounding-box diagonal) and each sample is
/// measured against the other polyline exactly, so the error is at most h/2.
double hausdorff_distance(const PolyContinuum& K1, const PolyContinuum& K2, double h = 0.0);

/// Resample a polyline at spacing at most h, keeping the original vertices.
std::vector<cplx> resample(const Arc& arc, double h);

}  // namespace zs
