#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zsspec/geom.hpp"

namespace zscli {

using zs::cplx;

struct Tolerances {
  double boutroux = 1e-10;
  double bc = 1e-8;
  double traj = 1e-10;
  double energy = 1e-2;       // measure vs Dirichlet intensity, and energy margins
  double s_property = 1e-5;
  double schiffer = 1e-5;
};

/// One coordinate of a family anchor: a constant or a*t + b.
struct FamilyCoord {
  double a = 0.0, b = 0.0;
  double at(double t) const { return a * t + b; }
};

struct FamilySpec {
  std::vector<std::pair<FamilyCoord, FamilyCoord>> anchors;
  double lo = 0.0, hi = 1.0;
  int n = 9;
  double bracket_tol = 1e-4;

  zs::AnchorSet at(double t) const;
};

struct JobConfig {
  std::string command;
  std::vector<cplx> anchors;
  std::optional<zs::ConnectivityMatrix> connectivity;
  std::vector<std::vector<cplx>> arcs;            // explicit contour (energy, verify candidate)
  std::vector<std::vector<cplx>> odd_zero_seeds;  // one set per solution with odd zeros
  std::vector<double> field;                      // t_1..t_r of the external field, empty for Im z
  std::vector<std::string> checks;                // verify suite; empty selects the default suite
  std::vector<zs::ConnectivityMatrix> classes;    // compare-classes
  std::optional<FamilySpec> family;
  Tolerances tol;
  std::string out = "zsspec-out";
  std::uint64_t seed = 1;
  int samples = 24;
  int grid_res = 512;
  bool svg = true;

  /// Field-level validation (positivity of tolerances, sample counts, anchors).
  void validate() const;
};

/// Parses JSON text. Errors carry the line/column or the offending field path.
JobConfig parse_config(const std::string& text);
JobConfig load_config(const std::string& path);

/// Canonical JSON echo of the configuration, embedded in every report.
std::string to_json(const JobConfig& cfg);

}  // namespace zscli
