#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "zsspec/boutroux.hpp"
#include "zsspec/equilibrium.hpp"
#include "zsspec/sweep.hpp"
#include "zsspec/tracer.hpp"
#include "zsspec/verify.hpp"

namespace zs {

/// Shortest round-trip decimal form, so repeated runs write identical bytes.
std::string fmt(double x);

/// Structured text: anchors, coeffs, tol, genus (one `key: values` line each).
void write_qd(std::ostream& os, const QuadraticDifferential& qd, double tol);
/// Inverse of write_qd; InvalidInput with the offending line on malformed input.
QuadraticDifferential read_qd(std::istream& is);

/// loop,kind,re,im with kind A or B.
void write_periods_csv(std::ostream& os, const PeriodVector& p);
/// arc,s,re,im,p over the level-zero edges of the graph.
void write_spectrum_csv(std::ostream& os, const CriticalGraph& g);
/// arc,s,re,im,u,weight at the quadrature nodes.
void write_measure_csv(std::ostream& os, const EquilibriumMeasure& m);
/// Structured text with all intensities, residuals, the condition estimate and node counts.
void write_energy_report(std::ostream& os, const EnergyReport& r);
/// theta,intensity,margin,in_class,note.
void write_margins_csv(std::ostream& os, const ProbeReport& p);
/// t,I1,I2,winner1,winner2 (empty fields where a class has no solution).
void write_curve_csv(std::ostream& os, const CrossoverReport& r);

/// Write-only SVG overlay in the upper half-plane, y flipped to screen coordinates.
class SvgCanvas {
 public:
  /// Polyline in stroke class `cls` (spectrum, candidate, trajectory, axis).
  void polyline(const std::vector<cplx>& pts, const std::string& cls);
  void dot(cplx z, const std::string& cls);
  void continuum(const PolyContinuum& K, const std::string& cls);
  void write(std::ostream& os) const;

 private:
  struct Item {
    std::vector<cplx> pts;
    std::string cls;
    bool dot = false;
  };
  std::vector<Item> items_;
};

}  // namespace zs
