#include "zsspec/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "zsspec/errors.hpp"
#include "zsspec/numeric.hpp"

namespace zs {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_qd(std::ostream& os, const QuadraticDifferential& qd, double tol) {
  os << "anchors:";
  for (const cplx& e : qd.anchors()) os << ' ' << fmt(e.real()) << ',' << fmt(e.imag());
  os << "\ncoeffs:";
  for (double c : qd.coeffs()) os << ' ' << fmt(c);
  os << "\ntol: " << fmt(tol) << "\ngenus: " << qd.genus() << '\n';
}

QuadraticDifferential read_qd(std::istream& is) {
  std::map<std::string, std::string> fields;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      fail(ErrorCode::InvalidInput, "qd line " + std::to_string(lineno) + ": expected `key: values`");
    fields[line.substr(0, colon)] = line.substr(colon + 1);
  }
  for (const char* key : {"anchors", "coeffs", "genus"})
    if (!fields.count(key)) fail(ErrorCode::InvalidInput, std::string("qd: missing field ") + key);

  std::vector<cplx> anchors;
  std::istringstream a(fields["anchors"]);
  std::string tok;
  while (a >> tok) {
    const auto comma = tok.find(',');
    if (comma == std::string::npos) fail(ErrorCode::InvalidInput, "qd anchors: expected re,im but got " + tok);
    anchors.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
  }
  std::vector<double> c;
  std::istringstream cs(fields["coeffs"]);
  double v;
  while (cs >> v) c.push_back(v);
  if (c.size() != 2 * anchors.size())
    fail(ErrorCode::InvalidInput, "qd coeffs: expected " + std::to_string(2 * anchors.size()) + " values");
  QuadraticDifferential qd = QuadraticDifferential::from_coeffs(AnchorSet(anchors), c);
  if (qd.genus() != std::stoi(fields["genus"])) fail(ErrorCode::InvalidInput, "qd genus does not match the coefficients");
  return qd;
}

void write_periods_csv(std::ostream& os, const PeriodVector& p) {
  os << "loop,kind,re,im\n";
  for (std::size_t i = 0; i < p.values.size(); ++i)
    os << i << ",A," << fmt(p.values[i].real()) << ',' << fmt(p.values[i].imag()) << '\n';
  for (std::size_t i = 0; i < p.b_values.size(); ++i)
    os << i << ",B," << fmt(p.b_values[i].real()) << ',' << fmt(p.b_values[i].imag()) << '\n';
}

void write_spectrum_csv(std::ostream& os, const CriticalGraph& g) {
  os << "arc,s,re,im,p\n";
  int id = 0;
  for (const Trajectory& t : g.edges) {
    if (!t.level_zero) continue;
    for (std::size_t k = 0; k < t.samples.size(); ++k)
      os << id << ',' << fmt(t.s_values[k]) << ',' << fmt(t.samples[k].real()) << ',' << fmt(t.samples[k].imag())
         << ',' << fmt(t.p_values[k]) << '\n';
    ++id;
  }
}

void write_measure_csv(std::ostream& os, const EquilibriumMeasure& m) {
  os << "arc,s,re,im,u,weight\n";
  const GaussRule& gl = gauss_legendre(16);
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const ArcGeometry& g = *m.contour.arcs[m.arc[i]];
    double s = 0.0;
    for (std::size_t q = 0; q < gl.x.size(); ++q) {
      const double tau = 0.5 * m.tau[i] * (gl.x[q] + 1.0);
      s += 0.5 * m.tau[i] * gl.w[q] * std::abs(g.deriv(tau));
    }
    os << m.arc[i] << ',' << fmt(s) << ',' << fmt(m.nodes[i].real()) << ',' << fmt(m.nodes[i].imag()) << ','
       << fmt(m.density[i]) << ',' << fmt(m.weights[i]) << '\n';
  }
}

void write_energy_report(std::ostream& os, const EnergyReport& r) {
  os << "I_measure: " << fmt(r.I_measure) << '\n'
     << "I_residue: " << fmt(r.I_residue) << '\n'
     << "I_dirichlet: " << fmt(r.I_dirichlet) << '\n'
     << "I_dirichlet_error: " << fmt(r.I_dirichlet_error) << '\n'
     << "res_measure_residue: " << fmt(r.res_measure_residue) << '\n'
     << "res_measure_dirichlet: " << fmt(r.res_measure_dirichlet) << '\n'
     << "res_residue_dirichlet: " << fmt(r.res_residue_dirichlet) << '\n'
     << "bc_residual: " << fmt(r.bc_residual) << '\n'
     << "condition: " << fmt(r.condition) << '\n'
     << "nodes: " << r.nodes << '\n'
     << "grid_cells: " << r.grid_cells << '\n';
  if (r.I_phi) os << "I_phi: " << fmt(*r.I_phi) << '\n';
}

void write_margins_csv(std::ostream& os, const ProbeReport& p) {
  os << "theta,intensity,margin,in_class,note\n";
  for (const ProbePoint& q : p.points)
    os << fmt(q.theta) << ',' << fmt(q.intensity) << ',' << fmt(q.margin) << ',' << (q.in_class ? 1 : 0) << ','
       << q.note << '\n';
}

void write_curve_csv(std::ostream& os, const CrossoverReport& r) {
  os << "t,I1,I2,winner1,winner2\n";
  for (const ClassCurvePoint& p : r.curve) {
    os << fmt(p.t);
    for (const auto& I : p.intensity) os << ',' << (I ? fmt(*I) : "");
    os << ',' << p.winner[0] << ',' << p.winner[1] << '\n';
  }
}

void SvgCanvas::polyline(const std::vector<cplx>& pts, const std::string& cls) {
  if (pts.size() >= 2) items_.push_back({pts, cls, false});
}

void SvgCanvas::dot(cplx z, const std::string& cls) { items_.push_back({{z}, cls, true}); }

void SvgCanvas::continuum(const PolyContinuum& K, const std::string& cls) {
  for (const Arc& a : K.arcs) polyline(a.samples, cls);
}

void SvgCanvas::write(std::ostream& os) const {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y1 = 0.0;
  for (const Item& it : items_)
    for (const cplx& z : it.pts) {
      x0 = std::min(x0, z.real());
      x1 = std::max(x1, z.real());
      y1 = std::max(y1, z.imag());
    }
  if (!std::isfinite(x0)) x0 = -1.0, x1 = 1.0, y1 = 1.0;
  const double span = std::max({x1 - x0, y1, 1e-12});
  const double pad = 0.1 * span;
  x0 -= pad;
  x1 += pad;
  y1 += pad;
  const double y0 = -pad;
  const double W = 800.0, scale = W / (x1 - x0), H = (y1 - y0) * scale;
  auto X = [&](cplx z) { return fmt(std::round((z.real() - x0) * scale * 100.0) / 100.0); };
  auto Y = [&](cplx z) { return fmt(std::round((y1 - z.imag()) * scale * 100.0) / 100.0); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W) << "\" height=\"" << fmt(std::round(H))
     << "\" viewBox=\"0 0 " << fmt(W) << ' ' << fmt(std::round(H)) << "\">\n"
     << "<style>.axis{stroke:#888;stroke-width:1}.spectrum{stroke:#1f4e9c;stroke-width:2.5;fill:none}"
        ".candidate{stroke:#c0392b;stroke-width:1.8;fill:none}.trajectory{stroke:#2e8b57;stroke-width:1;fill:none}"
        ".minimizer2{stroke:#d98c1f;stroke-width:2;fill:none}"
        ".anchor{fill:#000}.hit{fill:#c0392b}.stagnation{fill:#8e44ad}</style>\n";
  os << "<line class=\"axis\" x1=\"0\" y1=\"" << Y(0.0) << "\" x2=\"" << fmt(W) << "\" y2=\"" << Y(0.0) << "\"/>\n";
  for (const Item& it : items_) {
    if (it.dot) {
      os << "<circle class=\"" << it.cls << "\" cx=\"" << X(it.pts[0]) << "\" cy=\"" << Y(it.pts[0]) << "\" r=\"4\"/>\n";
      continue;
    }
    os << "<polyline class=\"" << it.cls << "\" points=\"";
    for (std::size_t k = 0; k < it.pts.size(); ++k) os << (k ? " " : "") << X(it.pts[k]) << ',' << Y(it.pts[k]);
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace zs
