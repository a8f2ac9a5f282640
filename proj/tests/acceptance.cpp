// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "support.hpp"
#include "zscli/commands.hpp"
#include "zsspec/descent.hpp"
#include "zsspec/errors.hpp"
#include "zsspec/io.hpp"
#include "zsspec/sweep.hpp"
#include "zsspec/tracer.hpp"
#include "zsspec/verify.hpp"

using namespace testing;
using zs::ConnectivityMatrix;
using zs::fmt;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

int failures = 0;

void criterion(int n, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.note(std::string("exception: ") + e.what());
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d %s: %s [%s] (%.1f s)\n", n, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

zscli::JobConfig job(const std::string& json, const std::string& command, const std::string& name) {
  zscli::JobConfig c = zscli::parse_config(json);
  c.command = command;
  c.out = (std::filesystem::current_path() / "acceptance_jobs" / name).string();
  return c;
}

/// A traced instance together with its equilibrium measure on the spectrum.
struct Solved {
  std::string name;
  zs::AnchorSet E;
  zs::QuadraticDifferential qd;
  zs::BoutrouxReport boutroux;
  zs::CriticalGraph graph;
  zs::ZSSpectrum spectrum;
  zs::EquilibriumMeasure measure;
  double seconds = 0.0;
};

Solved solve(const std::string& name, const zs::AnchorSet& E, int genus, const std::vector<cplx>& seed = {}) {
  Solved s{name, E, {}, {}, {}, {}, {}, 0.0};
  const auto t0 = Clock::now();
  s.qd = zs::solve_boutroux(E, genus, seed, {}, &s.boutroux);
  s.graph = zs::build_critical_graph(s.qd);
  s.spectrum = zs::extract_zs_spectrum(s.graph);
  s.seconds = seconds_since(t0);
  s.measure = zs::solve_equilibrium(s.spectrum.contour);
  return s;
}

const zs::AnchorSet kUnit = anchors({{0.0, 1.0}});
const zs::AnchorSet kPair = anchors({{-1.0, 1.0}, {1.0, 1.0}});
const zs::AnchorSet kAsym = anchors({{-1.0, 1.0}, {0.5, 1.7}, {1.3, 0.6}});
const zs::AnchorSet kTriple = anchors({{-0.3, 1.0}, {0.3, 1.0}, {0.0, 0.4}});
const ConnectivityMatrix kPairFloating = ConnectivityMatrix::from_rows({{0, 0, 0}, {0, 1, 1}, {0, 1, 1}});
const ConnectivityMatrix kPairGrounded = ConnectivityMatrix::from_rows({{0, 1, 1}, {1, 1, 0}, {1, 0, 1}});

}  // namespace

int main() {
  std::vector<Solved> solved;
  auto instances = [&]() -> const std::vector<Solved>& {
    if (solved.empty()) {
      solved.push_back(solve("{i}", kUnit, 0));
      solved.push_back(solve("{1+2i}", anchors({{1.0, 2.0}}), 0));
      solved.push_back(solve("{3i}", anchors({{0.0, 3.0}}), 0));
      solved.push_back(solve("pair", kPair, 1));
      solved.push_back(solve("asym3", kAsym, 2));
      solved.push_back(solve("triple", kTriple, 2));
      solved.push_back(solve("triple+odd", kTriple, 3, {{0.01, 0.6}}));
    }
    return solved;
  };

  criterion(1, "closed-form single anchor through cmd_solve", [](Outcome& o) {
    const auto t0 = Clock::now();
    const zscli::CommandResult r = zscli::run_command(job("{\"anchors\": [[0, 1]]}", "solve", "c1"));
    const double dt = seconds_since(t0);
    o.require(r.exit_code == 0, "exit code " + std::to_string(r.exit_code));
    const auto c = r.qd->coeffs();
    o.require(std::abs(c[0]) < 1e-9 && std::abs(c[1]) < 1e-9, "|c1|,|c2| < 1e-9");
    const double H = zs::hausdorff_distance(r.spectrum, polyline({{{0, 0}, {0, 1}}}));
    o.require(H < 1e-6, "Hausdorff < 1e-6");
    o.require(std::abs(r.energy->I_residue - 0.5) < 1e-6, "residue intensity 0.5 +- 1e-6");
    o.require(std::abs(r.energy->I_measure - 0.5) < 1e-6, "measure intensity 0.5 +- 1e-6");
    o.require(dt < 5.0, "runtime < 5 s");
    o.note("c=(" + fmt(c[0]) + "," + fmt(c[1]) + ") H=" + fmt(H) + " I_res=" + fmt(r.energy->I_residue) +
           " I_meas=" + fmt(r.energy->I_measure));
  });

  criterion(2, "translation and scaling covariance", [&](Outcome& o) {
    const auto& s = instances();
    const double I12 = zs::residue_intensity(s[1].qd), I3 = zs::residue_intensity(s[2].qd);
    o.require(std::abs(I12 - 2.0) < 1e-6, "E={1+2i} gives 2.0");
    o.require(std::abs(I3 - 4.5) < 1e-6, "E={3i} gives 4.5");
    // traced polylines against traced polylines; the smooth contour through them differs by its own sag
    const auto mapped = [](zs::PolyContinuum K, double lambda, cplx shift) {
      for (zs::Arc& a : K.arcs)
        for (cplx& z : a.samples) z = lambda * z + shift;
      return K;
    };
    const double H12 = zs::hausdorff_distance(s[1].spectrum.continuum, mapped(s[0].spectrum.continuum, 2.0, 1.0));
    const double H3 = zs::hausdorff_distance(s[2].spectrum.continuum, mapped(s[0].spectrum.continuum, 3.0, 0.0));
    // a multi-anchor instance under z -> 2z + 1
    const Solved moved = solve("asym3'", kAsym.scaled(2.0).translated(1.0), 2);
    const double Hasym = zs::hausdorff_distance(moved.spectrum.continuum, mapped(s[4].spectrum.continuum, 2.0, 1.0));
    const double Iasym = zs::residue_intensity(moved.qd) / (4.0 * zs::residue_intensity(s[4].qd));
    o.require(H12 < 1e-5 && H3 < 1e-5 && Hasym < 1e-5, "argmin equivariance, Hausdorff < 1e-5");
    o.require(std::abs(Iasym - 1.0) < 1e-6, "lambda^2 scaling of asym3");
    o.note("I=" + fmt(I12) + "," + fmt(I3) + " H=" + fmt(H12) + "," + fmt(H3) + "," + fmt(Hasym));
  });

  criterion(3, "Boutroux residual and homologous periods", [](Outcome& o) {
    struct Case {
      const char* name;
      zs::AnchorSet E;
      int genus;
      std::optional<ConnectivityMatrix> M;
    };
    for (const Case& c : {Case{"pair/floating", kPair, 1, kPairFloating}, Case{"pair/grounded", kPair, 1, kPairGrounded},
                          Case{"asym3", kAsym, 2, std::nullopt}}) {
      const auto t0 = Clock::now();
      zs::BoutrouxReport rep;
      const auto qd = zs::solve_boutroux(c.E, c.genus, {}, {}, &rep);
      const zs::PeriodVector p0 = zs::periods(qd, zs::build_cycle_basis(qd, 0));
      const zs::PeriodVector p1 = zs::periods(qd, zs::build_cycle_basis(qd, 1));
      double gap = 0.0;
      for (std::size_t k = 0; k < p0.values.size(); ++k) gap = std::max(gap, std::abs(p0.values[k] - p1.values[k]));
      if (c.M) {
        const zs::ZSSpectrum sp = zs::extract_zs_spectrum(zs::build_critical_graph(qd));
        o.require(zs::class_membership(sp.continuum, c.E, *c.M), std::string(c.name) + " in class");
      }
      const double dt = seconds_since(t0);
      o.require(rep.residual < 1e-10 && p0.max_abs_imag() < 1e-10, std::string(c.name) + " |Im period| < 1e-10");
      o.require(gap < 1e-9, std::string(c.name) + " homologous gap < 1e-9");
      o.require(dt < 60.0, std::string(c.name) + " runtime < 60 s");
      o.note(std::string(c.name) + ": res=" + fmt(std::max(rep.residual, p0.max_abs_imag())) + " gap=" + fmt(gap));
    }
  });

  criterion(4, "three-way intensity agreement", [&](Outcome& o) {
    for (const Solved& s : instances()) {
      const zs::EnergyReport r = zs::intensity_report(s.measure, 512);
      const double I_zs = zs::residue_intensity(s.qd);
      const double a = std::max(std::abs(r.I_residue - r.I_measure), std::abs(I_zs - r.I_measure));
      const double b = std::abs(r.I_measure - r.I_dirichlet);
      o.require(a < 1e-6, s.name + " |I_residue - I_measure| < 1e-6");
      o.require(b < 1e-2, s.name + " |I_measure - I_dirichlet| < 1e-2");
      o.note(s.name + ": " + fmt(a) + "/" + fmt(b));
    }
  });

  criterion(5, "S-property and Schiffer certificate", [&](Outcome& o) {
    double worst_s = 0.0, worst_c = 0.0;
    for (const Solved& s : instances()) {
      const double S = zs::s_property_residual(s.qd, s.spectrum, s.measure);
      const double C = zs::schiffer_certificate(s.measure, s.E).residual;
      o.require(S < 1e-5, s.name + " S residual < 1e-5");
      o.require(C < 1e-5, s.name + " Schiffer residual < 1e-5");
      worst_s = std::max(worst_s, S);
      worst_c = std::max(worst_c, C);
    }
    const zs::EquilibriumMeasure t = zs::solve_equilibrium(tilted(deg(15)));
    const double S = zs::s_property_residual(t), C = zs::schiffer_certificate(t, kUnit).residual;
    o.require(S - 1e-5 > 1e-2, "tilted S fails by > 1e-2");
    o.require(C - 1e-5 > 1e-2, "tilted Schiffer fails by > 1e-2");
    o.note("worst traced S=" + fmt(worst_s) + " Schiffer=" + fmt(worst_c) + "; tilted S=" + fmt(S) +
           " Schiffer=" + fmt(C));
  });

  criterion(6, "energy ordering over the 21-point tilt family", [&](Outcome& o) {
    const auto t0 = Clock::now();
    const Solved& ref = instances()[0];
    const double Iref = zs::residue_intensity(ref.qd);
    const ConnectivityMatrix M = ConnectivityMatrix::from_rows({{0, 1}, {1, 1}});
    const zs::ProbeReport p = zs::energy_inequality_probe(kUnit, M, Iref, [](double th) { return tilted(deg(th)); },
                                                          -30.0, 30.0, 21);
    double at_min = 0.0, best = 1e300, m15 = 1e300, other = 1e300;
    for (const zs::ProbePoint& q : p.points) {
      if (q.intensity < best) best = q.intensity, at_min = q.theta;
      if (std::abs(std::abs(q.theta) - 15.0) < 1e-9) m15 = std::min(m15, q.margin);
      if (std::abs(q.theta) > 1e-9) other = std::min(other, q.margin);
    }
    o.require(std::abs(at_min) < 1e-9, "minimum at the vertical segment");
    o.require(other > 0.0, "strictly positive margin off the vertical");
    o.require(m15 >= 1e-3, "margin >= 1e-3 at +-15 degrees");
    int hits = 0;
    for (const zs::ProbePoint& q : p.points) hits += zs::jenkins_check(ref.measure, tilted(deg(q.theta)).continuum(), 16).overall;
    o.require(hits == 21, "Jenkins interception for every member");
    const double dt = seconds_since(t0);
    o.require(dt < 120.0, "runtime < 2 min");
    o.note("min margin off vertical " + fmt(other) + ", at 15deg " + fmt(m15) + ", jenkins " + std::to_string(hits) +
           "/21");
  });

  criterion(7, "descent from perturbed seeds matches the traced spectrum", [](Outcome& o) {
    struct Case {
      const char* name;
      const char* json;
    };
    for (const Case& c : {Case{"{i}", "{\"anchors\": [[0, 1]], \"connectivity\": [[0,1],[1,1]], \"seed\": 20}"},
                          Case{"pair/floating",
                               "{\"anchors\": [[-1, 1], [1, 1]], \"connectivity\": [[0,0,0],[0,1,1],[0,1,1]], \"seed\": 21}"},
                          Case{"pair/grounded",
                               "{\"anchors\": [[-1, 1], [1, 1]], \"connectivity\": [[0,1,1],[1,1,0],[1,0,1]], \"seed\": 22}"}}) {
      std::string json = c.json;
      json.insert(json.size() - 1, ", \"checks\": [\"descent\"]");
      const zscli::CommandResult r = zscli::run_command(job(json, "verify", std::string("c7_") + c.name));
      o.require(r.exit_code == 0, std::string(c.name) + " " + r.summary);
      for (const zscli::CheckResult& k : r.checks) o.note(std::string(c.name) + " " + k.name + "=" + fmt(k.value));
    }
  });

  criterion(8, "connectivity crossover in the symmetric 3-anchor family", [](Outcome& o) {
    const auto t0 = Clock::now();
    const zscli::CommandResult r = zscli::run_command(job(
        "{\"family\": {\"anchors\": [[-0.3, 1], [0.3, 1], [0, \"t\"]], \"lo\": 0.2, \"hi\": 0.7, \"n\": 6},"
        " \"classes\": [[[0,0,0,1],[0,1,1,0],[0,1,1,0],[1,0,0,1]], [[0,0,0,0],[0,1,1,1],[0,1,1,1],[0,1,1,1]]],"
        " \"odd_zero_seeds\": [[[0.01, 0.6]]]}",
        "compare-classes", "c8"));
    const double dt = seconds_since(t0);
    o.require(r.crossover && r.crossover->found, "crossover bracketed");
    if (!r.crossover || !r.crossover->found) return;
    const zs::CrossoverReport& x = *r.crossover;
    o.require(std::abs(x.I1 - x.I2) < 1e-3, "|I1 - I2| < 1e-3 at t*");
    o.require((x.diff_lo < 0.0) != (x.diff_hi < 0.0), "opposite ordering on either side");
    o.require(dt < 600.0, "runtime < 10 min");
    o.note("t*=" + fmt(x.t_star) + " in [" + fmt(x.lo) + "," + fmt(x.hi) + "] I1-I2=" + fmt(x.I1 - x.I2));
  });

  criterion(9, "structural invariants on five configurations", [&](Outcome& o) {
    const auto& all = instances();
    for (std::size_t i : {0u, 3u, 4u, 5u, 6u}) {
      const Solved& s = all[i];
      const zs::CriticalGraph& g = s.graph;
      o.require(g.cycles == 0, s.name + " forest property");
      for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        const zs::CriticalPoint& p = g.vertices[v];
        if (p.on_real) continue;
        const int expected = p.order < 0 ? 1 : p.order + 2;
        o.require(static_cast<int>(g.incidence[v].size()) == expected, s.name + " valence at a critical point");
      }
      double worst = 0.0;
      for (std::size_t a = 0; a < s.spectrum.endpoint_order.size(); ++a) {
        const auto [first, last] = s.spectrum.endpoint_order[a];
        if (first == -1) worst = std::max(worst, std::abs(zs::endpoint_exponent(s.measure, static_cast<int>(a), true) + 0.5));
        if (last == -1) worst = std::max(worst, std::abs(zs::endpoint_exponent(s.measure, static_cast<int>(a), false) + 0.5));
      }
      o.require(worst <= 0.05, s.name + " endpoint exponent -0.5 +- 0.05");
      const int floating = static_cast<int>(s.spectrum.continuum.floating_count());
      const int stag = zs::stagnation_points(zs::QuasimomentumField(s.measure)).total();
      o.require(stag == floating, s.name + " stagnation count = floating components");
      o.note(s.name + ": exp dev " + fmt(worst) + ", stagnation " + std::to_string(stag) + "/" +
             std::to_string(floating));
    }
  });

  criterion(10, "continuity and raising of a floating component", [](Outcome& o) {
    const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
    zs::Contour arch;
    arch.arcs.push_back(zs::make_circular_arc({-1.0, 1.0}, {1.0, 1.0}, 0.5));
    for (const auto& [name, K] : {std::pair{"segment", segment({0.0, 1.0}, 0.0)}, std::pair{"arch", arch}}) {
      const zs::ContinuityReport c = zs::continuity_probe(K, eps);
      o.require(c.monotone, std::string(name) + " monotone decrease");
      std::string diffs;
      for (const auto& row : c.rows) diffs += " " + fmt(row.difference);
      o.note(std::string(name) + ":" + diffs);
    }
    const zs::RaiseReport r = zs::raise_probe(segment({-0.5, 1.0}, {0.5, 1.0}), {0}, {1, 2, 4, 8});
    o.require(r.increasing, "raising increases the intensity");
    std::string I;
    for (double v : r.intensities) I += " " + fmt(v);
    o.note("raise:" + I);
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
