#include "zscli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "zsspec/contour.hpp"
#include "zsspec/descent.hpp"
#include "zsspec/errors.hpp"
#include "zsspec/io.hpp"
#include "zsspec/tracer.hpp"
#include "zsspec/verify.hpp"

namespace zscli {

namespace fs = std::filesystem;
using zs::fmt;

namespace {

constexpr double kResidueMeasureTol = 1e-6;
constexpr double kDescentHausdorff = 2e-2;
constexpr double kDescentEnergy = 1e-3;

/// Files of one job, with a manifest of sizes and FNV-1a hashes.
class Job {
 public:
  Job(const JobConfig& cfg, CommandResult& res) : cfg_(cfg), res_(res), dir_(cfg.out) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) zs::fail(zs::ErrorCode::InvalidInput, "cannot write " + (dir_ / name).string());
    body(os);
    res_.files.push_back(name);
  }

  void svg(const std::string& name, const zs::SvgCanvas& canvas) {
    if (cfg_.svg) write(name, [&](std::ostream& os) { canvas.write(os); });
  }

  void report(const std::vector<std::pair<std::string, std::string>>& diagnostics) {
    write("report.txt", [&](std::ostream& os) {
      os << "command: " << cfg_.command << "\n"
         << "exit_code: " << res_.exit_code << "\n"
         << "tolerances: boutroux=" << fmt(cfg_.tol.boutroux) << " bc=" << fmt(cfg_.tol.bc)
         << " traj=" << fmt(cfg_.tol.traj) << " energy=" << fmt(cfg_.tol.energy)
         << " s_property=" << fmt(cfg_.tol.s_property) << " schiffer=" << fmt(cfg_.tol.schiffer) << "\n"
         << "seed: " << cfg_.seed << "\nsamples: " << cfg_.samples << "\ngrid_res: " << cfg_.grid_res << "\n";
      for (const auto& [k, v] : diagnostics) os << k << ": " << v << "\n";
      for (const CheckResult& c : res_.checks)
        os << "check " << c.name << ": " << (c.pass ? "pass" : "FAIL") << " value=" << fmt(c.value)
           << " threshold=" << fmt(c.threshold) << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
      for (const std::string& d : res_.degeneracies) os << "degenerate: " << d << "\n";
      os << "config:\n" << to_json(cfg_) << "\n";
    });
  }

  void manifest() {
    std::vector<std::string> names = res_.files;
    std::sort(names.begin(), names.end());
    std::ofstream os(dir_ / "manifest.txt", std::ios::binary);
    os << "command: " << cfg_.command << "\nseed: " << cfg_.seed << "\nfiles:\n";
    for (const std::string& n : names) {
      std::ifstream in(dir_ / n, std::ios::binary);
      std::uint64_t h = 1469598103934665603ull, bytes = 0;
      for (char ch; in.get(ch); ++bytes) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ull;
      char hex[17];
      std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
      os << "  " << n << " " << bytes << " fnv1a:" << hex << "\n";
    }
    res_.files.push_back("manifest.txt");
  }

 private:
  const JobConfig& cfg_;
  CommandResult& res_;
  fs::path dir_;
};

zs::BoutrouxOptions boutroux_options(const JobConfig& cfg) {
  zs::BoutrouxOptions o;
  o.tol = cfg.tol.boutroux;
  return o;
}

zs::TraceOptions trace_options(const JobConfig& cfg) {
  zs::TraceOptions o;
  o.tol_traj = cfg.tol.traj;
  return o;
}

zs::EquilibriumOptions eq_options(const JobConfig& cfg) {
  zs::EquilibriumOptions o;
  o.tol_bc = cfg.tol.bc;
  return o;
}

zs::ExternalField field_of(const JobConfig& cfg) {
  return cfg.field.empty() ? zs::ExternalField{} : zs::ExternalField(cfg.field);
}

void check(CommandResult& res, std::string name, bool pass, double value, double threshold, std::string detail = "") {
  res.checks.push_back({std::move(name), pass, value, threshold, std::move(detail)});
}

void settle(CommandResult& res) {
  for (const CheckResult& c : res.checks)
    if (!c.pass) {
      res.exit_code = kError;
      return;
    }
  if (!res.degeneracies.empty()) res.exit_code = kDegenerate;
}

std::string checks_summary(const CommandResult& res) {
  std::ostringstream os;
  for (const CheckResult& c : res.checks)
    os << (c.pass ? "pass " : "FAIL ") << c.name << " " << fmt(c.value) << " (threshold " << fmt(c.threshold) << ")"
       << (c.detail.empty() ? "" : " " + c.detail) << "\n";
  for (const std::string& d : res.degeneracies) os << "degenerate: " << d << "\n";
  return os.str();
}

zs::AnchorSet anchors_of(const JobConfig& cfg) {
  if (cfg.anchors.empty()) zs::fail(zs::ErrorCode::InvalidInput, "config field anchors: missing");
  return zs::AnchorSet(cfg.anchors);
}

/// The traced reference: the lowest-intensity solution in the configured class.
struct Reference {
  zs::TracedSolution sol;
  std::vector<std::string> failures;
};

Reference reference(const JobConfig& cfg, const zs::AnchorSet& E) {
  Reference r;
  std::vector<zs::TracedSolution> sols;
  if (cfg.odd_zero_seeds.empty()) {
    // a single candidate: let its errors reach the caller with their own code
    zs::TracedSolution s;
    s.qd = zs::solve_boutroux(E, static_cast<int>(E.size()) - 1, {}, boutroux_options(cfg), &s.boutroux);
    s.spectrum = zs::extract_zs_spectrum(zs::build_critical_graph(s.qd, trace_options(cfg)));
    s.connectivity = zs::connectivity_of(s.spectrum.continuum, E);
    s.intensity = zs::residue_intensity(s.qd);
    sols.push_back(std::move(s));
  } else {
    sols = zs::traced_solutions(E, cfg.odd_zero_seeds, boutroux_options(cfg), trace_options(cfg), &r.failures);
  }
  std::optional<std::size_t> best;
  if (cfg.connectivity) {
    best = zs::best_in_class(sols, *cfg.connectivity);
  } else {
    for (std::size_t i = 0; i < sols.size(); ++i)
      if (!best || sols[i].intensity < sols[*best].intensity) best = i;
  }
  if (!best) {
    std::string why = "no traced solution realizes the requested class";
    for (const std::string& f : r.failures) why += "; " + f;
    zs::fail(zs::ErrorCode::NotCritical, why);
  }
  r.sol = std::move(sols[*best]);
  return r;
}

void degeneracy_flags(CommandResult& res, const zs::TracedSolution& s, const zs::TraceOptions& topt, double D) {
  if (s.qd.degenerate) res.degeneracies.push_back("zero of P coalesces with an anchor");
  if (s.spectrum.min_gap > 0.0 && s.spectrum.min_gap < 10.0 * topt.merge_frac * D)
    res.degeneracies.push_back("spectrum arcs nearly coalesce, min gap " + fmt(s.spectrum.min_gap));
}

}  // namespace

CommandResult cmd_solve(const JobConfig& cfg) {
  CommandResult res;
  const zs::AnchorSet E = anchors_of(cfg);
  const Reference ref = reference(cfg, E);
  const zs::TracedSolution& s = ref.sol;
  const zs::PeriodVector pv = zs::periods(s.qd, zs::build_cycle_basis(s.qd));

  const zs::EquilibriumMeasure m = zs::solve_equilibrium(s.spectrum.contour, {}, eq_options(cfg));
  const zs::EnergyReport er = zs::intensity_report(m, cfg.grid_res, cfg.tol.energy);
  const zs::QuasimomentumField f(m);
  const int floating = static_cast<int>(s.spectrum.continuum.floating_count());
  const zs::StagnationSet st = zs::stagnation_points(f);

  check(res, "boutroux_residual", s.boutroux.residual <= cfg.tol.boutroux, s.boutroux.residual, cfg.tol.boutroux);
  check(res, "bc_residual", m.bc_residual <= cfg.tol.bc, m.bc_residual, cfg.tol.bc);
  check(res, "residue_vs_measure", er.res_measure_residue <= kResidueMeasureTol, er.res_measure_residue,
        kResidueMeasureTol);
  check(res, "measure_vs_dirichlet", er.res_measure_dirichlet <= cfg.tol.energy, er.res_measure_dirichlet,
        cfg.tol.energy);
  check(res, "stagnation_count", st.total() == floating, st.total(), floating, "floating components");
  degeneracy_flags(res, s, trace_options(cfg), E.diameter());
  if (m.negative_density) res.degeneracies.push_back("negative density");
  settle(res);

  Job job(cfg, res);
  job.write("qd.txt", [&](std::ostream& os) { zs::write_qd(os, s.qd, cfg.tol.boutroux); });
  job.write("periods.csv", [&](std::ostream& os) { zs::write_periods_csv(os, pv); });
  job.write("spectrum.csv", [&](std::ostream& os) {
    zs::write_spectrum_csv(os, zs::build_critical_graph(s.qd, trace_options(cfg)));
  });
  job.write("measure.csv", [&](std::ostream& os) { zs::write_measure_csv(os, m); });
  job.write("energy.txt", [&](std::ostream& os) { zs::write_energy_report(os, er); });
  zs::SvgCanvas svg;
  svg.continuum(s.spectrum.continuum, "spectrum");
  for (const zs::cplx& e : E) svg.dot(e, "anchor");
  for (const zs::cplx& z : st.points) svg.dot(z, "stagnation");
  job.svg("spectrum.svg", svg);
  job.report({{"genus", std::to_string(s.qd.genus())},
              {"odd_zeros", std::to_string(s.odd)},
              {"boutroux_iterations", std::to_string(s.boutroux.iterations)},
              {"boutroux_residual", fmt(s.boutroux.residual)},
              {"homologous_gap", fmt(s.boutroux.homologous_gap)},
              {"connectivity", s.connectivity.to_string()},
              {"min_gap", fmt(s.spectrum.min_gap)},
              {"I_residue", fmt(er.I_residue)},
              {"I_measure", fmt(er.I_measure)},
              {"I_dirichlet", fmt(er.I_dirichlet)},
              {"condition", fmt(er.condition)},
              {"nodes", std::to_string(er.nodes)}});
  job.manifest();

  std::ostringstream os;
  os << "genus " << s.qd.genus() << ", connectivity " << s.connectivity.to_string() << "\n"
     << "I_residue " << fmt(er.I_residue) << "  I_measure " << fmt(er.I_measure) << "  I_dirichlet "
     << fmt(er.I_dirichlet) << "\n"
     << checks_summary(res);
  res.summary = os.str();
  res.qd = s.qd;
  res.energy = er;
  res.spectrum = s.spectrum.continuum;
  return res;
}

CommandResult cmd_energy(const JobConfig& cfg) {
  CommandResult res;
  if (cfg.arcs.empty()) zs::fail(zs::ErrorCode::InvalidInput, "config field arcs: energy needs explicit arcs");
  const zs::Contour K = zs::contour_from_polylines(cfg.arcs);
  const zs::ExternalField phi = field_of(cfg);
  const zs::EquilibriumMeasure m = zs::solve_equilibrium(K, phi, eq_options(cfg));
  const zs::EnergyReport er = zs::intensity_report(m, cfg.grid_res, cfg.tol.energy);

  check(res, "bc_residual", m.bc_residual <= cfg.tol.bc, m.bc_residual, cfg.tol.bc);
  if (phi.is_default()) {
    check(res, "residue_vs_measure", er.res_measure_residue <= kResidueMeasureTol, er.res_measure_residue,
          kResidueMeasureTol);
    check(res, "measure_vs_dirichlet", er.res_measure_dirichlet <= cfg.tol.energy, er.res_measure_dirichlet,
          cfg.tol.energy);
    if (m.negative_density) res.degeneracies.push_back("negative density");
  }
  std::string conn = "-";
  if (!cfg.anchors.empty()) {
    const zs::AnchorSet E(cfg.anchors);
    const zs::PolyContinuum P = K.continuum();
    conn = zs::connectivity_of(P, E).to_string();
    if (cfg.connectivity)
      check(res, "class_membership", zs::class_membership(P, E, *cfg.connectivity), 0.0, 0.0, conn);
  }
  settle(res);

  Job job(cfg, res);
  job.write("measure.csv", [&](std::ostream& os) { zs::write_measure_csv(os, m); });
  job.write("energy.txt", [&](std::ostream& os) { zs::write_energy_report(os, er); });
  zs::SvgCanvas svg;
  svg.continuum(K.continuum(), "candidate");
  for (const zs::cplx& e : cfg.anchors) svg.dot(e, "anchor");
  job.svg("contour.svg", svg);
  job.report({{"connectivity", conn},
              {"I_measure", fmt(er.I_measure)},
              {"I_residue", fmt(er.I_residue)},
              {"I_dirichlet", fmt(er.I_dirichlet)},
              {"I_phi", er.I_phi ? fmt(*er.I_phi) : "-"},
              {"condition", fmt(er.condition)},
              {"nodes", std::to_string(er.nodes)}});
  job.manifest();

  std::ostringstream os;
  os << "I_measure " << fmt(er.I_measure) << "  I_residue " << fmt(er.I_residue) << "  I_dirichlet "
     << fmt(er.I_dirichlet) << "\n"
     << checks_summary(res);
  res.summary = os.str();
  res.energy = er;
  res.spectrum = K.continuum();
  return res;
}

CommandResult cmd_verify(const JobConfig& cfg) {
  CommandResult res;
  const zs::AnchorSet E = anchors_of(cfg);
  const std::vector<std::string> suite =
      cfg.checks.empty() ? std::vector<std::string>{"boutroux", "s_property", "schiffer", "jenkins", "energy",
                                                    "stagnation"}
                         : cfg.checks;
  auto wants = [&](const char* name) { return std::find(suite.begin(), suite.end(), name) != suite.end(); };

  const Reference ref = reference(cfg, E);
  const zs::TracedSolution& s = ref.sol;
  const zs::EquilibriumMeasure mref = zs::solve_equilibrium(s.spectrum.contour, {}, eq_options(cfg));
  const bool candidate = !cfg.arcs.empty();
  const zs::Contour Kc = candidate ? zs::contour_from_polylines(cfg.arcs) : s.spectrum.contour;
  const zs::EquilibriumMeasure mcand = candidate ? zs::solve_equilibrium(Kc, {}, eq_options(cfg)) : mref;
  const zs::PolyContinuum Pc = candidate ? Kc.continuum() : s.spectrum.continuum;
  if (candidate && !zs::admissible(Pc, E))
    zs::fail(zs::ErrorCode::InvalidInput, "config field arcs: candidate does not hold every anchor");
  zs::SvgCanvas svg;
  svg.continuum(s.spectrum.continuum, "spectrum");
  if (candidate) svg.continuum(Pc, "candidate");
  for (const zs::cplx& e : E) svg.dot(e, "anchor");

  std::vector<std::pair<std::string, std::string>> diag{{"reference_connectivity", s.connectivity.to_string()},
                                                        {"reference_intensity", fmt(s.intensity)}};
  if (wants("boutroux"))
    check(res, "boutroux", s.boutroux.residual <= cfg.tol.boutroux, s.boutroux.residual, cfg.tol.boutroux,
          "homologous gap " + fmt(s.boutroux.homologous_gap));
  if (wants("s_property")) {
    zs::SPropertyOptions so;
    so.samples_per_arc = cfg.samples;
    const double r = candidate ? zs::s_property_residual(mcand, so) : zs::s_property_residual(s.qd, s.spectrum, mref, so);
    check(res, "s_property", r <= cfg.tol.s_property, r, cfg.tol.s_property);
  }
  if (wants("schiffer")) {
    const zs::SchifferCertificate c = zs::schiffer_certificate(mcand, E);
    check(res, "schiffer", c.residual <= cfg.tol.schiffer, c.residual, cfg.tol.schiffer,
          "degree " + std::to_string(c.degree));
  }
  if (wants("jenkins")) {
    const zs::InterceptionReport J = zs::jenkins_check(mref, Pc, cfg.samples);
    std::size_t hits = 0;
    for (const zs::InterceptionSample& smp : J.samples) {
      hits += smp.hit;
      for (const zs::OrthogonalTrajectory& t : smp.trajectories) svg.polyline(t.points, "trajectory");
      if (smp.hit) svg.dot(smp.hit_point, "hit");
    }
    check(res, "jenkins", J.overall, static_cast<double>(hits), static_cast<double>(J.samples.size()),
          "hits / samples");
  }
  if (wants("energy")) {
    const zs::EnergyReport er = zs::intensity_report(mcand, cfg.grid_res, cfg.tol.energy);
    check(res, "residue_vs_measure", er.res_measure_residue <= kResidueMeasureTol, er.res_measure_residue,
          kResidueMeasureTol);
    check(res, "measure_vs_dirichlet", er.res_measure_dirichlet <= cfg.tol.energy, er.res_measure_dirichlet,
          cfg.tol.energy);
    if (candidate) {
      const double margin = mcand.intensity() - mref.intensity();
      check(res, "energy_margin", margin >= -cfg.tol.energy, margin, -cfg.tol.energy, "candidate minus reference");
    }
    diag.emplace_back("candidate_intensity", fmt(mcand.intensity()));
  }
  if (wants("stagnation")) {
    const zs::QuasimomentumField f(mcand);
    const int floating = static_cast<int>(Pc.floating_count());
    const zs::StagnationSet st = zs::stagnation_points(f);
    for (const zs::cplx& z : st.points) svg.dot(z, "stagnation");
    check(res, "stagnation_count", st.total() == floating, st.total(), floating, "floating components");
  }
  if (wants("descent")) {
    // perturbed straight seeds in every topology of the class, seeded by cfg.seed
    const zs::ConnectivityMatrix M = cfg.connectivity ? *cfg.connectivity : s.connectivity;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, 0.05 * E.diameter());
    std::optional<zs::DescentResult> best;
    for (const zs::Topology& topo : zs::class_topologies(E, M)) {
      const zs::SplineClass cls{E, topo, 3};
      std::vector<double> x0 = cls.straight();
      for (double& v : x0) v += noise(rng);
      for (int attempt = 0; attempt < 6; ++attempt) {
        try {
          zs::DescentResult r = zs::descend(cls, M, x0);
          if (!best || r.intensity < best->intensity) best = std::move(r);
          break;
        } catch (const zs::Error& e) {
          if (e.code() != zs::ErrorCode::ClassEscape) throw;
          const std::vector<double> base = cls.straight();
          for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = base[i] + 0.5 * (x0[i] - base[i]);
        }
      }
    }
    if (!best) {
      check(res, "descent", false, 0.0, kDescentHausdorff, "no perturbed seed inside the class");
    } else {
      const double H = zs::hausdorff_distance(best->continuum, s.spectrum.continuum);
      const double dI = std::abs(best->intensity - s.intensity);
      check(res, "descent_hausdorff", H < kDescentHausdorff, H, kDescentHausdorff, best->topology.to_string());
      check(res, "descent_energy", dI < kDescentEnergy, dI, kDescentEnergy);
      svg.continuum(best->continuum, "minimizer2");
      diag.emplace_back("descent_iterations", std::to_string(best->iterations));
    }
  }
  degeneracy_flags(res, s, trace_options(cfg), E.diameter());
  settle(res);

  Job job(cfg, res);
  job.write("checks.csv", [&](std::ostream& os) {
    os << "check,pass,value,threshold,detail\n";
    for (const CheckResult& c : res.checks)
      os << c.name << ',' << (c.pass ? 1 : 0) << ',' << fmt(c.value) << ',' << fmt(c.threshold) << ',' << c.detail
         << '\n';
  });
  job.svg("verify.svg", svg);
  job.report(diag);
  job.manifest();
  res.summary = checks_summary(res);
  res.qd = s.qd;
  res.spectrum = s.spectrum.continuum;
  return res;
}

CommandResult cmd_compare_classes(const JobConfig& cfg) {
  CommandResult res;
  if (!cfg.family) zs::fail(zs::ErrorCode::InvalidInput, "config field family: missing");
  if (cfg.classes.size() != 2) zs::fail(zs::ErrorCode::InvalidInput, "config field classes: expected two matrices");
  const FamilySpec& fam = *cfg.family;
  zs::SweepOptions so;
  so.lo = fam.lo;
  so.hi = fam.hi;
  so.n = fam.n;
  so.bracket_tol = fam.bracket_tol;
  so.boutroux = boutroux_options(cfg);
  so.trace = trace_options(cfg);
  const zs::CrossoverReport r =
      zs::compare_classes([&](double t) { return fam.at(t); }, cfg.classes[0], cfg.classes[1], cfg.odd_zero_seeds, so);

  std::ostringstream os;
  if (r.identical) {
    os << "identical classes: curves coincide, no crossover reported\n";
  } else if (r.found) {
    const double gap = std::abs(r.I1 - r.I2);
    check(res, "crossover_gap", gap <= cfg.tol.energy, gap, cfg.tol.energy);
    check(res, "opposite_ordering", (r.diff_lo < 0.0) != (r.diff_hi < 0.0), r.diff_lo * r.diff_hi, 0.0,
          "product of I1-I2 at the bracket ends");
    os << "crossover t* " << fmt(r.t_star) << " in [" << fmt(r.lo) << ", " << fmt(r.hi) << "], I1 " << fmt(r.I1)
       << " I2 " << fmt(r.I2) << "\n";
  } else {
    os << "no crossover in [" << fmt(fam.lo) << ", " << fmt(fam.hi) << "]\n";
  }
  for (const zs::ClassCurvePoint& p : r.curve) {
    os << "t " << fmt(p.t);
    for (int c = 0; c < 2; ++c)
      os << "  I" << c + 1 << " " << (p.intensity[c] ? fmt(*p.intensity[c]) : "-") << " [" << p.winner[c] << "]";
    os << "\n";
  }
  settle(res);

  Job job(cfg, res);
  job.write("curve.csv", [&](std::ostream& o) { zs::write_curve_csv(o, r); });
  if (r.found) {
    zs::SvgCanvas svg;
    svg.continuum(r.minimizers[0], "spectrum");
    svg.continuum(r.minimizers[1], "minimizer2");
    for (const zs::cplx& e : r.anchors_star) svg.dot(e, "anchor");
    job.svg("minimizers.svg", svg);
  }
  std::vector<std::pair<std::string, std::string>> diag{
      {"class1", cfg.classes[0].to_string()},   {"class2", cfg.classes[1].to_string()},
      {"identical", r.identical ? "yes" : "no"}, {"found", r.found ? "yes" : "no"},
      {"evaluations", std::to_string(r.evaluations)}};
  if (r.found) {
    diag.emplace_back("t_star", fmt(r.t_star));
    diag.emplace_back("bracket", fmt(r.lo) + " " + fmt(r.hi));
    diag.emplace_back("I1", fmt(r.I1));
    diag.emplace_back("I2", fmt(r.I2));
  }
  for (const std::string& f : r.failures) diag.emplace_back("skipped", f);
  job.report(diag);
  job.manifest();
  res.summary = os.str() + checks_summary(res);
  res.crossover = r;
  return res;
}

CommandResult run_command(const JobConfig& cfg) {
  try {
    if (cfg.command == "solve") return cmd_solve(cfg);
    if (cfg.command == "energy") return cmd_energy(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "compare-classes") return cmd_compare_classes(cfg);
    zs::fail(zs::ErrorCode::InvalidInput, "unknown command '" + cfg.command + "'");
  } catch (const std::exception& e) {
    CommandResult res;
    res.exit_code = kError;
    res.summary = std::string("error: ") + e.what() + "\n";
    return res;
  }
}

}  // namespace zscli
