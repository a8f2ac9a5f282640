#include "zsspec/sweep.hpp"

#include <cmath>

#include "zsspec/errors.hpp"

namespace zs {

namespace {

TracedSolution trace_one(const AnchorSet& E, int ell, const std::vector<cplx>& seed, const BoutrouxOptions& bopt,
                         const TraceOptions& topt) {
  TracedSolution s;
  s.odd = ell;
  const int genus = static_cast<int>(E.size()) - 1 + ell;
  s.qd = solve_boutroux(E, genus, seed, bopt, &s.boutroux);
  s.spectrum = extract_zs_spectrum(build_critical_graph(s.qd, topt));
  s.connectivity = connectivity_of(s.spectrum.continuum, E);
  s.intensity = residue_intensity(s.qd);
  return s;
}

}  // namespace

std::vector<TracedSolution> traced_solutions(const AnchorSet& E, const std::vector<std::vector<cplx>>& seeds,
                                             const BoutrouxOptions& bopt, const TraceOptions& topt,
                                             std::vector<std::string>* failures) {
  std::vector<TracedSolution> out;
  auto attempt = [&](int k, const std::vector<cplx>& seed) {
    try {
      TracedSolution s = trace_one(E, static_cast<int>(seed.size()), seed, bopt, topt);
      s.seed = k;
      out.push_back(std::move(s));
    } catch (const Error& e) {
      if (failures) failures->push_back("seed " + std::to_string(k) + ": " + e.what());
    }
  };
  attempt(-1, {});
  for (std::size_t k = 0; k < seeds.size(); ++k) attempt(static_cast<int>(k), seeds[k]);
  return out;
}

std::optional<std::size_t> best_in_class(const std::vector<TracedSolution>& sols, const ConnectivityMatrix& M) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    if (!sols[i].connectivity.dominates(M)) continue;
    if (!best || sols[i].intensity < sols[*best].intensity) best = i;
  }
  return best;
}

CrossoverReport compare_classes(const AnchorFamily& family, const ConnectivityMatrix& M1,
                                const ConnectivityMatrix& M2, const std::vector<std::vector<cplx>>& seeds,
                                const SweepOptions& opt) {
  if (opt.n < 2 || !(opt.hi > opt.lo)) fail(ErrorCode::InvalidInput, "sweep needs n >= 2 and lo < hi");
  if (M1.anchors() != M2.anchors()) fail(ErrorCode::InvalidInput, "class matrices differ in size");
  CrossoverReport rep;
  rep.identical = M1 == M2;

  struct Eval {
    ClassCurvePoint point;
    std::vector<TracedSolution> sols;
    std::array<std::optional<std::size_t>, 2> best;
    std::vector<std::vector<cplx>> seeds;  // continued seeds after this evaluation
  };
  auto evaluate = [&](double t, const std::vector<std::vector<cplx>>& in_seeds) {
    Eval ev;
    ev.point.t = t;
    ev.seeds = in_seeds;
    const AnchorSet E = family(t);
    if (E.size() != M1.anchors()) fail(ErrorCode::InvalidInput, "family size does not match the class matrices");
    std::vector<std::string> failures;
    ev.sols = traced_solutions(E, in_seeds, opt.boutroux, opt.trace, &failures);
    for (const std::string& f : failures) rep.failures.push_back("t=" + std::to_string(t) + " " + f);
    for (const TracedSolution& s : ev.sols)
      if (s.seed >= 0) ev.seeds[s.seed] = s.qd.odd_zeros();
    const std::array<const ConnectivityMatrix*, 2> Ms{&M1, &M2};
    for (int c = 0; c < 2; ++c) {
      ev.best[c] = best_in_class(ev.sols, *Ms[c]);
      if (ev.best[c]) {
        ev.point.intensity[c] = ev.sols[*ev.best[c]].intensity;
        ev.point.winner[c] = ev.sols[*ev.best[c]].connectivity.to_string();
      }
    }
    ++rep.evaluations;
    return ev;
  };
  auto diff = [](const ClassCurvePoint& p) -> std::optional<double> {
    if (!p.intensity[0] || !p.intensity[1]) return std::nullopt;
    return *p.intensity[0] - *p.intensity[1];
  };

  std::vector<Eval> sweep;
  std::vector<std::vector<cplx>> cur = seeds;
  for (int k = 0; k < opt.n; ++k) {
    const double f = static_cast<double>(k) / (opt.n - 1);
    const double t = (1.0 - f) * opt.lo + f * opt.hi;
    sweep.push_back(evaluate(t, cur));
    cur = sweep.back().seeds;
    rep.curve.push_back(sweep.back().point);
  }
  if (rep.identical) return rep;

  // first sign change between consecutive defined points
  int left = -1, right = -1;
  for (int k = 0; k < opt.n && right < 0; ++k) {
    const auto dk = diff(sweep[k].point);
    if (!dk) continue;
    if (left >= 0) {
      const double dl = *diff(sweep[left].point);
      if ((dl < 0.0) != (*dk < 0.0) && dl != 0.0 && *dk != 0.0) right = k;
    }
    if (right < 0) left = k;
  }
  if (right < 0) return rep;

  Eval a = sweep[left], b = sweep[right];
  for (int it = 0; it < opt.max_bisect && b.point.t - a.point.t > opt.bracket_tol; ++it) {
    Eval m = evaluate(0.5 * (a.point.t + b.point.t), a.seeds);
    const auto dm = diff(m.point);
    if (!dm) break;  // a class lost its solution inside the bracket
    if ((*dm < 0.0) == (*diff(a.point) < 0.0))
      a = std::move(m);
    else
      b = std::move(m);
  }
  rep.lo = a.point.t;
  rep.hi = b.point.t;
  rep.diff_lo = *diff(a.point);
  rep.diff_hi = *diff(b.point);
  rep.t_star = 0.5 * (rep.lo + rep.hi);
  Eval s = evaluate(rep.t_star, a.seeds);
  if (!diff(s.point)) return rep;
  rep.found = true;
  rep.I1 = *s.point.intensity[0];
  rep.I2 = *s.point.intensity[1];
  rep.anchors_star = family(rep.t_star);
  for (int c = 0; c < 2; ++c) rep.minimizers[c] = s.sols[*s.best[c]].spectrum.continuum;
  return rep;
}

}  // namespace zs
