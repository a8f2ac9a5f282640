#include <benchmark/benchmark.h>

#include "zsspec/boutroux.hpp"
#include "zsspec/equilibrium.hpp"
#include "zsspec/tracer.hpp"
#include "zsspec/verify.hpp"

namespace {

using zs::cplx;

zs::AnchorSet anchor_set(std::initializer_list<cplx> pts) { return zs::AnchorSet(std::vector<cplx>(pts)); }

const zs::AnchorSet& asym3() {
  static const zs::AnchorSet E = anchor_set({{-1.0, 1.0}, {0.5, 1.7}, {1.3, 0.6}});
  return E;
}

zs::Contour tilted_segment() {
  zs::Contour K;
  K.arcs.push_back(zs::make_segment({0.0, 1.0}, {std::tan(0.25), 0.0}));
  return K;
}

void BM_BoutrouxPair(benchmark::State& state) {
  const zs::AnchorSet E = anchor_set({{-1.0, 1.0}, {1.0, 1.0}});
  for (auto _ : state) benchmark::DoNotOptimize(zs::solve_boutroux(E, 1));
}
BENCHMARK(BM_BoutrouxPair)->Unit(benchmark::kMillisecond);

void BM_BoutrouxAsym3(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(zs::solve_boutroux(asym3(), 2));
}
BENCHMARK(BM_BoutrouxAsym3)->Unit(benchmark::kMillisecond);

void BM_TraceSpectrum(benchmark::State& state) {
  const auto qd = zs::solve_boutroux(asym3(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(zs::extract_zs_spectrum(zs::build_critical_graph(qd)));
}
BENCHMARK(BM_TraceSpectrum)->Unit(benchmark::kMillisecond);

void BM_EquilibriumSegment(benchmark::State& state) {
  const zs::Contour K = tilted_segment();
  zs::EquilibriumOptions opt;
  opt.n_base = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(zs::solve_equilibrium(K, {}, opt).intensity());
}
BENCHMARK(BM_EquilibriumSegment)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_EquilibriumSpectrum(benchmark::State& state) {
  const zs::ZSSpectrum sp = zs::extract_zs_spectrum(zs::build_critical_graph(zs::solve_boutroux(asym3(), 2)));
  for (auto _ : state) benchmark::DoNotOptimize(zs::solve_equilibrium(sp.contour).intensity());
}
BENCHMARK(BM_EquilibriumSpectrum)->Unit(benchmark::kMillisecond);

void BM_DirichletEnergy(benchmark::State& state) {
  const zs::EquilibriumMeasure m = zs::solve_equilibrium(tilted_segment());
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(zs::intensity_report(m, res).I_dirichlet);
}
BENCHMARK(BM_DirichletEnergy)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SProperty(benchmark::State& state) {
  const zs::EquilibriumMeasure m = zs::solve_equilibrium(tilted_segment());
  for (auto _ : state) benchmark::DoNotOptimize(zs::s_property_residual(m));
}
BENCHMARK(BM_SProperty)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
