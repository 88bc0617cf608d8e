#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "hflow/curvfn.hpp"
#include "hflow/diagnostics.hpp"
#include "hflow/flow.hpp"
#include "hflow/hypersurface.hpp"

using namespace hflow;

namespace {

GraphPatch wavy(Backend b, int n, std::size_t N) {
  return GraphPatch::sample(b, AmbientParams(1.0, n), N,
                            [](double t) { return 1.0 + 0.05 * std::cos(2.0 * t); });
}

void BM_BuildGeometryCircle(benchmark::State& st) {
  const auto patch = wavy(Backend::FullCircle, 1, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(build_geometry(patch));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_BuildGeometryCircle)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_BuildGeometryAxisym(benchmark::State& st) {
  const auto patch = wavy(Backend::Axisymmetric, 3, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(build_geometry(patch));
}
BENCHMARK(BM_BuildGeometryAxisym)->RangeMultiplier(2)->Range(64, 1024);

void BM_AdvanceStep(benchmark::State& st) {
  FlowConfig c;
  c.ambient = AmbientParams(1.0, 2);
  c.curvature = CurvatureSpec::elem_quotient(2, 2, 1, 1.0);
  c.k = 1;
  const auto s = make_state(wavy(Backend::Axisymmetric, 2, static_cast<std::size_t>(st.range(0))),
                            c.curvature, c.k);
  for (auto _ : st) benchmark::DoNotOptimize(advance(s, c));
}
BENCHMARK(BM_AdvanceStep)->RangeMultiplier(2)->Range(64, 512);

void BM_ElementarySymmetric(benchmark::State& st) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.1, 3.0);
  std::vector<double> k(static_cast<std::size_t>(st.range(0)));
  for (double& x : k) x = U(rng);
  for (auto _ : st) benchmark::DoNotOptimize(elementary_symmetric_all(k));
}
BENCHMARK(BM_ElementarySymmetric)->DenseRange(2, 12, 2);

void BM_RadiusGap(benchmark::State& st) {
  const auto patch = wavy(Backend::FullCircle, 1, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(check_radius_gap(patch));
}
BENCHMARK(BM_RadiusGap)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
