#include <benchmark/benchmark.h>

#include <vector>

#include "lightray/fields.hpp"
#include "lightray/fourier.hpp"
#include "lightray/geodesic.hpp"
#include "lightray/geometry.hpp"
#include "lightray/normal_op.hpp"
#include "lightray/parallel.hpp"
#include "lightray/transform.hpp"

namespace {

using namespace lightray;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// RK4 on a curved metric; range(0) is the step count.
void BM_TracePerturbed(benchmark::State& state) {
  const auto m = make_metric("perturbed", 2, std::vector<double>{0.05});
  const double h = 4.0 / static_cast<double>(state.range(0));
  const LightGeodesic geo{vec2(0.1, -0.2), vec2(0.6, 0.8), -2.0, 2.0, h};
  for (auto _ : state) benchmark::DoNotOptimize(trace(*m, geo).max_drift());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TracePerturbed)->Arg(1000)->Arg(4000);

void BM_ForwardRay(benchmark::State& state) {
  const auto m = make_metric("minkowski", 2);
  const auto p = make_phantom("gaussian", 2, std::vector<double>{0.5});
  const auto one = make_weight("one");
  const LightGeodesic geo{vec2(0.2, 0.1), vec2(0.0, 1.0), -1.0, 1.0, 1e-2};
  for (auto _ : state) benchmark::DoNotOptimize(forward(*m, *p, *one, geo));
}
BENCHMARK(BM_ForwardRay);

void BM_Sinogram(benchmark::State& state) {
  set_thread_count(1);
  const auto m = make_metric("minkowski", 2);
  const auto p = make_phantom("gaussian", 2, std::vector<double>{0.5});
  const auto n = static_cast<std::size_t>(state.range(0));
  const SinogramSpec spec{GridSpec::cube(2, -6, 6, n), DirectionGrid::circle(16), 0.05};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sinogram(*m, Integrand::of(*p), *make_weight("one"), spec).values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(16 * n * n));
}
BENCHMARK(BM_Sinogram)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Backproject(benchmark::State& state) {
  set_thread_count(1);
  const auto m = make_metric("minkowski", 2);
  const auto p = make_phantom("gaussian", 2, std::vector<double>{0.5});
  const SinogramSpec spec{GridSpec::cube(2, -6, 6, 97), DirectionGrid::circle(32), 0.05};
  const Sinogram s = sinogram(*m, Integrand::of(*p), *make_weight("one"), spec);
  const auto n = static_cast<std::size_t>(state.range(0));
  const GridSpec out = GridSpec::cube(3, -3, 3, n);
  for (auto _ : state) benchmark::DoNotOptimize(backproject(s, out).data().data());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(32 * out.size()));
}
BENCHMARK(BM_Backproject)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_RealFFT(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = make_phantom("gaussian", 2, std::vector<double>{0.5});
  const ScalarField f = sample(*p, GridSpec::cube(3, -3, 3, n));
  for (auto _ : state) benchmark::DoNotOptimize(rfft(f).data.data());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.size()));
}
BENCHMARK(BM_RealFFT)->Arg(32)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_ReconstructFilter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = make_phantom("gaussian", 2, std::vector<double>{0.5});
  const ScalarField f = sample(*p, GridSpec::cube(3, -3, 3, n));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_spacelike(f, 2).data().data());
}
BENCHMARK(BM_ReconstructFilter)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
