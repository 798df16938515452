#include <benchmark/benchmark.h>

#include <vector>

#include "gwpath/config_model.hpp"
#include "gwpath/continuum.hpp"
#include "gwpath/pathwise.hpp"
#include "gwpath/walk.hpp"

using namespace gwpath;

static void BM_HeightProcess(benchmark::State& state) {
  Stream rng = make_stream(1, "bench_height");
  std::vector<std::int64_t> steps(static_cast<std::size_t>(state.range(0)));
  for (auto& s : steps) s = static_cast<std::int64_t>(uniform_index(rng, 4)) - 1;
  const Path p = Path::from_steps(steps);
  for (auto _ : state) benchmark::DoNotOptimize(height_process(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HeightProcess)->RangeMultiplier(8)->Range(1 << 10, 1 << 22)->Complexity(benchmark::oN);

static void BM_PathwiseBuild(benchmark::State& state) {
  const PathwiseSampler sampler(binary_law(0.25));
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.build(state.range(0), make_stream(++i, "bench_bundle")));
}
BENCHMARK(BM_PathwiseBuild)->Arg(200)->Arg(10000);

static void BM_PowerLawSampleSum(benchmark::State& state) {
  const auto law = power_law(1.5, 2);
  Stream rng = make_stream(2, "bench_sum");
  for (auto _ : state) benchmark::DoNotOptimize(law->sample_sum(state.range(0), rng));
}
BENCHMARK(BM_PowerLawSampleSum)->Arg(1000)->Arg(100000);

static void BM_Explore(benchmark::State& state) {
  const DegreeModel model = make_degree_model(1.5, 2, 0.0, state.range(0));
  Stream rng = make_stream(3, "bench_explore");
  for (auto _ : state) {
    const auto degrees = sample_degrees(model, rng);
    benchmark::DoNotOptimize(explore(degrees, rng));
  }
}
BENCHMARK(BM_Explore)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_SizeBiasedPrefix(benchmark::State& state) {
  const DegreeModel model = make_degree_model(1.5, 2, 1.0, state.range(0));
  const std::int64_t m = model.window_index(1.0);
  Stream rng = make_stream(4, "bench_prefix");
  for (auto _ : state) benchmark::DoNotOptimize(size_biased_prefix(model, m + 1, rng));
}
BENCHMARK(BM_SizeBiasedPrefix)->Arg(10000)->Arg(100000);

static void BM_KTildeQuadrature(benchmark::State& state) {
  const StableRef ref = stable_ref_from_ratio(1.5, 0.9, 1.0, 2.7);
  for (auto _ : state) benchmark::DoNotOptimize(k_tilde_laplace(ref, 1.0, 1.0));
}
BENCHMARK(BM_KTildeQuadrature)->Unit(benchmark::kMillisecond);

static void BM_MeasureChange(benchmark::State& state) {
  const DegreeModel model = make_degree_model(1.5, 2, 0.0, 10000);
  const std::int64_t m = model.window_index(0.5);
  const MeasureChange change(model, m);
  Stream rng = make_stream(5, "bench_phi");
  std::vector<std::int64_t> prefix(static_cast<std::size_t>(m));
  for (auto& z : prefix) z = sample_size_biased_child(model, rng);
  for (auto _ : state) benchmark::DoNotOptimize(change.estimate(prefix, state.range(0), rng));
}
BENCHMARK(BM_MeasureChange)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
