// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <vector>

#include "kbad/badset.hpp"
#include "kbad/dynamics.hpp"

namespace {

using namespace kbad;

const FieldSpec& sqrt2() {
  static const FieldSpec K = make_field({-2, 0, 1});
  return K;
}

void BM_Enumerate(benchmark::State& state) {
  const auto w = WeightVector::parse("1/3,2/3");
  const double bound = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_denominators(sqrt2(), w, 1.0, bound));
}

void BM_EnumerateReference(benchmark::State& state) {
  const auto w = WeightVector::parse("1/3,2/3");
  const double bound = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_denominators_reference(sqrt2(), w, 1.0, bound));
}

std::vector<double> t_grid(int n) {
  std::vector<double> ts;
  for (int i = 0; i < n; ++i) ts.push_back(20.0 * i / n);
  return ts;
}

void BM_Trajectory(benchmark::State& state) {
  const auto w = WeightVector::parse("1/2,1/2");
  const std::vector<double> x{0.1234, -0.4321};
  const auto ts = t_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(trajectory(sqrt2(), w, x, ts));
}

void BM_TrajectoryReference(benchmark::State& state) {
  const auto w = WeightVector::parse("1/2,1/2");
  const std::vector<double> x{0.1234, -0.4321};
  const auto ts = t_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(trajectory_reference(sqrt2(), w, x, ts));
}

}  // namespace

BENCHMARK(BM_Enumerate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateReference)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Trajectory)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrajectoryReference)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
