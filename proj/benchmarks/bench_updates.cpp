#include <benchmark/benchmark.h>

#include "sgdinf/baselines.hpp"
#include "sgdinf/bench.hpp"
#include "sgdinf/random_scaling.hpp"
#include "sgdinf/sgd.hpp"

using namespace sgdinf;

namespace {

std::vector<double> wiggle(std::size_t d, std::size_t k) {
  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = 0.5 + 1e-3 * double((i * 7 + k) % 13);
  return v;
}

void BM_RandomScalingFull(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  RandomScalingState rs(d);
  const auto a = wiggle(d, 0);
  const auto b = wiggle(d, 5);
  std::size_t k = 0;
  for (auto _ : state) {
    rs.update(++k % 2 ? a : b);
  }
  benchmark::DoNotOptimize(rs.b_sum().data());
}
BENCHMARK(BM_RandomScalingFull)->Arg(5)->Arg(20)->Arg(200)->Arg(800);

void BM_RandomScalingScalar(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  ScalarScalingState rs(0);
  const auto a = wiggle(d, 0);
  const auto b = wiggle(d, 5);
  std::size_t k = 0;
  for (auto _ : state) {
    rs.update(++k % 2 ? a : b);
    benchmark::ClobberMemory();
  }
  benchmark::DoNotOptimize(rs.count());
}
BENCHMARK(BM_RandomScalingScalar)->Arg(5)->Arg(200)->Arg(800);

void BM_BatchMeans(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  BatchMeansState bm(d, BatchAnchorRule::for_learning_rate(0.505));
  const auto a = wiggle(d, 1);
  for (auto _ : state) bm.update(a);
  benchmark::DoNotOptimize(bm.total_weight());
}
BENCHMARK(BM_BatchMeans)->Arg(5)->Arg(20)->Arg(200);

void BM_PlugIn(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  LogisticModel model(d);
  PlugInState pi(d);
  const auto data = generate_logistic(SeedSpec{1, 0}, d, 256);
  const std::vector<double> beta(d, 0.1);
  std::size_t k = 0;
  for (auto _ : state) pi.update(model, beta, data[k++ % data.size()]);
  benchmark::DoNotOptimize(pi.count());
}
BENCHMARK(BM_PlugIn)->Arg(5)->Arg(20)->Arg(200);

void BM_SgdStep(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  LogisticModel model(d);
  const auto data = generate_logistic(SeedSpec{2, 0}, d, 256);
  const StepSchedule sched(0.5, 0.505);
  SgdState s{ParamVector(d)};
  std::size_t k = 0;
  for (auto _ : state) s.step(model, data[k++ % data.size()], sched);
  benchmark::DoNotOptimize(s.t());
}
BENCHMARK(BM_SgdStep)->Arg(5)->Arg(20)->Arg(200);

}  // namespace
BENCHMARK_MAIN();
