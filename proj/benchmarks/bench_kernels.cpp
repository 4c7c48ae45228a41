// Serial reference vs OpenMP kernels: detection metrics and the latency sweeps.

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "teleop/bench/reports.hpp"
#include "teleop/perception/detector.hpp"
#include "teleop/perception/metrics.hpp"

using namespace teleop;
using perception::Execution;

namespace {

struct Dataset {
  std::vector<perception::Prediction> preds;
  std::vector<perception::GroundTruth> gts;
};

const Dataset& dataset(int frames) {
  static std::map<int, Dataset> cache;
  auto [it, fresh] = cache.try_emplace(frames);
  if (fresh) {
    Rng rng(11);
    perception::ClassSet classes;
    for (std::uint64_t f = 0; f < std::uint64_t(frames); ++f) {
      auto scene = perception::random_scene(rng, classes, 4);
      for (const auto& o : scene) it->second.gts.push_back({f, o.class_id, o.box});
      for (const auto& d : perception::detect(scene, perception::NoiseModel{}, rng, classes))
        it->second.preds.push_back({f, d});
    }
  }
  return it->second;
}

void BM_MapMetric(benchmark::State& state, Execution exec) {
  const auto& d = dataset(int(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(perception::map_metric(d.preds, d.gts, {}, exec));
  }
  state.counters["predictions"] = double(d.preds.size());
}

void BM_Table2(benchmark::State& state, Execution exec) {
  bench::Table2Config cfg;
  cfg.exec = exec;
  for (auto _ : state) benchmark::DoNotOptimize(bench::run_table2(cfg));
}

void BM_Table3(benchmark::State& state, Execution exec) {
  bench::Table3Config cfg;
  cfg.exec = exec;
  for (auto _ : state) benchmark::DoNotOptimize(bench::run_table3(cfg));
}

}  // namespace

BENCHMARK_CAPTURE(BM_MapMetric, serial, Execution::Serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MapMetric, parallel, Execution::Parallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Table2, serial, Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Table2, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Table3, serial, Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Table3, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
