#include <benchmark/benchmark.h>

#include "grindwatch/pipeline.hpp"
#include "grindwatch/simgrind.hpp"

using namespace grindwatch;

namespace {

const std::vector<PowerTrace>& wheel1_traces() {
  static const auto traces = generate_wheel(default_preset(42).wheel("wheel1"));
  return traces;
}

const TraceMatrix& wheel1_matrix() {
  static const auto x = build_matrix(wheel1_traces(), kDefaultResampleLength);
  return x;
}

const ModelBundle& wheel1_model() {
  static const auto model = fit_model(wheel1_matrix()).bundle;
  return model;
}

void BM_Resample(benchmark::State& state) {
  const auto& trace = wheel1_traces().front();
  const auto length = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(resample(trace, length));
}
BENCHMARK(BM_Resample)->Arg(128)->Arg(512)->Arg(2048);

void BM_FitPca(benchmark::State& state) {
  const auto& x = wheel1_matrix();
  for (auto _ : state) benchmark::DoNotOptimize(fit_pca(x, {ComponentCount{3}}));
}
BENCHMARK(BM_FitPca)->Unit(benchmark::kMillisecond);

void BM_FitModel(benchmark::State& state) {
  const auto& x = wheel1_matrix();
  for (auto _ : state) benchmark::DoNotOptimize(fit_model(x));
}
BENCHMARK(BM_FitModel)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const auto& model = wheel1_model();
  const auto& trace = wheel1_traces().back();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(model, trace));
}
BENCHMARK(BM_Evaluate);

void BM_Observe(benchmark::State& state) {
  const auto& model = wheel1_model();
  const auto& traces = wheel1_traces();
  for (auto _ : state) {
    auto s = MonitorState::start(model);
    for (const auto& t : traces) s = observe(s, model, t).state;
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(traces.size()));
}
BENCHMARK(BM_Observe)->Unit(benchmark::kMillisecond);

void BM_GenerateTrace(benchmark::State& state) {
  const auto wheel = default_preset(42).wheel("wheel1");
  for (auto _ : state) benchmark::DoNotOptimize(generate_trace(wheel, 600, 0));
}
BENCHMARK(BM_GenerateTrace);

}  // namespace

BENCHMARK_MAIN();
