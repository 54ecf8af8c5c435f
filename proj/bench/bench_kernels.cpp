// Parallel kernels against their serial references at the reference scale
// (4000 nodes, 4000 m square, 300 m range).

#include <benchmark/benchmark.h>

#include <vector>

#include "sinkdir/engine.hpp"
#include "sinkdir/metrics.hpp"
#include "sinkdir/protocol.hpp"
#include "sinkdir/topology.hpp"

namespace {

using namespace sinkdir;

const std::vector<Point>& layout() {
  static const auto points = place_nodes(4000, 4000.0, 1);
  return points;
}

NodeId sink() { return nearest_node(layout(), {200.0, 200.0}); }

void BM_ListenGraphSerial(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_listen_graph_serial(layout(), 300.0, k, {}, sink()));
}
BENCHMARK(BM_ListenGraphSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ListenGraphParallel(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_listen_graph(layout(), 300.0, k, {}, sink()));
}
BENCHMARK(BM_ListenGraphParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DegreeSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(degree_stats_serial(layout(), 300.0, 4000.0));
}
BENCHMARK(BM_DegreeSerial)->Unit(benchmark::kMillisecond);

void BM_DegreeParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(degree_stats(layout(), 300.0, 4000.0));
}
BENCHMARK(BM_DegreeParallel)->Unit(benchmark::kMillisecond);

void BM_TwoHopSerial(benchmark::State& state) {
  const auto graph = build_listen_graph(layout(), 300.0, 32, {}, sink());
  for (auto _ : state) benchmark::DoNotOptimize(TwoHopTable::build_serial(graph));
}
BENCHMARK(BM_TwoHopSerial)->Unit(benchmark::kMillisecond);

void BM_TwoHopParallel(benchmark::State& state) {
  const auto graph = build_listen_graph(layout(), 300.0, 32, {}, sink());
  for (auto _ : state) benchmark::DoNotOptimize(TwoHopTable(graph));
}
BENCHMARK(BM_TwoHopParallel)->Unit(benchmark::kMillisecond);

void BM_RapidRun(benchmark::State& state) {
  const auto graph = build_listen_graph(layout(), 300.0, 8, {}, sink());
  ProtocolConfig cfg;
  cfg.f = 1.1;
  for (auto _ : state) benchmark::DoNotOptimize(run(graph, cfg, 1));
}
BENCHMARK(BM_RapidRun)->Unit(benchmark::kMillisecond);

SweepSpec small_grid() {
  SweepSpec spec;
  spec.f_values = {1.0, 1.1, 1.2};
  spec.k_values = {8, 16};
  return spec;
}

void BM_SweepSerial(benchmark::State& state) {
  const std::vector<SweepReplicate> reps{{layout(), sink(), 1}};
  for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(reps, small_grid()));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

void BM_SweepParallel(benchmark::State& state) {
  const std::vector<SweepReplicate> reps{{layout(), sink(), 1}};
  for (auto _ : state) benchmark::DoNotOptimize(sweep(reps, small_grid()));
}
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
