#include <benchmark/benchmark.h>

#include "reyeweb/reye.hpp"
#include "reyeweb/web.hpp"

namespace {

const reyeweb::Web& bench_web() {
  static const reyeweb::Web web = reyeweb::generate_web(1);
  return web;
}

void run_nodes(benchmark::State& state, reyeweb::Exec exec) {
  const reyeweb::Web& web = bench_web();
  for (auto _ : state) {
    reyeweb::Rng rng(7);
    reyeweb::NodeOptions opts;
    opts.exec = exec;
    reyeweb::NodeSearch r = reyeweb::find_nodes_search(web, rng, opts);
    benchmark::DoNotOptimize(r.nodes.size());
  }
}

void run_samples(benchmark::State& state, reyeweb::Exec exec) {
  const reyeweb::Web& web = bench_web();
  for (auto _ : state) {
    reyeweb::Rng rng(11);
    auto lines = reyeweb::sample_reye_lines(web, rng, 16, exec);
    benchmark::DoNotOptimize(lines.size());
  }
}

void BM_nodes_serial(benchmark::State& state) { run_nodes(state, reyeweb::Exec::Serial); }
void BM_nodes_parallel(benchmark::State& state) { run_nodes(state, reyeweb::Exec::Parallel); }
void BM_samples_serial(benchmark::State& state) { run_samples(state, reyeweb::Exec::Serial); }
void BM_samples_parallel(benchmark::State& state) {
  run_samples(state, reyeweb::Exec::Parallel);
}

BENCHMARK(BM_nodes_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nodes_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_samples_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_samples_parallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
