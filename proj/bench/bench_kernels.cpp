#include <benchmark/benchmark.h>

#include <string>

#include "fdstab/cauchy.hpp"
#include "fdstab/frequency_forms.hpp"
#include "fdstab/scheme.hpp"
#include "fdstab/trace.hpp"

namespace {

using namespace fdstab;

SchemeDef load(const char* file) {
  return SchemeDef::load(std::string(FDSTAB_SCHEME_DIR "/") + file);
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

void BM_FormTable(benchmark::State& state) {
  const SchemeDef scheme = load("ab3_centered.scm");
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_form_table(scheme, 128, {}, exec_of(state)));
  }
}

void BM_PowerScan(benchmark::State& state) {
  const SchemeDef scheme = load("leapfrog.scm");
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_bound_scan(scheme, 128, 50, exec_of(state)));
  }
}

void BM_RootClassification(benchmark::State& state) {
  const SchemeDef scheme = load("ab3_centered.scm");
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        classify_roots(scheme, 256, 1e-6, exec_of(state)));
  }
}

void BM_CauchyRun(benchmark::State& state) {
  const SchemeDef scheme = load("leapfrog.scm");
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_cauchy(scheme, 256, 20, 1, {}, exec_of(state)));
  }
}

void BM_MarginScan(benchmark::State& state) {
  const SchemeDef scheme = load("leapfrog.scm");
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        central_margin_scan(scheme, 200, 2.7, 1, 1e-3, 8, exec_of(state)));
  }
}

void BM_TraceScan(benchmark::State& state) {
  const SchemeDef scheme = load("leapfrog.scm");
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        trace_scan(scheme, 500, 5, 2.7, 1, exec_of(state)));
  }
}

// Argument 0 runs the serial reference path, 1 the threaded kernels.
BENCHMARK(BM_FormTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RootClassification)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CauchyRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MarginScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TraceScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
