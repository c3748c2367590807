// Serial reference vs OpenMP for each parallel kernel.
//   ./bench_kernels --benchmark_filter=Dft

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "rigidity/billiards.hpp"
#include "rigidity/functionals.hpp"
#include "rigidity/kernels.hpp"
#include "rigidity/operators.hpp"
#include "rigidity/reconstruction.hpp"

using namespace rigidity;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

const DomainProfile& profile() {
  static const auto p = build_profile({0.0, 0.0, 0.01}, 8);
  return p;
}

const BoundaryFrame& frame() {
  static const auto f = build_frame(profile(), 512);
  return f;
}

void BM_RealDft(benchmark::State& state) {
  std::vector<double> f(static_cast<std::size_t>(state.range(1)));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(std::cos(0.01 * i));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::real_dft(f, exec_of(state)));
}
BENCHMARK(BM_RealDft)->ArgsProduct({{0, 1}, {512, 2048}});

void BM_Tabulate(benchmark::State& state) {
  const std::size_t n = 1 << 16;
  std::vector<double> out(n);
  auto fn = [](std::size_t i) { return std::sin(1e-3 * i) * std::exp(-1e-5 * i); };
  for (auto _ : state) {
    kernels::tabulate(n, fn, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Tabulate)->Arg(0)->Arg(1);

void BM_BuildFrame(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_frame(profile(), 1024, exec_of(state)));
}
BENCHMARK(BM_BuildFrame)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MarkedOrbits(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(marked_orbits_range(frame(), 2, 48, exec_of(state)));
}
BENCHMARK(BM_MarkedOrbits)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AssembleT(benchmark::State& state) {
  static const auto orbits = marked_orbits_range(frame(), 2, 48);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_T(frame(), orbits, 48, 48, exec_of(state)));
}
BENCHMARK(BM_AssembleT)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_GammaNorm(benchmark::State& state) {
  const GammaSpaceParams p{3.5, 256, 256};
  const auto D = minus_identity(assemble_delta(p));
  for (auto _ : state) benchmark::DoNotOptimize(gamma_norm(D, 3.5, {}, exec_of(state)));
}
BENCHMARK(BM_GammaNorm)->Arg(0)->Arg(1);

void BM_Suite(benchmark::State& state) {
  SuiteOptions o;
  o.functions_per_domain = 4;
  for (auto _ : state) benchmark::DoNotOptimize(rigidity_suite(o, exec_of(state)));
}
BENCHMARK(BM_Suite)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
