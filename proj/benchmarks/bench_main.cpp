// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "jumpcd/cdfun.hpp"
#include "jumpcd/harnack.hpp"
#include "jumpcd/heat.hpp"
#include "jumpcd/inequality.hpp"
#include "jumpcd/operators.hpp"
#include "jumpcd/upsilon.hpp"

using namespace jumpcd;

namespace {

LatticeFunction random_function(std::int64_t W, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(2 * W + 1));
  for (double& x : v) x = d(rng);
  v[static_cast<std::size_t>(W)] = 0.0;
  return LatticeFunction(W, v, 0.25);
}

void BM_ScalarH(benchmark::State& s) {
  double x = -3.0, acc = 0.0;
  for (auto _ : s) {
    acc += H_eval(x) + upsilon(x);
    x = x > 3.0 ? -3.0 : x + 1e-3;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_ScalarH);

void BM_HPrimeInverse(benchmark::State& s) {
  double y = 1e-3, acc = 0.0;
  for (auto _ : s) {
    acc += H_prime_inv(y);
    y = y > 1e6 ? 1e-3 : y * 1.01;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_HPrimeInverse);

// Uncached l1 of slowly and quickly decaying kernels.
void BM_L1Aggregate(benchmark::State& s) {
  const Kernel k = s.range(0) == 0 ? Kernel::power(1.5) : Kernel::log(2.5);
  for (auto _ : s) {
    benchmark::DoNotOptimize(k.weighted_sum([](double, double) { return 1.0; }, 1e-10));
  }
  s.SetLabel(k.label());
}
BENCHMARK(BM_L1Aggregate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Psi2(benchmark::State& s) {
  const Kernel k = Kernel::power(1.5);
  const LatticeFunction u = random_function(s.range(0), 1);
  for (auto _ : s) benchmark::DoNotOptimize(psi2_upsilon(k, u, 0));
}
BENCHMARK(BM_Psi2)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LagrangeG(benchmark::State& s) {
  const CDFunction G = lagrange_G(Kernel::power(1.5));
  G(1e-3);  // fill the knot table over the sampled range
  G(50.0);
  double a = 1e-3, acc = 0.0;
  for (auto _ : s) {
    acc += G(a);
    a = a > 40.0 ? 1e-3 : a * 1.05;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_LagrangeG);

void BM_Propagator(benchmark::State& s) {
  const GeneratorMatrix G = build_generator(Kernel::power(1.5), s.range(0), GeneratorMode::killed);
  for (auto _ : s) benchmark::DoNotOptimize(propagator(G, 1.0));
}
BENCHMARK(BM_Propagator)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_OptimizePath(benchmark::State& s) {
  const Kernel k = Kernel::exponential(0.5);
  for (auto _ : s) benchmark::DoNotOptimize(optimize_path(k, 0, s.range(0)));
}
BENCHMARK(BM_OptimizePath)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_CdAdversarial(benchmark::State& s) {
  const Kernel k = Kernel::power(1.5);
  const CDFunction F = lagrange_G(k);
  for (auto _ : s) benchmark::DoNotOptimize(cd_adversarial(k, F, 24, 200, 1));
}
BENCHMARK(BM_CdAdversarial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
