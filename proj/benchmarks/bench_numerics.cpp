#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "orbitforge/divdiff.hpp"
#include "orbitforge/faa.hpp"
#include "orbitforge/scalar_family.hpp"

using namespace orbitforge;

namespace {

struct Sample {
  Grid grid;
  std::vector<double> values;
};

Sample sample(int k) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(k));
  std::uniform_real_distribution<double> gap(1e-3, 1.0), val(-10.0, 10.0);
  std::vector<double> x{0.0};
  for (int i = 0; i < k; ++i) x.push_back(x.back() + gap(rng));
  std::vector<double> y(x.size());
  for (auto& v : y) v = val(rng);
  return {Grid(x), y};
}

void BM_DividedDifferenceRecursive(benchmark::State& state) {
  const Sample s = sample(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dd_recursive(s.grid, s.values).leading());
}
BENCHMARK(BM_DividedDifferenceRecursive)->DenseRange(2, 8, 3);

void BM_DividedDifferenceWeighted(benchmark::State& state) {
  const Sample s = sample(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dd_weighted(s.grid, s.values));
}
BENCHMARK(BM_DividedDifferenceWeighted)->DenseRange(2, 8, 3);

void BM_DividedDifferenceVandermonde(benchmark::State& state) {
  const Sample s = sample(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dd_vandermonde(s.grid, s.values));
}
BENCHMARK(BM_DividedDifferenceVandermonde)->DenseRange(2, 8, 3);

void BM_FaaDiBruno(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  std::vector<double> F(static_cast<std::size_t>(r), 0.7), G(static_cast<std::size_t>(r), -1.3);
  for (auto _ : state) benchmark::DoNotOptimize(faa_di_bruno(F, G, r));
}
BENCHMARK(BM_FaaDiBruno)->DenseRange(2, 8, 2);

void BM_JetCompose(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const Jet inner = ScalarFamily::parse("sin(z) + z^2").jet(0.3, order);
  const Jet outer = ScalarFamily::parse("exp(z)").jet(inner.value(), order);
  for (auto _ : state) benchmark::DoNotOptimize(jet_compose(outer, inner));
}
BENCHMARK(BM_JetCompose)->DenseRange(2, 8, 2);

void BM_CkNorm(benchmark::State& state) {
  const auto f = ScalarFamily::parse("exp(sin(3*z)) + z^4");
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ck_norm(f, {-0.5, 0.5}, k));
}
BENCHMARK(BM_CkNorm)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
