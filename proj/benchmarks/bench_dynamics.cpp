#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "orbitforge/action.hpp"
#include "orbitforge/fhverify.hpp"
#include "orbitforge/orbitsim.hpp"

using namespace orbitforge;

namespace {

ActionSpec dance(const std::string& phi) {
  const double eps = 0.5;
  ActionSpec spec;
  spec.n = 2;
  spec.eps = eps;
  const auto c = ScalarFamily::parse("cos(" + phi + ")", {}, eps);
  spec.A = MatrixFamily(2,
                        {c, ScalarFamily::parse("sin(" + phi + ")", {}, eps),
                         ScalarFamily::parse("-sin(" + phi + ")", {}, eps), c},
                        eps);
  return spec;
}

FhInstance translation() {
  FhInstance in;
  in.k = 2;
  in.eps = 0.5;
  in.h0 = ScalarFamily::parse("z^2/2", {}, in.eps);
  in.h = in.h0;
  in.B = in.B_k = in.B_k1 = 1.0;
  in.eta = 0.9 / (2.0 * ck_constant(2, 1.0));
  in.f = ScalarFamily::parse("z + d", {{"d", 0.5 * in.eta}}, in.eps);
  return in;
}

void BM_FhSweep(benchmark::State& state) {
  const FhInstance in = translation();
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fh_sweep(in, grid).passed());
}
BENCHMARK(BM_FhSweep)->Arg(11)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_Condition1(benchmark::State& state) {
  const ActionSpec s = dance("cos(2*pi*(z+0.25))^3");
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(condition1_check(s, k).condition1_holds);
}
BENCHMARK(BM_Condition1)->DenseRange(1, 3);

void BM_BuildPerturbation(benchmark::State& state) {
  const ActionSpec s = dance("cos(2*pi*z)");
  for (auto _ : state) benchmark::DoNotOptimize(build_perturbation(s, 1, 0.1).blend_distance);
}
BENCHMARK(BM_BuildPerturbation)->Unit(benchmark::kMillisecond);

void BM_ClassifyOrbit(benchmark::State& state) {
  const PerturbedAction p = build_perturbation(dance("cos(2*pi*z)"), 1, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(classify_orbit(p.result, 0.0).status);
}
BENCHMARK(BM_ClassifyOrbit)->Unit(benchmark::kMillisecond);

void BM_RotationNumber(benchmark::State& state) {
  const double tp = 2.0 * std::numbers::pi;
  const Lift F = [tp](double x) { return x + 0.3 + 0.05 * std::sin(tp * x); };
  for (auto _ : state) benchmark::DoNotOptimize(rotation_number(F, state.range(0)).estimate);
}
BENCHMARK(BM_RotationNumber)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
