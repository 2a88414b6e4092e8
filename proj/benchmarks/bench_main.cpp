#include <benchmark/benchmark.h>

#include "ddforms/borcherds.hpp"
#include "ddforms/classification.hpp"
#include "ddforms/lift.hpp"

using namespace ddforms;

namespace {

void BM_SeriesMul(benchmark::State& state) {
  Window w = Window::box(std::nullopt, Rational(state.range(0)));
  TriSeries phi = expansion_at_infinity(registry_form("phi01"), w);
  for (auto _ : state) benchmark::DoNotOptimize(series_mul(phi, phi));
  state.SetLabel("q-precision " + std::to_string(state.range(0)));
}
BENCHMARK(BM_SeriesMul)->Arg(4)->Arg(8)->Arg(16);

void BM_EtaPower(benchmark::State& state) {
  Window w = Window::box(std::nullopt, Rational(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eta_qexpansion(1, w).pow_int(24));
}
BENCHMARK(BM_EtaPower)->Arg(20)->Arg(80);

void BM_Lift(benchmark::State& state) {
  Window w = siegel_window(Rational(state.range(0)), 1);
  const JacobiForm& phi = registry_form("nabla3_in");
  for (auto _ : state) benchmark::DoNotOptimize(arithmetic_lift(phi, 1, w));
}
BENCHMARK(BM_Lift)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_BorcherdsProduct(benchmark::State& state) {
  Window w = siegel_window(Rational(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(borcherds_expand("phi2", w));
}
BENCHMARK(BM_BorcherdsProduct)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_CuspExpansion(benchmark::State& state) {
  const JacobiForm& phi4 = registry_form("phi4");
  Window w = Window::box(std::nullopt, Rational(state.range(0)));
  auto cusps = cusps_gamma0(4);
  for (auto _ : state)
    for (const auto& c : cusps) benchmark::DoNotOptimize(cusp_expansion(phi4, c, w));
}
BENCHMARK(BM_CuspExpansion)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Classification(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_dd_candidates(state.range(0), state.range(0), 1));
}
BENCHMARK(BM_Classification)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
