// Serial reference vs OpenMP kernels on meshes of increasing size.

#include "dfn/energy.hpp"
#include "dfn/presets.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

using namespace dfn;

namespace {

struct Fixture {
  ProblemSpec spec;
  Mesh mesh;
  RegimeField regimes;
  std::vector<double> speeds;
  Solution solution;
};

const Fixture& fixture(std::int64_t elements) {
  static std::map<std::int64_t, Fixture> cache;
  auto it = cache.find(elements);
  if (it != cache.end()) return it->second;
  Fixture f;
  f.spec = case1_spec(true);
  f.mesh = build_mesh(f.spec.network, 1.0 / static_cast<double>(elements));
  f.regimes.resize(f.mesh.element_count());
  f.speeds.resize(f.mesh.element_count());
  for (std::size_t g = 0; g < f.regimes.size(); ++g) {
    f.regimes[g] = g % 2 ? Regime::High : Regime::Low;
    f.speeds[g] = 0.3 * static_cast<double>(g % 11) / 11.0;
  }
  // A nodal field with many threshold crossings for the classifier.
  f.solution.mesh = f.mesh;
  f.solution.flux.assign(1, {});
  for (double x : f.mesh.branch(0).nodes) f.solution.flux[0].push_back(0.3 * std::sin(200.0 * x));
  return cache.emplace(elements, std::move(f)).first->second;
}

Execution exec_of(const benchmark::State& state) {
  return state.range(1) ? Execution::Parallel : Execution::Serial;
}

void label(benchmark::State& state) { state.SetLabel(state.range(1) ? "parallel" : "serial"); }

void BM_ElementBlocks(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(element_blocks(f.mesh, f.regimes, f.spec.law, f.speeds, f.spec.network, exec_of(state)));
  label(state);
}

void BM_ClassifyBase(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(classify_base_elements(f.solution, f.mesh, 0.15, 1e-10, exec_of(state)));
  label(state);
}

void BM_EnergyProfile(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  const auto lifted = lift_field(f.spec.network, f.mesh);
  const auto psi = build_psi(f.spec.law);
  std::vector<double> alphas(1000);
  for (std::size_t i = 0; i < alphas.size(); ++i) alphas[i] = -1.0 + 2.0 * static_cast<double>(i) / 999.0;
  for (auto _ : state) benchmark::DoNotOptimize(energy_profile(lifted, 0.05, psi, alphas, exec_of(state)));
  label(state);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (std::int64_t n : {1000, 100000})
    for (std::int64_t par : {0, 1}) b->Args({n, par});
}

}  // namespace

BENCHMARK(BM_ElementBlocks)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ClassifyBase)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EnergyProfile)->Args({1000, 0})->Args({1000, 1})->Args({20000, 0})->Args({20000, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
