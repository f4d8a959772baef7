#include "xtal/decomp.hpp"
#include "xtal/energy.hpp"
#include "xtal/lattice.hpp"
#include "xtal/paths.hpp"
#include "xtal/potential.hpp"
#include "xtal/topology.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace xtal;

namespace {

struct Setup {
  PotentialPair v = tune_equilibrium(build_canonical_pair(0.05)).pair;
  PotentialTriple psi = build_canonical_triple(0.05);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

Configuration jittered_ball(Real radius) {
  Configuration c = lattice_ball(LatticeKind::FCC, radius);
  std::mt19937_64 rng(1);
  std::normal_distribution<Real> n(0.0, 0.01);
  for (auto& p : c.positions) p += Vec3(n(rng), n(rng), n(rng));
  return c;
}

void BM_Energy(benchmark::State& state) {
  const auto c = jittered_ball(static_cast<Real>(state.range(0)));
  set_thread_count(1);
  for (auto _ : state) benchmark::DoNotOptimize(energy(c, setup().v, setup().psi).total);
  state.counters["particles"] = static_cast<double>(c.size());
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.size()));
}
BENCHMARK(BM_Energy)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Forces(benchmark::State& state) {
  const auto c = jittered_ball(static_cast<Real>(state.range(0)));
  set_thread_count(1);
  for (auto _ : state) benchmark::DoNotOptimize(forces(c, setup().v, setup().psi).data());
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.size()));
}
BENCHMARK(BM_Forces)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto c = jittered_ball(static_cast<Real>(state.range(0)));
  set_thread_count(1);
  for (auto _ : state) {
    const auto g = bond_graph(c, 0.05);
    benchmark::DoNotOptimize(classify(c, g).cls.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.size()));
}
BENCHMARK(BM_Classify)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const auto c = jittered_ball(static_cast<Real>(state.range(0)));
  set_thread_count(1);
  const auto g = bond_graph(c, 0.05);
  const auto s = classify(c, g);
  for (auto _ : state) {
    const auto ps = pair_sets(c, g, s, setup().v);
    benchmark::DoNotOptimize(decompose(c, setup().v, setup().psi, s, ps).total);
  }
}
BENCHMARK(BM_Decompose)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_EnumeratePaths(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_paths(2.0).size());
}
BENCHMARK(BM_EnumeratePaths)->Unit(benchmark::kMicrosecond);

void BM_NormalizationCheck(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(normalization_check(Vec3i(3, 2, 1)).sum);
}
BENCHMARK(BM_NormalizationCheck)->Unit(benchmark::kMicrosecond);

void BM_Efcc(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(efcc(setup().v, setup().psi, 1.0));
}
BENCHMARK(BM_Efcc)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
