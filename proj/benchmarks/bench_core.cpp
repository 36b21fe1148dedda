#include <benchmark/benchmark.h>

#include <cmath>

#include "lentparticle/catalog.hpp"
#include "lentparticle/ibp.hpp"
#include "lentparticle/jump_measure.hpp"
#include "lentparticle/lent_particle.hpp"
#include "lentparticle/rng.hpp"

namespace {

lp::StreamKey origin(std::uint64_t path) { return {1, path, 0, lp::StreamTag::Skeleton, 0}; }

void BM_PhiloxUniform(benchmark::State& state) {
  lp::RngStream s({1, 0, 0, lp::StreamTag::Generic, 0});
  for (auto _ : state) benchmark::DoNotOptimize(s.uniform());
}
BENCHMARK(BM_PhiloxUniform);

void BM_PhiloxGaussian(benchmark::State& state) {
  lp::RngStream s({1, 0, 0, lp::StreamTag::Generic, 0});
  for (auto _ : state) benchmark::DoNotOptimize(s.gaussian());
}
BENCHMARK(BM_PhiloxGaussian);

void BM_SamplePath(benchmark::State& state) {
  const auto m = lp::LevyMeasureSpec::power_law(0.5, 1.0, std::pow(10.0, -static_cast<double>(state.range(0))));
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lp::sample_path(m, 1.0, origin(i++)));
}
BENCHMARK(BM_SamplePath)->Arg(2)->Arg(4);

void BM_SampleMarks(benchmark::State& state) {
  const auto m = lp::LevyMeasureSpec::power_law(0.5, 1.0, 1e-6);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lp::sample_marks(m, 1.0, origin(i++)));
}
BENCHMARK(BM_SampleMarks);

void BM_JetSystemSolve(benchmark::State& state) {
  const auto sc = lp::make_scenario(state.range(0) == 0 ? "compound-linear" : "simple2d");
  const lp::JetSystem js(*sc, static_cast<int>(state.range(1)));
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(js.solve(lp::sample_path(sc->measure(), sc->horizon(), origin(i++))));
}
BENCHMARK(BM_JetSystemSolve)->Args({0, 1})->Args({0, 2})->Args({1, 1})->Args({1, 2});

void BM_PathWeights(benchmark::State& state) {
  const auto sc = lp::make_scenario("compound");
  const lp::JetSystem js(*sc, 2);
  std::vector<lp::Trajectory> trajs;
  for (std::uint64_t i = 0; i < 64; ++i) trajs.push_back(js.solve(lp::sample_path(sc->measure(), sc->horizon(), origin(i))));
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lp::path_weights(*sc, trajs[k++ % trajs.size()], static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PathWeights)->Arg(1)->Arg(2);

void BM_LaplaceExponent(benchmark::State& state) {
  const auto m = lp::LevyMeasureSpec::power_law(0.5, 1.0, 0.0);
  const double lambda = std::pow(10.0, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lp::laplace_exponent(lambda, [](double y) { return y * y; }, m));
}
BENCHMARK(BM_LaplaceExponent)->Arg(4)->Arg(14);

}  // namespace

BENCHMARK_MAIN();
