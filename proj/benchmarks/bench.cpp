#include <benchmark/benchmark.h>

#include "maplab/gaussian.hpp"
#include "maplab/sequence.hpp"
#include "maplab/smallball.hpp"

namespace {

using maplab::Vec;

maplab::PriorSpec bench_prior(std::size_t k) {
  return maplab::PriorSpec::from_law(2.0, 1.0, 1.0, k);
}

void bm_lp_norm(benchmark::State& state) {
  std::size_t k = static_cast<std::size_t>(state.range(0));
  Vec x(k);
  for (std::size_t j = 0; j < k; ++j) x[j] = 0.3 * static_cast<double>(j % 7) - 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(maplab::lp_norm(x, 1.5));
}
BENCHMARK(bm_lp_norm)->Arg(16)->Arg(256);

void bm_sample_point(benchmark::State& state) {
  auto g = maplab::DiagonalGaussian::from_prior(bench_prior(32));
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(maplab::sample_point(g, 17, i++));
}
BENCHMARK(bm_sample_point);

void bm_ball_mass_mc(benchmark::State& state) {
  auto g = maplab::DiagonalGaussian::from_prior(bench_prior(4));
  auto q = maplab::BallQuery::make(Vec(4, 0.2), 1.0, 2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(maplab::ball_mass_mc(g, q, 10000, 5));
}
BENCHMARK(bm_ball_mass_mc);

void bm_ball_mass_uniform(benchmark::State& state) {
  auto g = maplab::DiagonalGaussian::from_prior(bench_prior(4));
  auto q = maplab::BallQuery::make(Vec(4, 0.2), 0.01, 2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(maplab::ball_mass_uniform(g, q, 10000, 5));
}
BENCHMARK(bm_ball_mass_uniform);

}  // namespace

BENCHMARK_MAIN();
