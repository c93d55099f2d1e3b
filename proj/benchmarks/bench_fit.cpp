#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "piotrowski/piotrowski.hpp"
#include "piotrowski/synthetic.hpp"

using namespace piotrowski;

namespace {

ChangeDataset fixture(const std::string& name) {
  return load_dataset(std::string(PIOTROWSKI_FIXTURES_DIR) + "/" + name + ".csv");
}

void BM_MakeBins(benchmark::State& state) {
  const auto ds = fixture("wietszy");
  const int window = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(make_bins(ds, window, window / 2));
}
BENCHMARK(BM_MakeBins)->Arg(5)->Arg(20)->Arg(100);

void BM_FitDegree(benchmark::State& state) {
  const auto series = make_bins(fixture("abo_albo"), 20, 10);
  const int degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_logistic(series, degree, Weighting::Weighted));
}
BENCHMARK(BM_FitDegree)->DenseRange(1, 6);

void BM_FitBins(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const int width = 10;
  const int last = 1400 + width * static_cast<int>(state.range(0));
  const auto series = synthetic::logistic_bins(-82.238, 0.049, 1400, last, width, 500, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fit_logistic(series, 1, Weighting::Weighted));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitBins)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_ChiSquareSf(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chi_square_sf(x, 3));
    x = x < 50 ? x + 0.37 : 0.5;
  }
}
BENCHMARK(BM_ChiSquareSf);

void BM_GridSearch(benchmark::State& state) {
  const auto ds = fixture("wietszy");
  const auto lattice = default_lattice();
  GridOptions options;
  options.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_search(ds, lattice, lattice, Weighting::Unweighted, 1, options));
  }
}
BENCHMARK(BM_GridSearch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
