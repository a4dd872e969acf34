#include <benchmark/benchmark.h>

#include "nfbeam/beam_training.hpp"
#include "nfbeam/dataset.hpp"
#include "nfbeam/nn/network.hpp"

using namespace nfbeam;

namespace {

Config at_scale(std::size_t n) {
  Config c = desk_scale();
  c.array = ArrayConfig::half_wavelength(n);
  return c;
}

void BM_NearSteering(benchmark::State& state) {
  const ArrayConfig a = ArrayConfig::half_wavelength(static_cast<std::size_t>(state.range(0)));
  double theta = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(near_steering(a, theta, 25.0));
    theta = -theta;
  }
}
BENCHMARK(BM_NearSteering)->Arg(64)->Arg(512);

void BM_SweepOracle(benchmark::State& state) {
  const Config c = at_scale(static_cast<std::size_t>(state.range(0)));
  const CodebookSet books = build_codebooks(c);
  Rng rng(1);
  const ChannelVector h = synth_channel(c.array, sample_paths(rng, c.scenario));
  for (auto _ : state) benchmark::DoNotOptimize(sweep_oracle(books.polar, h));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(books.polar.size()));
}
BENCHMARK(BM_SweepOracle)->Arg(64)->Arg(512);

void BM_GenerateSample(benchmark::State& state) {
  const Config c = at_scale(64);
  const CodebookSet books = build_codebooks(c);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_sample(c, books, seed++));
}
BENCHMARK(BM_GenerateSample);

void BM_TrainStep(benchmark::State& state) {
  const Config c = desk_scale();
  Rng rng(2);
  nn::NetworkModel model = nn::build_network(c.net, c.num_wide(), c.array.num_antennas, rng);
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  nn::Tensor x({batch, 2, c.num_wide()});
  for (double& v : x.values()) v = rng.normal();
  std::vector<std::uint32_t> labels(batch);
  for (auto& l : labels) l = static_cast<std::uint32_t>(rng.below(c.array.num_antennas));
  for (auto _ : state) benchmark::DoNotOptimize(nn::compute_gradients(model, x, labels));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_TrainStep)->Arg(32)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const Config c = desk_scale();
  Rng rng(3);
  const nn::NetworkModel model = nn::build_network(c.net, c.num_wide(), c.array.num_antennas, rng);
  nn::Tensor x({2, c.num_wide()});
  for (double& v : x.values()) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_one(x));
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
