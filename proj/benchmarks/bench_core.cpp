#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fedsleep/common/rng.hpp"
#include "fedsleep/defense/autoencoder_filter.hpp"
#include "fedsleep/defense/krum.hpp"
#include "fedsleep/fed/federation.hpp"
#include "fedsleep/nn/mlp.hpp"
#include "fedsleep/radio/network.hpp"

using namespace fedsleep;

namespace {

const nn::MlpSpec kQNet{{12, 64, 32, 3}};

nn::Matrix random_matrix(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  nn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

std::vector<nn::ParamVector> random_models(Rng& rng, int n) {
  std::normal_distribution<double> nd(0.0, 0.1);
  std::vector<nn::ParamVector> out;
  for (int i = 0; i < n; ++i) {
    auto p = nn::init_params(kQNet, rng, i);
    for (auto& x : p.values()) x += nd(rng);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<fed::SubmissionView> views(const std::vector<nn::ParamVector>& v) {
  std::vector<fed::SubmissionView> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back({static_cast<int>(i), &v[i]});
  return out;
}

void BM_MlpForward(benchmark::State& state) {
  Rng rng = make_rng(1, Stream::kOracle);
  const auto p = nn::init_params(kQNet, rng);
  const auto x = random_matrix(rng, static_cast<int>(state.range(0)), 12);
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward_batch(p, kQNet, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(64)->Arg(256);

void BM_MlpForwardBackward(benchmark::State& state) {
  Rng rng = make_rng(2, Stream::kOracle);
  const auto p = nn::init_params(kQNet, rng);
  const auto x = random_matrix(rng, static_cast<int>(state.range(0)), 12);
  const auto up = random_matrix(rng, static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    nn::ForwardCache cache;
    nn::forward_batch(p, kQNet, x, &cache);
    benchmark::DoNotOptimize(nn::backward_batch(p, kQNet, cache, up));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForwardBackward)->Arg(64)->Arg(256);

void BM_NetworkStep(benchmark::State& state) {
  radio::ScenarioConfig c;
  c.n_sbs = static_cast<int>(state.range(0));
  radio::Network net(c);
  const std::vector<int> actions(c.n_sbs, 0);
  for (auto _ : state) benchmark::DoNotOptimize(net.step(actions));
}
BENCHMARK(BM_NetworkStep)->Arg(8)->Arg(20);

void BM_FedAvg(benchmark::State& state) {
  Rng rng = make_rng(3, Stream::kOracle);
  const auto models = random_models(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fed::fed_avg(models));
}
BENCHMARK(BM_FedAvg)->Arg(8)->Arg(20);

void BM_Krum(benchmark::State& state) {
  Rng rng = make_rng(4, Stream::kOracle);
  const auto models = random_models(rng, static_cast<int>(state.range(0)));
  const auto prev = nn::init_params(kQNet, rng);
  const auto v = views(models);
  for (auto _ : state) benchmark::DoNotOptimize(defense::krum_select(v, prev));
}
BENCHMARK(BM_Krum)->Arg(8)->Arg(20);

void BM_AutoencoderFilter(benchmark::State& state) {
  Rng rng = make_rng(5, Stream::kOracle);
  const auto models = random_models(rng, 20);
  const auto prev = nn::init_params(kQNet, rng);
  const auto v = views(models);
  defense::AeFilterConfig cfg;
  cfg.hidden = {64};
  cfg.latent_width = 16;
  cfg.epochs = 60;
  for (auto _ : state) benchmark::DoNotOptimize(defense::two_step_filter(v, prev, cfg, 1));
}
BENCHMARK(BM_AutoencoderFilter)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
