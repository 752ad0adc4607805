#include "sentlab/forecast/loss.hpp"
#include "sentlab/forecast/models.hpp"
#include "sentlab/forecast/train.hpp"
#include "sentlab/market_data.hpp"
#include "sentlab/stats.hpp"
#include "sentlab/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <random>

using namespace sentlab;
using namespace sentlab::forecast;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> v(n);
    for (auto& x : v) x = normal(rng);
    return v;
}

const WindowSet& synthetic_windows(FeatureSetKind kind) {
    static const auto market = make_synthetic_market(SyntheticConfig{});
    static std::map<FeatureSetKind, WindowSet> cache;
    auto it = cache.find(kind);
    if (it == cache.end())
        it = cache.emplace(kind, build_windows(market.panels, {kind, 16}, 15, 3, 0.8)).first;
    return it->second;
}

TrainConfig tft_config(std::size_t hidden) {
    TrainConfig c;
    c.hidden_size = hidden;
    c.hidden_continuous_size = hidden / 2;
    c.dropout = 0.1;
    return c;
}

} // namespace

static void BM_Spearman(benchmark::State& state) {
    const auto x = normals(std::size_t(state.range(0)), 1), y = normals(std::size_t(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(spearman(x, y));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Spearman)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_OlsProbe(benchmark::State& state) {
    const auto d = std::size_t(state.range(0));
    const Matrix x = random_vector_baseline(500, d, 3);
    const auto y = normals(500, 4);
    for (auto _ : state) benchmark::DoNotOptimize(ols_r2_probe(x, y));
}
BENCHMARK(BM_OlsProbe)->Arg(32)->Arg(128)->Arg(384)->Unit(benchmark::kMillisecond);

static void BM_Atr(benchmark::State& state) {
    const auto market = make_synthetic_corpus(SyntheticConfig{});
    const auto& bars = market.prices.front().bars;
    for (auto _ : state) benchmark::DoNotOptimize(atr(bars, 14));
}
BENCHMARK(BM_Atr);

static void BM_DmseLoss(benchmark::State& state) {
    const auto p = normals(5, 5), t = normals(5, 6);
    for (auto _ : state) benchmark::DoNotOptimize(dmse_loss(p, t, 0.1));
}
BENCHMARK(BM_DmseLoss);

static void BM_TftForward(benchmark::State& state) {
    const auto& w = synthetic_windows(FeatureSetKind::hlovs);
    auto model = make_model(tft_config(std::size_t(state.range(0))), {6, 2});
    std::vector<std::size_t> idx(32);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const auto batch = make_batch(w.train, idx);
    for (auto _ : state) {
        nn::Graph g;
        benchmark::DoNotOptimize(model->forward(g, batch, false, nullptr).value()[0]);
    }
}
BENCHMARK(BM_TftForward)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_TftForwardBackward(benchmark::State& state) {
    const auto& w = synthetic_windows(FeatureSetKind::hlovs);
    auto model = make_model(tft_config(std::size_t(state.range(0))), {6, 2});
    std::vector<std::size_t> idx(32);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const auto batch = make_batch(w.train, idx);
    std::mt19937_64 rng(1);
    for (auto _ : state) {
        nn::Graph g;
        model->params().zero_grad();
        const auto loss = dmse(model->forward(g, batch, true, &rng), batch.target, batch.anchors);
        g.backward(loss);
    }
}
BENCHMARK(BM_TftForwardBackward)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_TrainEpoch(benchmark::State& state) {
    const auto kind = FeatureSetKind(state.range(0));
    const auto& w = synthetic_windows(kind);
    auto cfg = tft_config(16);
    cfg.epochs = 1;
    for (auto _ : state) {
        auto model = make_model(cfg, {FeatureSetSpec{kind, 16}.feature_count(), 2});
        benchmark::DoNotOptimize(train_model(*model, w.train).loss_curve);
    }
    state.SetLabel(to_string(kind));
}
BENCHMARK(BM_TrainEpoch)
    ->Arg(int(FeatureSetKind::hlov))
    ->Arg(int(FeatureSetKind::hlovs))
    ->Arg(int(FeatureSetKind::hlove))
    ->Unit(benchmark::kMillisecond)
    ->Iterations(2);

BENCHMARK_MAIN();
