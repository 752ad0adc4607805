#include "sentlab/forecast/train.hpp"

#include "sentlab/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

namespace sentlab::forecast {

namespace {

nn::Var loss_of(Forecaster& model, nn::Graph& graph, const Batch& batch, bool training, std::mt19937_64* rng) {
    const nn::Var pred = model.forward(graph, batch, training, rng);
    if (model.config().loss == LossKind::dmse) return dmse(pred, batch.target, batch.anchors, model.config().alpha);
    return mse(pred, batch.target);
}

} // namespace

TrainResult train_model(Forecaster& model, const std::vector<WindowSample>& train, const EpochCallback& on_epoch) {
    if (train.empty()) throw TrainingError("training set is empty");
    const TrainConfig& config = model.config();
    config.validate();
    const auto optim = config.optimizer_config();

    std::seed_seq seeds{config.seed, std::uint64_t(0x5eed)};
    std::array<std::uint64_t, 2> streams{};
    seeds.generate(streams.begin(), streams.end());
    std::mt19937_64 shuffle_rng(streams[0]);
    std::mt19937_64 dropout_rng(streams[1]);

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    result.loss_curve.reserve(config.epochs);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double total = 0;
        std::size_t batch_no = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_no) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const Batch batch = make_batch(train, std::span(order).subspan(start, end - start));
            nn::Graph graph;
            const nn::Var loss = loss_of(model, graph, batch, true, &dropout_rng);
            const double value = loss.value()[0];
            if (!std::isfinite(value))
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                                    std::to_string(batch_no + 1));
            model.params().zero_grad();
            graph.backward(loss);
            try {
                nn::optimizer_step(model.params(), optim);
            } catch (const TrainingError& e) {
                throw TrainingError(std::string(e.what()) + " at epoch " + std::to_string(epoch + 1) + ", batch " +
                                    std::to_string(batch_no + 1));
            }
            total += value * double(end - start);
        }
        const double mean = total / double(train.size());
        result.loss_curve.push_back(mean);
        if (on_epoch) on_epoch(epoch + 1, mean);
    }
    return result;
}

double evaluate_loss(Forecaster& model, const std::vector<WindowSample>& samples) {
    if (samples.empty()) throw ValidationError("no samples to evaluate");
    double total = 0;
    for (std::size_t start = 0; start < samples.size(); start += 256) {
        const std::size_t end = std::min(samples.size(), start + 256);
        std::vector<std::size_t> idx(end - start);
        std::iota(idx.begin(), idx.end(), start);
        const Batch batch = make_batch(samples, idx);
        nn::Graph graph;
        total += loss_of(model, graph, batch, false, nullptr).value()[0] * double(idx.size());
    }
    return total / double(samples.size());
}

namespace {

const std::string& ticker_of(const std::vector<std::string>& tickers, std::size_t company) {
    if (company >= tickers.size()) throw ValidationError("company index " + std::to_string(company) + " has no ticker");
    return tickers[company];
}

} // namespace

std::vector<PredictionRow> predict_rows(Forecaster& model, const std::vector<WindowSample>& samples,
                                        const Normalizer& normalizer, const std::vector<std::string>& tickers) {
    const auto preds = model.predict(samples);
    std::vector<PredictionRow> rows;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        const auto& ticker = ticker_of(tickers, s.company);
        const auto& scaler = normalizer.for_ticker(ticker);
        for (std::size_t k = 0; k < s.target.size(); ++k)
            rows.push_back({s.target_dates[k], ticker, k + 1, s.target_raw[k], scaler.denormalize_close(preds[i][k])});
    }
    return rows;
}

std::vector<PredictionRow> naive_rows(const std::vector<WindowSample>& samples,
                                      const std::vector<std::string>& tickers) {
    std::vector<PredictionRow> rows;
    for (const auto& s : samples) {
        const auto& ticker = ticker_of(tickers, s.company);
        const auto forecast = naive_seasonal_forecast(std::span(&s.anchor_raw, 1), s.target.size());
        for (std::size_t k = 0; k < forecast.size(); ++k)
            rows.push_back({s.target_dates[k], ticker, k + 1, s.target_raw[k], forecast[k]});
    }
    return rows;
}

MetricsRecord metrics_for(const std::vector<PredictionRow>& rows, const std::string& ticker) {
    std::vector<double> truth, pred;
    for (const auto& r : rows)
        if (ticker.empty() || r.ticker == ticker) {
            truth.push_back(r.truth);
            pred.push_back(r.pred);
        }
    auto m = compute_metrics(truth, pred);
    m.ticker = ticker;
    return m;
}

} // namespace sentlab::forecast
