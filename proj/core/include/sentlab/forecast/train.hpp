#pragma once

#include "sentlab/forecast/models.hpp"
#include "sentlab/metrics.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sentlab::forecast {

struct TrainResult {
    std::vector<double> loss_curve; // mean training loss per epoch
};

/// Called after each epoch with (epoch, mean loss).
using EpochCallback = std::function<void(std::size_t, double)>;

/// Minibatch training with the model's own config: per-epoch shuffle and
/// dropout masks both derive from config.seed. A non-finite batch loss
/// throws TrainingError naming the epoch and batch.
TrainResult train_model(Forecaster& model, const std::vector<WindowSample>& train, const EpochCallback& on_epoch = {});

/// Loss of `model` on `samples` in eval mode, using the configured loss.
double evaluate_loss(Forecaster& model, const std::vector<WindowSample>& samples);

/// One forecast step in price units.
struct PredictionRow {
    Date date;
    std::string ticker;
    std::size_t step = 0; // 1-based
    double truth = 0;
    double pred = 0;
};

/// Denormalized forecasts for every test sample, ordered by sample then step.
/// `tickers[company]` names each company.
std::vector<PredictionRow> predict_rows(Forecaster& model, const std::vector<WindowSample>& samples,
                                        const Normalizer& normalizer, const std::vector<std::string>& tickers);

/// Persistence baseline rows: the last observed close repeated.
std::vector<PredictionRow> naive_rows(const std::vector<WindowSample>& samples,
                                      const std::vector<std::string>& tickers);

/// Metrics of the rows belonging to `ticker`, or of all rows when empty.
MetricsRecord metrics_for(const std::vector<PredictionRow>& rows, const std::string& ticker);

} // namespace sentlab::forecast
