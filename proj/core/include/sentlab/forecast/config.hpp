#pragma once

#include "sentlab/forecast/loss.hpp"
#include "sentlab/nn/blocks.hpp"
#include "sentlab/nn/optim.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sentlab::forecast {

enum class ModelKind { nlinear, tft_lite };
std::string to_string(ModelKind kind);
ModelKind parse_model(const std::string& name);

/// Training hyperparameters. Defaults are the selected values of the
/// original grid search (lookback 15, hidden 64, one LSTM layer, 4 heads,
/// SwiGLU, dropout 0.25, continuous hidden 32, RMSNorm, Adam, batch 32).
struct TrainConfig {
    ModelKind model = ModelKind::tft_lite;
    std::size_t lookback = 15;
    std::size_t horizon = 3;
    std::size_t hidden_size = 64;
    std::size_t lstm_layers = 1;
    std::size_t n_heads = 4;
    nn::FeedForward feed_forward = nn::FeedForward::swiglu;
    double dropout = 0.25;
    std::size_t hidden_continuous_size = 32;
    nn::NormType norm_type = nn::NormType::rmsnorm;
    nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t epochs = 200;
    std::uint64_t seed = 42;
    double alpha = kDirectionalPenalty;
    LossKind loss = LossKind::dmse;
    bool const_init = true; // NLinear: weights start at 1/lookback

    nn::OptimizerConfig optimizer_config() const;
    void validate() const;
};

/// Sets one field from its textual form; keys are the field names above
/// (dashes accepted in place of underscores). Throws ConfigError.
void apply_setting(TrainConfig& config, const std::string& key, const std::string& value);

/// Every field as (key, value) text, in declaration order.
std::vector<std::pair<std::string, std::string>> describe(const TrainConfig& config);

} // namespace sentlab::forecast
