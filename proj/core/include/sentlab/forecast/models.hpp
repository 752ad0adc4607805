#pragma once

#include "sentlab/forecast/config.hpp"
#include "sentlab/forecast/windows.hpp"
#include "sentlab/nn/blocks.hpp"

#include <memory>
#include <random>
#include <span>
#include <vector>

namespace sentlab::forecast {

/// Window samples stacked for one forward pass.
struct Batch {
    std::size_t size = 0;
    std::size_t lookback = 0;
    std::size_t horizon = 0;
    nn::Tensor past;         // [B*L, F], row b*L+t
    nn::Tensor past_close;   // [B, L]
    nn::Tensor known_future; // [B, h*kKnownFutureWidth]
    nn::Tensor target;       // [B, h]
    std::vector<double> anchors;
    std::vector<std::size_t> companies;
};

Batch make_batch(const std::vector<WindowSample>& samples, std::span<const std::size_t> indices);
Batch make_batch(const std::vector<WindowSample>& samples);

/// Persistence: the last observed value repeated `horizon` times.
std::vector<double> naive_seasonal_forecast(std::span<const double> history, std::size_t horizon);

/// y = (x - x_L) W + b + x_L for one close window x (length L), W [L,h], b [h].
std::vector<double> nlinear_forward(std::span<const double> x, const nn::Tensor& weight, const nn::Tensor& bias);

/// Dimensions a model is built for.
struct ModelShape {
    std::size_t n_features = 0;
    std::size_t n_companies = 1;
};

class Forecaster {
public:
    virtual ~Forecaster() = default;

    virtual ModelKind kind() const = 0;
    virtual const TrainConfig& config() const = 0;
    virtual const ModelShape& shape() const = 0;
    virtual nn::ParameterSet& params() = 0;
    virtual const nn::ParameterSet& params() const = 0;
    virtual std::unique_ptr<Forecaster> clone() const = 0;

    /// [B, horizon] normalized close forecasts. `rng` drives dropout and is
    /// required only when training.
    virtual nn::Var forward(nn::Graph& graph, const Batch& batch, bool training, std::mt19937_64* rng) = 0;

    /// Eval-mode forecasts for every sample, in order.
    std::vector<std::vector<double>> predict(const std::vector<WindowSample>& samples, std::size_t batch_size = 256);
};

class NLinear final : public Forecaster {
public:
    NLinear(const TrainConfig& config, const ModelShape& shape);

    ModelKind kind() const override { return ModelKind::nlinear; }
    const TrainConfig& config() const override { return config_; }
    const ModelShape& shape() const override { return shape_; }
    nn::ParameterSet& params() override { return params_; }
    const nn::ParameterSet& params() const override { return params_; }
    std::unique_ptr<Forecaster> clone() const override { return std::make_unique<NLinear>(*this); }
    nn::Var forward(nn::Graph& graph, const Batch& batch, bool training, std::mt19937_64* rng) override;

private:
    TrainConfig config_;
    ModelShape shape_;
    nn::ParameterSet params_;
    std::size_t weight_ = 0, bias_ = 0;
};

/// Desk-scale Temporal Fusion Transformer:
///  1. learned company embedding -> static context GRNs
///  2. per-step variable selection over the past covariates
///  3. LSTM encoder with a gated skip back to the selected inputs
///  4. static-enrichment GRN per position
///  5. causal multi-head self-attention, final position kept, gated skip
///  6. position-wise GRN using the configured feed-forward variant
///  7. affine head over [final vector | known future | past closes]
class TftLite final : public Forecaster {
public:
    TftLite(const TrainConfig& config, const ModelShape& shape);

    ModelKind kind() const override { return ModelKind::tft_lite; }
    const TrainConfig& config() const override { return config_; }
    const ModelShape& shape() const override { return shape_; }
    nn::ParameterSet& params() override { return params_; }
    const nn::ParameterSet& params() const override { return params_; }
    std::unique_ptr<Forecaster> clone() const override { return std::make_unique<TftLite>(*this); }
    nn::Var forward(nn::Graph& graph, const Batch& batch, bool training, std::mt19937_64* rng) override;

    /// Variable-selection weights [B*L, F] of the most recent forward pass.
    const nn::Tensor& last_selection_weights() const { return last_weights_; }

private:
    struct GateAddNorm {
        std::size_t w = 0, b = 0;
        nn::Norm norm;
    };
    static GateAddNorm make_gate(nn::ParameterSet& ps, const std::string& prefix, std::size_t hidden,
                                 nn::NormType norm, std::mt19937_64& rng);
    nn::Var gate_add_norm(nn::Pass& pass, const GateAddNorm& g, nn::Var x, nn::Var residual) const;

    TrainConfig config_;
    ModelShape shape_;
    nn::ParameterSet params_;

    std::size_t company_embedding_ = 0;
    nn::Grn static_selection_, static_enrichment_, static_h_, static_c_;
    std::vector<std::size_t> input_w_, input_b_;
    nn::VariableSelection selection_;
    std::vector<nn::LstmCell> lstm_;
    GateAddNorm post_lstm_;
    nn::Grn enrichment_;
    nn::MultiHeadAttention attention_;
    GateAddNorm post_attention_;
    nn::Grn position_ff_;
    std::size_t head_w_ = 0, head_b_ = 0;
    nn::Tensor last_weights_;
};

std::unique_ptr<Forecaster> make_model(const TrainConfig& config, const ModelShape& shape);

} // namespace sentlab::forecast
