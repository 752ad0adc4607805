#pragma once

// Small differentiable fixtures shared by the unit tests and the acceptance
// runner. Every case reduces its output to a scalar through a fixed random
// projection so that no coordinate of the gradient is trivially symmetric.

#include "sentlab/forecast/loss.hpp"
#include "sentlab/forecast/models.hpp"
#include "sentlab/nn/blocks.hpp"
#include "sentlab/nn/optim.hpp"

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace cases {

using namespace sentlab;

struct GradCase {
    std::string name;
    nn::ParameterSet params;
    nn::ScalarFn fn;
    std::shared_ptr<forecast::Forecaster> model; // owns the parameters when set

    nn::ParameterSet& parameters() { return model ? model->params() : params; }
    nn::GradcheckReport check(double delta = 1e-5, double tol = 1e-4) {
        return nn::gradcheck(fn, parameters(), delta, tol);
    }
};

inline nn::Tensor randn(std::size_t r, std::size_t c, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    nn::Tensor t = nn::Tensor::matrix(r, c);
    for (auto& v : t.values()) v = normal(rng);
    return t;
}

inline nn::Var project(nn::Pass& pass, nn::Var y, const nn::Tensor& w) {
    return nn::sum(nn::mul(y, pass.input(w)));
}

inline GradCase rmsnorm_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GradCase c{"rmsnorm", {}, {}};
    const auto x = c.params.add("x", randn(3, 4, rng));
    const auto g = c.params.add("gain", randn(1, 4, rng));
    const auto w = randn(3, 4, rng);
    c.fn = [=](nn::Graph& graph, nn::ParameterSet& ps) {
        nn::Pass pass{graph, ps};
        return project(pass, nn::rmsnorm_rows(pass.p(x), pass.p(g)), w);
    };
    return c;
}

inline GradCase swiglu_case(std::uint64_t seed, nn::FeedForward variant) {
    std::mt19937_64 rng(seed);
    GradCase c{variant == nn::FeedForward::swiglu ? "swiglu_ff/swiglu" : "swiglu_ff/relu", {}, {}};
    const auto x = c.params.add("x", randn(3, 4, rng));
    const auto w1 = c.params.add("w1", randn(4, 5, rng, 0.7));
    const auto w2 = c.params.add("w2", randn(4, 5, rng, 0.7));
    const auto w3 = c.params.add("w3", randn(5, 4, rng, 0.7));
    const auto w = randn(3, 4, rng);
    c.fn = [=](nn::Graph& graph, nn::ParameterSet& ps) {
        nn::Pass pass{graph, ps};
        return project(pass, nn::swiglu_ff(pass.p(x), pass.p(w1), pass.p(w2), pass.p(w3), variant), w);
    };
    return c;
}

inline GradCase grn_case(std::uint64_t seed, nn::NormType norm) {
    std::mt19937_64 rng(seed);
    GradCase c{norm == nn::NormType::rmsnorm ? "grn/rmsnorm" : "grn/layernorm", {}, {}};
    const auto x = c.params.add("x", randn(3, 4, rng));
    const auto ctx = c.params.add("context", randn(3, 2, rng));
    nn::GrnConfig cfg;
    cfg.input = 4;
    cfg.hidden = 4;
    cfg.output = 4;
    cfg.context = 2;
    cfg.norm = norm;
    const auto grn = nn::Grn::create(c.params, "grn", cfg, rng);
    std::normal_distribution<double> normal(0.0, 0.3);
    for (auto& p : c.params)
        if (p.name.find(".b_") != std::string::npos || p.name.find("bias") != std::string::npos)
            for (auto& v : p.value.values()) v = normal(rng);
    const auto w = randn(3, 4, rng);
    c.fn = [=](nn::Graph& graph, nn::ParameterSet& ps) {
        nn::Pass pass{graph, ps};
        return project(pass, grn(pass, pass.p(x), pass.p(ctx)), w);
    };
    return c;
}

inline GradCase lstm_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GradCase c{"lstm_step", {}, {}};
    const auto x = c.params.add("x", randn(2, 3, rng));
    const auto h = c.params.add("h_prev", randn(2, 4, rng, 0.5));
    const auto cs = c.params.add("c_prev", randn(2, 4, rng, 0.5));
    const auto cell = nn::LstmCell::create(c.params, "lstm", 3, 4, rng);
    const auto wh = randn(2, 4, rng), wc = randn(2, 4, rng);
    c.fn = [=](nn::Graph& graph, nn::ParameterSet& ps) {
        nn::Pass pass{graph, ps};
        const auto [hn, cn] = cell(pass, pass.p(x), pass.p(h), pass.p(cs));
        return nn::add(project(pass, hn, wh), project(pass, cn, wc));
    };
    return c;
}

inline GradCase attention_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GradCase c{"multi_head_attention", {}, {}};
    const auto x = c.params.add("x", randn(2 * 3, 4, rng));
    const auto mha = nn::MultiHeadAttention::create(c.params, "mha", 4, 2, rng);
    const auto w = randn(6, 4, rng);
    c.fn = [=](nn::Graph& graph, nn::ParameterSet& ps) {
        nn::Pass pass{graph, ps};
        const auto v = pass.p(x);
        return project(pass, mha(pass, v, v, v, 2, true), w);
    };
    return c;
}

inline GradCase selection_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GradCase c{"variable_selection", {}, {}};
    std::vector<std::size_t> vars;
    for (int f = 0; f < 3; ++f) vars.push_back(c.params.add("var" + std::to_string(f), randn(2, 2, rng)));
    const auto ctx = c.params.add("context", randn(2, 3, rng));
    const auto vs = nn::VariableSelection::create(c.params, "vs", 3, 2, 4, 3, nn::NormType::rmsnorm, 0.0, rng);
    const auto w = randn(2, 4, rng), ww = randn(2, 3, rng);
    c.fn = [=](nn::Graph& graph, nn::ParameterSet& ps) {
        nn::Pass pass{graph, ps};
        std::vector<nn::Var> in;
        for (const auto v : vars) in.push_back(pass.p(v));
        const auto out = vs(pass, in, pass.p(ctx));
        return nn::add(project(pass, out.combined, w), project(pass, out.weights, ww));
    };
    return c;
}

/// Windows with random normalized content for model-level checks.
inline std::vector<forecast::WindowSample> random_windows(std::size_t n, std::size_t lookback, std::size_t horizon,
                                                          std::size_t features, std::size_t companies,
                                                          std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::vector<forecast::WindowSample> out;
    for (std::size_t i = 0; i < n; ++i) {
        forecast::WindowSample s;
        s.company = i % companies;
        s.past = randn(lookback, features, rng);
        s.known_future = nn::Tensor::matrix(horizon, forecast::kKnownFutureWidth);
        for (std::size_t t = 0; t < horizon; ++t) s.known_future(t, 1 + (i + t) % 5) = 1.0;
        s.anchor_close = s.past(lookback - 1, forecast::kCloseColumn);
        for (std::size_t t = 0; t < horizon; ++t) s.target.push_back(s.anchor_close + normal(rng));
        out.push_back(std::move(s));
    }
    return out;
}

inline GradCase model_case(std::uint64_t seed, forecast::ModelKind kind) {
    std::mt19937_64 rng(seed);
    forecast::TrainConfig cfg;
    cfg.model = kind;
    cfg.lookback = kind == forecast::ModelKind::nlinear ? 4 : 6;
    cfg.horizon = 2;
    cfg.hidden_size = 8;
    cfg.hidden_continuous_size = 4;
    cfg.n_heads = 2;
    cfg.dropout = 0.0;
    cfg.seed = seed;
    cfg.const_init = false;
    const forecast::ModelShape shape{kind == forecast::ModelKind::nlinear ? 5u : 6u, 2};
    auto model = forecast::make_model(cfg, shape);
    // Move off the structured initialisation so no gradient is trivially zero.
    for (auto& p : model->params())
        for (auto& v : p.value.values()) v += std::normal_distribution<double>(0.0, 0.1)(rng);
    auto batch = forecast::make_batch(random_windows(3, cfg.lookback, 2, shape.n_features, 2, rng));
    // Targets sit close to the current forecast, with directions of either
    // sign. Large residuals (a loss in the thousands once the directional
    // penalty applies) would drown the central differences in rounding noise.
    {
        nn::Graph g;
        const auto pred = model->forward(g, batch, false, nullptr).value();
        std::normal_distribution<double> offset(0.0, 0.01);
        for (std::size_t i = 0; i < pred.size(); ++i) batch.target[i] = pred[i] + offset(rng);
    }

    GradCase c{kind == forecast::ModelKind::nlinear ? "nlinear_forward" : "tft_lite+dmse", {}, {}, std::move(model)};
    auto* m = c.model.get();
    c.fn = [m, batch](nn::Graph& graph, nn::ParameterSet&) {
        return forecast::dmse(m->forward(graph, batch, false, nullptr), batch.target, batch.anchors);
    };
    return c;
}

inline std::vector<GradCase> all_cases(std::uint64_t seed) {
    std::vector<GradCase> out;
    out.push_back(rmsnorm_case(seed));
    out.push_back(swiglu_case(seed, nn::FeedForward::swiglu));
    out.push_back(swiglu_case(seed, nn::FeedForward::relu));
    out.push_back(grn_case(seed, nn::NormType::rmsnorm));
    out.push_back(grn_case(seed, nn::NormType::layernorm));
    out.push_back(lstm_case(seed));
    out.push_back(attention_case(seed));
    out.push_back(selection_case(seed));
    out.push_back(model_case(seed, forecast::ModelKind::nlinear));
    out.push_back(model_case(seed, forecast::ModelKind::tft_lite));
    return out;
}

} // namespace cases
