#include "sentlab/forecast/models.hpp"

#include "sentlab/error.hpp"

#include <cmath>
#include <numeric>

namespace sentlab::forecast {

Batch make_batch(const std::vector<WindowSample>& samples, std::span<const std::size_t> indices) {
    if (indices.empty()) throw ShapeError("make_batch: empty batch");
    const auto& first = samples.at(indices.front());
    Batch b;
    b.size = indices.size();
    b.lookback = first.past.rows();
    b.horizon = first.target.size();
    const std::size_t F = first.past.cols(), L = b.lookback, h = b.horizon;
    b.past = nn::Tensor::matrix(b.size * L, F);
    b.past_close = nn::Tensor::matrix(b.size, L);
    b.known_future = nn::Tensor::matrix(b.size, h * kKnownFutureWidth);
    b.target = nn::Tensor::matrix(b.size, h);
    for (std::size_t r = 0; r < b.size; ++r) {
        const auto& s = samples.at(indices[r]);
        if (s.past.rows() != L || s.past.cols() != F || s.target.size() != h)
            throw ShapeError("make_batch: samples have inconsistent shapes");
        std::copy(s.past.values().begin(), s.past.values().end(), b.past.data() + r * L * F);
        for (std::size_t t = 0; t < L; ++t) b.past_close(r, t) = s.past(t, kCloseColumn);
        std::copy(s.known_future.values().begin(), s.known_future.values().end(),
                  b.known_future.data() + r * h * kKnownFutureWidth);
        for (std::size_t k = 0; k < h; ++k) b.target(r, k) = s.target[k];
        b.anchors.push_back(s.anchor_close);
        b.companies.push_back(s.company);
    }
    return b;
}

Batch make_batch(const std::vector<WindowSample>& samples) {
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    return make_batch(samples, idx);
}

std::vector<double> naive_seasonal_forecast(std::span<const double> history, std::size_t horizon) {
    if (history.empty()) throw ParameterError("naive forecast needs a non-empty history");
    return std::vector<double>(horizon, history.back());
}

std::vector<double> nlinear_forward(std::span<const double> x, const nn::Tensor& weight, const nn::Tensor& bias) {
    if (x.empty() || weight.rows() != x.size() || bias.size() != weight.cols())
        throw ShapeError("nlinear: window of " + std::to_string(x.size()) + " vs weight " + weight.shape_string() +
                         " and bias " + bias.shape_string());
    const double last = x.back();
    std::vector<double> y(weight.cols());
    for (std::size_t k = 0; k < y.size(); ++k) {
        double acc = 0;
        for (std::size_t t = 0; t < x.size(); ++t) acc += (x[t] - last) * weight(t, k);
        y[k] = acc + bias[k] + last;
    }
    return y;
}

std::vector<std::vector<double>> Forecaster::predict(const std::vector<WindowSample>& samples,
                                                     std::size_t batch_size) {
    std::vector<std::vector<double>> out;
    out.reserve(samples.size());
    for (std::size_t start = 0; start < samples.size(); start += batch_size) {
        const std::size_t end = std::min(samples.size(), start + batch_size);
        std::vector<std::size_t> idx(end - start);
        std::iota(idx.begin(), idx.end(), start);
        const Batch batch = make_batch(samples, idx);
        nn::Graph graph;
        const nn::Tensor& y = forward(graph, batch, false, nullptr).value();
        for (std::size_t r = 0; r < y.rows(); ++r)
            out.emplace_back(y.data() + r * y.cols(), y.data() + (r + 1) * y.cols());
    }
    return out;
}

NLinear::NLinear(const TrainConfig& config, const ModelShape& shape) : config_(config), shape_(shape) {
    const std::size_t L = config.lookback, h = config.horizon;
    nn::Tensor w = nn::Tensor::matrix(L, h);
    if (config.const_init) {
        w.fill(1.0 / double(L));
    } else {
        std::mt19937_64 rng(config.seed);
        const double bound = 1.0 / std::sqrt(double(L));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (auto& v : w.values()) v = u(rng);
    }
    weight_ = params_.add("nlinear.weight", std::move(w));
    bias_ = params_.add("nlinear.bias", nn::Tensor({h}, 0.0));
}

nn::Var NLinear::forward(nn::Graph& graph, const Batch& batch, bool, std::mt19937_64*) {
    if (batch.lookback != config_.lookback || batch.horizon != config_.horizon)
        throw ConfigError("NLinear built for lookback " + std::to_string(config_.lookback) + ", horizon " +
                          std::to_string(config_.horizon));
    const std::size_t B = batch.size, L = batch.lookback, h = batch.horizon;
    nn::Tensor centered = batch.past_close;
    nn::Tensor level = nn::Tensor::matrix(B, h);
    for (std::size_t r = 0; r < B; ++r) {
        const double last = batch.past_close(r, L - 1);
        for (std::size_t t = 0; t < L; ++t) centered(r, t) -= last;
        for (std::size_t k = 0; k < h; ++k) level(r, k) = last;
    }
    const nn::Var y = nn::linear(graph.constant(std::move(centered)), graph.parameter(params_[weight_]),
                                 graph.parameter(params_[bias_]));
    return nn::add(y, graph.constant(std::move(level)));
}

TftLite::GateAddNorm TftLite::make_gate(nn::ParameterSet& ps, const std::string& prefix, std::size_t hidden,
                                        nn::NormType norm, std::mt19937_64& rng) {
    GateAddNorm g;
    g.w = ps.add(prefix + ".w", nn::glorot(hidden, 2 * hidden, rng));
    g.b = ps.add(prefix + ".b", nn::Tensor({2 * hidden}, 0.0));
    g.norm = nn::Norm::create(ps, prefix + ".norm", hidden, norm);
    return g;
}

nn::Var TftLite::gate_add_norm(nn::Pass& pass, const GateAddNorm& g, nn::Var x, nn::Var residual) const {
    const std::size_t H = config_.hidden_size;
    const nn::Var z = nn::linear(x, pass.p(g.w), pass.p(g.b));
    const nn::Var gated = nn::mul(nn::slice_cols(z, 0, H), nn::sigmoid(nn::slice_cols(z, H, H)));
    return g.norm(pass, nn::add(residual, pass.drop(gated, config_.dropout)));
}

TftLite::TftLite(const TrainConfig& config, const ModelShape& shape) : config_(config), shape_(shape) {
    config.validate();
    if (shape.n_features == 0 || shape.n_companies == 0) throw ConfigError("TFT-lite needs features and companies");
    std::mt19937_64 rng(config.seed);
    const std::size_t H = config.hidden_size, Hc = config.hidden_continuous_size, F = shape.n_features;
    const std::size_t L = config.lookback, h = config.horizon;
    const auto norm = config.norm_type;
    const double p = config.dropout;
    auto& ps = params_;

    company_embedding_ = ps.add("static.company_embedding", nn::glorot(shape.n_companies, H, rng));
    const nn::GrnConfig static_cfg{H, H, H, 0, nn::Activation::elu, norm, p};
    static_selection_ = nn::Grn::create(ps, "static.selection", static_cfg, rng);
    static_enrichment_ = nn::Grn::create(ps, "static.enrichment", static_cfg, rng);
    static_h_ = nn::Grn::create(ps, "static.state_h", static_cfg, rng);
    static_c_ = nn::Grn::create(ps, "static.state_c", static_cfg, rng);

    for (std::size_t f = 0; f < F; ++f) {
        input_w_.push_back(ps.add("input" + std::to_string(f) + ".w", nn::glorot(1, Hc, rng)));
        input_b_.push_back(ps.add("input" + std::to_string(f) + ".b", nn::Tensor({Hc}, 0.0)));
    }
    selection_ = nn::VariableSelection::create(ps, "selection", F, Hc, H, H, norm, p, rng);
    for (std::size_t l = 0; l < config.lstm_layers; ++l)
        lstm_.push_back(nn::LstmCell::create(ps, "lstm" + std::to_string(l), H, H, rng));
    post_lstm_ = make_gate(ps, "post_lstm", H, norm, rng);
    enrichment_ = nn::Grn::create(ps, "enrichment", nn::GrnConfig{H, H, H, H, nn::Activation::elu, norm, p}, rng);
    attention_ = nn::MultiHeadAttention::create(ps, "attention", H, config.n_heads, rng);
    post_attention_ = make_gate(ps, "post_attention", H, norm, rng);
    const auto ff_act =
        config.feed_forward == nn::FeedForward::swiglu ? nn::Activation::swiglu : nn::Activation::relu;
    position_ff_ = nn::Grn::create(ps, "position_ff", nn::GrnConfig{H, H, H, 0, ff_act, norm, p}, rng);

    // Head rows: [final vector H | known future h*6 | past closes L].
    const std::size_t head_in = H + h * kKnownFutureWidth + L;
    nn::Tensor w = nn::glorot(head_in, h, rng);
    for (std::size_t t = 0; t < L; ++t)
        for (std::size_t k = 0; k < h; ++k) w(H + h * kKnownFutureWidth + t, k) = t + 1 == L ? 1.0 : 0.0;
    head_w_ = ps.add("head.w", std::move(w));
    head_b_ = ps.add("head.b", nn::Tensor({h}, 0.0));
}

nn::Var TftLite::forward(nn::Graph& graph, const Batch& batch, bool training, std::mt19937_64* rng) {
    const std::size_t L = config_.lookback, F = shape_.n_features, B = batch.size;
    if (batch.lookback != L || batch.horizon != config_.horizon || batch.past.cols() != F)
        throw ConfigError("TFT-lite built for lookback " + std::to_string(L) + ", horizon " +
                          std::to_string(config_.horizon) + ", " + std::to_string(F) + " features");
    for (const auto c : batch.companies)
        if (c >= shape_.n_companies) throw ConfigError("company index " + std::to_string(c) + " out of range");
    nn::Pass pass{graph, params_, training, rng};

    // 1. static context
    const nn::Var company = nn::gather_rows(pass.p(company_embedding_), batch.companies);
    const nn::Var ctx_selection = nn::repeat_rows(static_selection_(pass, company), L);
    const nn::Var ctx_enrichment = nn::repeat_rows(static_enrichment_(pass, company), L);
    nn::Var h0 = static_h_(pass, company);
    nn::Var c0 = static_c_(pass, company);

    // 2. variable selection on all B*L positions at once
    std::vector<nn::Var> embedded;
    embedded.reserve(F);
    for (std::size_t f = 0; f < F; ++f) {
        nn::Tensor column = nn::Tensor::matrix(batch.past.rows(), 1);
        for (std::size_t r = 0; r < column.rows(); ++r) column[r] = batch.past(r, f);
        embedded.push_back(nn::linear(pass.input(std::move(column)), pass.p(input_w_[f]), pass.p(input_b_[f])));
    }
    const auto selected = selection_(pass, embedded, ctx_selection);
    last_weights_ = selected.weights.value();

    // 3. LSTM encoder
    std::vector<nn::Var> hs(lstm_.size(), h0), cs(lstm_.size(), c0);
    std::vector<nn::Var> outputs;
    outputs.reserve(L);
    for (std::size_t t = 0; t < L; ++t) {
        nn::Var x = nn::take_step(selected.combined, L, t);
        for (std::size_t l = 0; l < lstm_.size(); ++l) {
            std::tie(hs[l], cs[l]) = lstm_[l](pass, x, hs[l], cs[l]);
            x = hs[l];
        }
        outputs.push_back(x);
    }
    const nn::Var temporal = gate_add_norm(pass, post_lstm_, nn::stack_steps(outputs), selected.combined);

    // 4. static enrichment
    const nn::Var enriched = enrichment_(pass, temporal, ctx_enrichment);

    // 5. causal self-attention; keep the final position
    const nn::Var attended = attention_(pass, enriched, enriched, enriched, B, true);
    const nn::Var last = gate_add_norm(pass, post_attention_, nn::take_step(attended, L, L - 1),
                                       nn::take_step(enriched, L, L - 1));

    // 6. position-wise feed-forward
    const nn::Var final_vec = position_ff_(pass, last);

    // 7. affine head
    const nn::Var head_in =
        nn::concat_cols({final_vec, pass.input(batch.known_future), pass.input(batch.past_close)});
    return nn::linear(head_in, pass.p(head_w_), pass.p(head_b_));
}

std::unique_ptr<Forecaster> make_model(const TrainConfig& config, const ModelShape& shape) {
    config.validate();
    if (config.model == ModelKind::nlinear) return std::make_unique<NLinear>(config, shape);
    return std::make_unique<TftLite>(config, shape);
}

} // namespace sentlab::forecast
