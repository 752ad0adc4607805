#include "sentlab/nn/blocks.hpp"

#include "sentlab/error.hpp"

#include <cmath>

namespace sentlab::nn {

Var Pass::drop(Var x, double rate) {
    if (!training || rate == 0.0) return x;
    if (!rng) throw ConfigError("training pass with dropout needs a random generator");
    return dropout(x, rate, *rng);
}

Tensor glorot(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / double(rows + cols));
    std::uniform_real_distribution<double> u(-limit, limit);
    Tensor t = Tensor::matrix(rows, cols);
    for (auto& v : t.values()) v = u(rng);
    return t;
}

Norm Norm::create(ParameterSet& ps, const std::string& prefix, std::size_t dim, NormType type) {
    Norm n;
    n.type = type;
    n.gain = ps.add(prefix + ".gain", Tensor({dim}, 1.0));
    if (type == NormType::layernorm) n.bias = ps.add(prefix + ".bias", Tensor({dim}, 0.0));
    return n;
}

Var Norm::operator()(Pass& pass, Var x) const {
    if (type == NormType::rmsnorm) return rmsnorm_rows(x, pass.p(gain));
    return layernorm_rows(x, pass.p(gain), pass.p(bias));
}

Var swiglu_ff(Var x, Var w1, Var w2, Var w3, FeedForward variant) {
    if (variant == FeedForward::relu) return matmul(relu(matmul(x, w1)), w3);
    return matmul(mul(silu(matmul(x, w1)), matmul(x, w2)), w3);
}

Grn Grn::create(ParameterSet& ps, const std::string& prefix, const GrnConfig& config, std::mt19937_64& rng) {
    if (config.input == 0 || config.hidden == 0 || config.output == 0)
        throw ConfigError(prefix + ": GRN dimensions must be positive");
    Grn g;
    g.config = config;
    g.w_a = ps.add(prefix + ".w_a", glorot(config.input, config.hidden, rng));
    g.b_a = ps.add(prefix + ".b_a", Tensor({config.hidden}, 0.0));
    if (config.activation == Activation::swiglu) {
        g.w_a2 = ps.add(prefix + ".w_a2", glorot(config.input, config.hidden, rng));
        g.b_a2 = ps.add(prefix + ".b_a2", Tensor({config.hidden}, 0.0));
    }
    if (config.context > 0) g.w_c = ps.add(prefix + ".w_c", glorot(config.context, config.hidden, rng));
    g.w_g = ps.add(prefix + ".w_g", glorot(config.hidden, 2 * config.output, rng));
    g.b_g = ps.add(prefix + ".b_g", Tensor({2 * config.output}, 0.0));
    if (config.input != config.output) {
        g.w_skip = ps.add(prefix + ".w_skip", glorot(config.input, config.output, rng));
        g.b_skip = ps.add(prefix + ".b_skip", Tensor({config.output}, 0.0));
    }
    g.norm = Norm::create(ps, prefix + ".norm", config.output, config.norm);
    return g;
}

Var Grn::operator()(Pass& pass, Var x, std::optional<Var> context) const {
    if (x.cols() != config.input)
        throw ShapeError("GRN expects input width " + std::to_string(config.input) + ", got " +
                         std::to_string(x.cols()));
    Var pre = linear(x, pass.p(w_a), pass.p(b_a));
    if (w_c) {
        if (!context) throw ShapeError("GRN configured with context but none given");
        if (context->cols() != config.context || context->rows() != x.rows())
            throw ShapeError("GRN context shape mismatch");
        pre = add(pre, matmul(*context, pass.p(*w_c)));
    }
    Var a = [&] {
        switch (config.activation) {
        case Activation::relu: return relu(pre);
        case Activation::swiglu: return mul(silu(pre), linear(x, pass.p(*w_a2), pass.p(*b_a2)));
        case Activation::elu: break;
        }
        return elu(pre);
    }();
    const Var gate_in = linear(a, pass.p(w_g), pass.p(b_g));
    const Var gated = mul(slice_cols(gate_in, 0, config.output), sigmoid(slice_cols(gate_in, config.output, config.output)));
    const Var skip = w_skip ? linear(x, pass.p(*w_skip), pass.p(*b_skip)) : x;
    return norm(pass, add(skip, pass.drop(gated, config.dropout)));
}

LstmCell LstmCell::create(ParameterSet& ps, const std::string& prefix, std::size_t input, std::size_t hidden,
                          std::mt19937_64& rng) {
    LstmCell cell;
    cell.input = input;
    cell.hidden = hidden;
    cell.w_x = ps.add(prefix + ".w_x", glorot(input, 4 * hidden, rng));
    cell.w_h = ps.add(prefix + ".w_h", glorot(hidden, 4 * hidden, rng));
    Tensor bias({4 * hidden}, 0.0);
    for (std::size_t j = hidden; j < 2 * hidden; ++j) bias[j] = 1.0; // forget-gate bias
    cell.b = ps.add(prefix + ".b", std::move(bias));
    return cell;
}

std::pair<Var, Var> LstmCell::operator()(Pass& pass, Var x, Var h_prev, Var c_prev) const {
    if (x.cols() != input || h_prev.cols() != hidden || c_prev.cols() != hidden || h_prev.rows() != x.rows() ||
        c_prev.rows() != x.rows())
        throw ShapeError("LSTM step shape mismatch");
    const Var z = add(linear(x, pass.p(w_x), pass.p(b)), matmul(h_prev, pass.p(w_h)));
    const Var i = sigmoid(slice_cols(z, 0, hidden));
    const Var f = sigmoid(slice_cols(z, hidden, hidden));
    const Var g = tanh(slice_cols(z, 2 * hidden, hidden));
    const Var o = sigmoid(slice_cols(z, 3 * hidden, hidden));
    const Var c = add(mul(f, c_prev), mul(i, g));
    const Var h = mul(o, tanh(c));
    return {h, c};
}

MultiHeadAttention MultiHeadAttention::create(ParameterSet& ps, const std::string& prefix, std::size_t hidden,
                                              std::size_t heads, std::mt19937_64& rng) {
    if (heads == 0 || hidden % heads != 0)
        throw ConfigError("hidden size " + std::to_string(hidden) + " not divisible by " + std::to_string(heads) +
                          " attention heads");
    MultiHeadAttention m;
    m.hidden = hidden;
    m.heads = heads;
    m.w_q = ps.add(prefix + ".w_q", glorot(hidden, hidden, rng));
    m.w_k = ps.add(prefix + ".w_k", glorot(hidden, hidden, rng));
    m.w_v = ps.add(prefix + ".w_v", glorot(hidden, hidden, rng));
    m.w_o = ps.add(prefix + ".w_o", glorot(hidden, hidden, rng));
    return m;
}

Var MultiHeadAttention::operator()(Pass& pass, Var queries, Var keys, Var values, std::size_t batch, bool causal,
                                   Tensor* weights) const {
    const Var q = matmul(queries, pass.p(w_q));
    const Var k = matmul(keys, pass.p(w_k));
    const Var v = matmul(values, pass.p(w_v));
    return matmul(scaled_dot_attention(q, k, v, batch, heads, causal, weights), pass.p(w_o));
}

VariableSelection VariableSelection::create(ParameterSet& ps, const std::string& prefix, std::size_t n_vars,
                                            std::size_t embed, std::size_t hidden, std::size_t context,
                                            NormType norm, double dropout, std::mt19937_64& rng) {
    if (n_vars == 0) throw ConfigError(prefix + ": variable selection needs at least one variable");
    VariableSelection vs;
    vs.n_vars = n_vars;
    vs.embed = embed;
    vs.hidden = hidden;
    vs.selector = Grn::create(ps, prefix + ".select",
                              GrnConfig{n_vars * embed, hidden, n_vars, context, Activation::elu, norm, dropout}, rng);
    for (std::size_t f = 0; f < n_vars; ++f)
        vs.per_variable.push_back(Grn::create(ps, prefix + ".var" + std::to_string(f),
                                              GrnConfig{embed, hidden, hidden, 0, Activation::elu, norm, dropout},
                                              rng));
    return vs;
}

VariableSelection::Output VariableSelection::operator()(Pass& pass, const std::vector<Var>& vars,
                                                        std::optional<Var> context) const {
    if (vars.size() != n_vars)
        throw ShapeError("variable selection expects " + std::to_string(n_vars) + " variables, got " +
                         std::to_string(vars.size()));
    const Var flat = n_vars == 1 ? vars.front() : concat_cols(vars);
    const Var weights = softmax_rows(selector(pass, flat, context));
    Var combined = scale_rows(per_variable[0](pass, vars[0]), slice_cols(weights, 0, 1));
    for (std::size_t f = 1; f < n_vars; ++f)
        combined = add(combined, scale_rows(per_variable[f](pass, vars[f]), slice_cols(weights, f, 1)));
    return {combined, weights};
}

} // namespace sentlab::nn
