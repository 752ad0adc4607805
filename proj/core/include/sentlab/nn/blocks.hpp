#pragma once

#include "sentlab/nn/ops.hpp"

#include <optional>
#include <random>
#include <string>

namespace sentlab::nn {

/// Everything one forward pass needs: the tape, the parameters it binds,
/// and (in training mode) the dropout generator.
struct Pass {
    Graph& graph;
    ParameterSet& params;
    bool training = false;
    std::mt19937_64* rng = nullptr;

    Var p(std::size_t index) { return graph.parameter(params[index]); }
    Var input(Tensor t) { return graph.constant(std::move(t)); }
    Var drop(Var x, double rate);
};

enum class NormType { rmsnorm, layernorm };
enum class Activation { elu, relu, swiglu };
enum class FeedForward { swiglu, relu };

/// Glorot-uniform weight matrix.
Tensor glorot(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

struct Norm {
    NormType type = NormType::rmsnorm;
    std::size_t gain = 0;
    std::size_t bias = 0; // layernorm only

    static Norm create(ParameterSet& ps, const std::string& prefix, std::size_t dim, NormType type);
    Var operator()(Pass& pass, Var x) const;
};

/// y = W3 (silu(x W1) * (x W2)) for swiglu, y = W3 relu(x W1) for relu.
/// Weights are stored input-major ([in, out]); there are no biases.
Var swiglu_ff(Var x, Var w1, Var w2, Var w3, FeedForward variant);

struct GrnConfig {
    std::size_t input = 0;
    std::size_t hidden = 0;
    std::size_t output = 0;
    std::size_t context = 0; // 0: no context input
    Activation activation = Activation::elu;
    NormType norm = NormType::rmsnorm;
    double dropout = 0.0;
};

/// Gated residual network:
///   a = act(x Wa + c Wc + ba)
///   u|v = a Wg + bg   (2*out columns, split in halves)
///   y = norm(skip(x) + dropout(u * sigmoid(v)))
/// skip is the identity when input == output, a learned projection otherwise.
struct Grn {
    GrnConfig config;
    std::size_t w_a = 0, b_a = 0;
    std::optional<std::size_t> w_a2, b_a2; // second branch for swiglu
    std::optional<std::size_t> w_c;
    std::size_t w_g = 0, b_g = 0;
    std::optional<std::size_t> w_skip, b_skip;
    Norm norm;

    static Grn create(ParameterSet& ps, const std::string& prefix, const GrnConfig& config, std::mt19937_64& rng);
    Var operator()(Pass& pass, Var x, std::optional<Var> context = std::nullopt) const;
};

struct LstmCell {
    std::size_t input = 0, hidden = 0;
    std::size_t w_x = 0, w_h = 0, b = 0; // gate column blocks ordered i, f, g, o

    static LstmCell create(ParameterSet& ps, const std::string& prefix, std::size_t input, std::size_t hidden,
                           std::mt19937_64& rng);
    /// Returns (h, c).
    std::pair<Var, Var> operator()(Pass& pass, Var x, Var h_prev, Var c_prev) const;
};

struct MultiHeadAttention {
    std::size_t hidden = 0, heads = 0;
    std::size_t w_q = 0, w_k = 0, w_v = 0, w_o = 0;

    static MultiHeadAttention create(ParameterSet& ps, const std::string& prefix, std::size_t hidden,
                                     std::size_t heads, std::mt19937_64& rng);
    /// Rows are stacked per sequence (see scaled_dot_attention).
    Var operator()(Pass& pass, Var queries, Var keys, Var values, std::size_t batch, bool causal,
                   Tensor* weights = nullptr) const;
};

/// TFT-style variable selection over F pre-embedded inputs of width E.
struct VariableSelection {
    std::size_t n_vars = 0, embed = 0, hidden = 0;
    Grn selector;                 // F*E -> F, conditioned on context
    std::vector<Grn> per_variable; // E -> hidden

    static VariableSelection create(ParameterSet& ps, const std::string& prefix, std::size_t n_vars,
                                    std::size_t embed, std::size_t hidden, std::size_t context, NormType norm,
                                    double dropout, std::mt19937_64& rng);

    struct Output {
        Var combined; // [m, hidden]
        Var weights;  // [m, F], rows on the simplex
    };
    Output operator()(Pass& pass, const std::vector<Var>& vars, std::optional<Var> context) const;
};

} // namespace sentlab::nn
