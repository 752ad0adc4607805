#pragma once

#include "sentlab/nn/graph.hpp"

#include <optional>
#include <random>
#include <vector>

namespace sentlab::nn {

// All ops treat their operands as row-major matrices; batched code keeps one
// sample per row. Shape violations raise ShapeError.

Var matmul(Var a, Var b);
/// x [m,k] * w [k,n] (+ bias [n] broadcast over rows).
Var linear(Var x, Var w, std::optional<Var> bias = std::nullopt);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
/// Adds a [1,n] row to every row of a [m,n].
Var add_row(Var a, Var row);

Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var silu(Var a);
Var elu(Var a);

Var softmax_rows(Var a);

constexpr double kNormEpsilon = 1e-8;
/// y = gain * x / sqrt(mean(x^2) + eps), per row.
Var rmsnorm_rows(Var x, Var gain, double eps = kNormEpsilon);
/// y = gain * (x - mean) / sqrt(var + eps) + bias, per row.
Var layernorm_rows(Var x, Var gain, Var bias, double eps = kNormEpsilon);

Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(Var a, std::size_t start, std::size_t count);

/// Multiplies row r of a [m,n] by s(r,0), s [m,1].
Var scale_rows(Var a, Var s);

/// [B,n] -> [B*times,n], row b*times+t = a[b].
Var repeat_rows(Var a, std::size_t times);
/// [B*steps,n] -> [B,n], rows b*steps+step.
Var take_step(Var a, std::size_t steps, std::size_t step);
/// Inverse layout of take_step: steps[t] [B,n] -> [B*T,n].
Var stack_steps(const std::vector<Var>& steps);

/// Rows of table [V,n] selected by index.
Var gather_rows(Var table, const std::vector<std::size_t>& indices);

/// Inverted dropout with a mask drawn from rng. Identity when rate == 0.
Var dropout(Var a, double rate, std::mt19937_64& rng);

Var sum(Var a);
Var mean(Var a);

/// Scaled dot-product attention for `batch` independent sequences stacked by
/// rows (q [batch*Lq,H], k and v [batch*Lk,H]), split into n_heads slices of
/// width H/n_heads. With `causal`, query i only sees keys j <= i (Lq == Lk).
/// If `weights` is given it receives the attention matrix
/// [batch*n_heads*Lq, Lk] (row order: batch, head, query).
Var scaled_dot_attention(Var q, Var k, Var v, std::size_t batch, std::size_t n_heads, bool causal,
                         Tensor* weights = nullptr);

} // namespace sentlab::nn
