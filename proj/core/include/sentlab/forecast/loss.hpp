#pragma once

#include "sentlab/nn/graph.hpp"

#include <span>
#include <string>

namespace sentlab::forecast {

inline constexpr double kDirectionalPenalty = 1e3;

enum class LossKind { dmse, mse };
std::string to_string(LossKind kind);
LossKind parse_loss(const std::string& name);

/// Directional MSE of one forecast. With x = truth, y = pred and
/// x_0 = y_0 = anchor, step i is weighted 1 when (x_i - x_{i-1})(y_i - y_{i-1})
/// >= 0 and `alpha` otherwise; the result is the weighted mean square error.
double dmse_loss(std::span<const double> pred, std::span<const double> truth, double anchor,
                 double alpha = kDirectionalPenalty);

/// Batched DMSE on the tape: pred [B,h] against constant truth [B,h] with one
/// anchor per row; returns the mean over rows. Weights are piecewise constant
/// in pred and carry no gradient.
nn::Var dmse(nn::Var pred, const nn::Tensor& truth, std::span<const double> anchors,
             double alpha = kDirectionalPenalty);

/// Mean of squared errors over all entries.
nn::Var mse(nn::Var pred, const nn::Tensor& truth);

} // namespace sentlab::forecast
