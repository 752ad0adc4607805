#pragma once

#include "sentlab/nn/graph.hpp"

#include <functional>
#include <span>
#include <string>

namespace sentlab::nn {

enum class OptimizerKind { adam, adamw, adagrad };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-2; // AdamW only
};

/// Bias-corrected Adam update over populated gradients. Throws TrainingError
/// naming the first parameter whose gradient is not finite; in that case no
/// parameter is modified.
void adam_step(std::span<Parameter> params, double lr, double beta1, double beta2, double eps);

void optimizer_step(ParameterSet& params, const OptimizerConfig& config);

struct GradcheckReport {
    double max_rel_error = 0;
    std::string worst_parameter;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
    std::size_t failures = 0;
    bool passed = true;
};

/// Scalar function of the parameters, re-evaluated on a fresh graph per call.
using ScalarFn = std::function<Var(Graph&, ParameterSet&)>;

/// Central differences against the reverse-mode gradient, coordinate by
/// coordinate; rel = |a-n| / max(|a|, |n|, 1e-8).
GradcheckReport gradcheck(const ScalarFn& f, ParameterSet& params, double delta = 1e-5, double tol = 1e-4);

} // namespace sentlab::nn
