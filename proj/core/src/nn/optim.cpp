#include "sentlab/nn/optim.hpp"

#include "sentlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace sentlab::nn {

namespace {

void check_gradients(std::span<Parameter> params) {
    for (const auto& p : params)
        if (!p.grad.all_finite()) throw TrainingError("non-finite gradient in parameter '" + p.name + "'");
}

void adam_like(std::span<Parameter> params, const OptimizerConfig& c, bool decoupled_decay) {
    check_gradients(params);
    for (auto& p : params) {
        ++p.step;
        const double bc1 = 1.0 - std::pow(c.beta1, double(p.step));
        const double bc2 = 1.0 - std::pow(c.beta2, double(p.step));
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.grad[i];
            p.m[i] = c.beta1 * p.m[i] + (1.0 - c.beta1) * g;
            p.v[i] = c.beta2 * p.v[i] + (1.0 - c.beta2) * g * g;
            const double m_hat = p.m[i] / bc1;
            const double v_hat = p.v[i] / bc2;
            if (decoupled_decay) p.value[i] -= c.lr * c.weight_decay * p.value[i];
            p.value[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
        }
    }
}

} // namespace

void adam_step(std::span<Parameter> params, double lr, double beta1, double beta2, double eps) {
    if (!(lr > 0)) throw ConfigError("learning rate must be positive");
    OptimizerConfig c;
    c.lr = lr;
    c.beta1 = beta1;
    c.beta2 = beta2;
    c.eps = eps;
    adam_like(params, c, false);
}

void optimizer_step(ParameterSet& params, const OptimizerConfig& config) {
    if (!(config.lr > 0)) throw ConfigError("learning rate must be positive");
    std::span<Parameter> all(&*params.begin(), params.size());
    switch (config.kind) {
    case OptimizerKind::adam: adam_like(all, config, false); return;
    case OptimizerKind::adamw: adam_like(all, config, true); return;
    case OptimizerKind::adagrad:
        check_gradients(all);
        for (auto& p : all) {
            ++p.step;
            for (std::size_t i = 0; i < p.value.size(); ++i) {
                p.m[i] += p.grad[i] * p.grad[i];
                p.value[i] -= config.lr * p.grad[i] / (std::sqrt(p.m[i]) + config.eps);
            }
        }
        return;
    }
}

GradcheckReport gradcheck(const ScalarFn& f, ParameterSet& params, double delta, double tol) {
    if (!(delta > 0)) throw ParameterError("gradcheck: delta must be positive");
    params.zero_grad();
    {
        Graph g;
        const Var out = f(g, params);
        g.backward(out);
    }
    const auto eval = [&] {
        Graph g;
        return f(g, params).value()[0];
    };

    GradcheckReport report;
    for (auto& p : params) {
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double saved = p.value[i];
            p.value[i] = saved + delta;
            const double up = eval();
            p.value[i] = saved - delta;
            const double down = eval();
            p.value[i] = saved;
            const double numeric = (up - down) / (2.0 * delta);
            const double analytic = p.grad[i];
            const double rel =
                std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            ++report.checked;
            if (rel > tol) ++report.failures;
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_parameter = p.name;
                report.worst_index = i;
            }
        }
    }
    report.passed = report.failures == 0;
    return report;
}

} // namespace sentlab::nn
