#include "sentlab/forecast/loss.hpp"

#include "sentlab/error.hpp"

#include <memory>
#include <vector>

namespace sentlab::forecast {

std::string to_string(LossKind kind) { return kind == LossKind::dmse ? "dmse" : "mse"; }

LossKind parse_loss(const std::string& name) {
    if (name == "dmse") return LossKind::dmse;
    if (name == "mse") return LossKind::mse;
    throw ConfigError("unknown loss '" + name + "' (expected dmse or mse)");
}

double dmse_loss(std::span<const double> pred, std::span<const double> truth, double anchor, double alpha) {
    if (pred.size() != truth.size()) throw ShapeError("dmse: prediction and truth lengths differ");
    if (pred.empty()) throw ShapeError("dmse: empty horizon");
    double total = 0, prev_x = anchor, prev_y = anchor;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double x = truth[i], y = pred[i];
        const double w = (x - prev_x) * (y - prev_y) >= 0 ? 1.0 : alpha;
        total += w * (x - y) * (x - y);
        prev_x = x;
        prev_y = y;
    }
    return total / double(pred.size());
}

nn::Var dmse(nn::Var pred, const nn::Tensor& truth, std::span<const double> anchors, double alpha) {
    const nn::Tensor& P = pred.value();
    if (!P.same_shape(truth)) throw ShapeError("dmse: prediction " + P.shape_string() + " vs truth " + truth.shape_string());
    if (anchors.size() != P.rows()) throw ShapeError("dmse: one anchor per row required");
    const std::size_t B = P.rows(), h = P.cols();
    auto weights = std::make_shared<std::vector<double>>(B * h);
    double total = 0;
    for (std::size_t b = 0; b < B; ++b) {
        double prev_x = anchors[b], prev_y = anchors[b], row = 0;
        for (std::size_t i = 0; i < h; ++i) {
            const double x = truth(b, i), y = P(b, i);
            const double w = (x - prev_x) * (y - prev_y) >= 0 ? 1.0 : alpha;
            (*weights)[b * h + i] = w;
            row += w * (x - y) * (x - y);
            prev_x = x;
            prev_y = y;
        }
        total += row / double(h);
    }
    const double scale = 1.0 / (double(B) * double(h));
    const std::size_t ip = pred.id;
    auto target = std::make_shared<nn::Tensor>(truth);
    return pred.graph->record(nn::Tensor::scalar(total / double(B)), {ip},
                              [ip, weights, target, scale](nn::Graph& g, std::size_t self) {
                                  if (!g.requires_grad(ip)) return;
                                  const double d = g.grad(self)[0];
                                  const nn::Tensor& P = g.value(ip);
                                  nn::Tensor& dp = g.grad(ip);
                                  for (std::size_t k = 0; k < P.size(); ++k)
                                      dp[k] += d * scale * (*weights)[k] * 2.0 * (P[k] - (*target)[k]);
                              });
}

nn::Var mse(nn::Var pred, const nn::Tensor& truth) {
    const nn::Tensor& P = pred.value();
    if (!P.same_shape(truth)) throw ShapeError("mse: prediction " + P.shape_string() + " vs truth " + truth.shape_string());
    double total = 0;
    for (std::size_t k = 0; k < P.size(); ++k) total += (P[k] - truth[k]) * (P[k] - truth[k]);
    const double scale = 1.0 / double(P.size());
    const std::size_t ip = pred.id;
    auto target = std::make_shared<nn::Tensor>(truth);
    return pred.graph->record(nn::Tensor::scalar(total * scale), {ip},
                              [ip, target, scale](nn::Graph& g, std::size_t self) {
                                  if (!g.requires_grad(ip)) return;
                                  const double d = g.grad(self)[0];
                                  const nn::Tensor& P = g.value(ip);
                                  nn::Tensor& dp = g.grad(ip);
                                  for (std::size_t k = 0; k < P.size(); ++k)
                                      dp[k] += d * scale * 2.0 * (P[k] - (*target)[k]);
                              });
}

} // namespace sentlab::forecast
