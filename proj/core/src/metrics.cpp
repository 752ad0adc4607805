#include "sentlab/metrics.hpp"

#include "sentlab/error.hpp"
#include "sentlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sentlab {

MetricsRecord compute_metrics(std::span<const double> truth, std::span<const double> pred) {
    if (truth.size() != pred.size()) throw ShapeError("compute_metrics: length mismatch");
    if (truth.size() < 2) throw ParameterError("compute_metrics: need at least two points");
    const double n = double(truth.size());
    double ape = 0, sape = 0, ae = 0, se = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double t = truth[i], p = pred[i], e = std::abs(t - p);
        if (t == 0) throw DomainError("MAPE undefined: zero truth value at position " + std::to_string(i));
        const double denom = (std::abs(t) + std::abs(p)) / 2.0;
        if (denom == 0) throw DomainError("SMAPE undefined at position " + std::to_string(i));
        ape += e / std::abs(t);
        sape += e / denom;
        ae += e;
        se += e * e;
    }
    const double mean_t = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
    double ss_tot = 0;
    for (const double t : truth) ss_tot += (t - mean_t) * (t - mean_t);
    if (ss_tot == 0) throw DomainError("R2 undefined: constant truth");

    MetricsRecord r;
    r.mape = 100.0 * ape / n;
    r.smape = 100.0 * sape / n;
    r.mae = ae / n;
    r.mse = se / n;
    r.rmse = std::sqrt(r.mse);
    r.r2 = 1.0 - se / ss_tot;
    return r;
}

std::array<double, 6> metric_values(const MetricsRecord& r) {
    return {r.mape, r.mae, r.r2, r.rmse, r.mse, r.smape};
}

std::vector<RankedModel> composite_rank(const std::vector<MetricsRecord>& group) {
    if (group.size() < 2) throw ValidationError("composite rank needs at least two records");
    const std::size_t n = group.size();
    std::vector<RankedModel> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i].record = i;

    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = metric_values(group[i])[m];
            if (!std::isfinite(v))
                throw ValidationError(std::string("missing ") + kMetricNames[m] + " for " + group[i].model);
            // R^2 ranks descending: negate so that ascending rank 1 is best everywhere.
            column[i] = m == 2 ? -v : v;
        }
        const auto ranks = average_ranks(column);
        for (std::size_t i = 0; i < n; ++i) out[i].ranks[m] = ranks[i];
    }
    for (auto& r : out) r.composite = std::accumulate(r.ranks.begin(), r.ranks.end(), 0.0) / 6.0;

    std::stable_sort(out.begin(), out.end(), [](const RankedModel& a, const RankedModel& b) {
        if (a.composite != b.composite) return a.composite < b.composite;
        return a.ranks[0] < b.ranks[0];
    });
    return out;
}

} // namespace sentlab
