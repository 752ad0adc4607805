#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sentlab {

struct MetricsRecord {
    std::string ticker;
    std::string model;
    std::string feature_set;
    double mape = 0;  // percent
    double mae = 0;
    double r2 = 0;
    double rmse = 0;
    double mse = 0;
    double smape = 0; // percent, half-sum denominator
};

/// Error metrics over pooled predictions in price units. Throws DomainError
/// for a zero truth value (MAPE), a zero |t|+|p| pair (SMAPE) or a constant
/// truth (R^2).
MetricsRecord compute_metrics(std::span<const double> truth, std::span<const double> pred);

/// The six metric columns in table order: MAPE, MAE, R2, RMSE, MSE, SMAPE.
inline constexpr std::array<const char*, 6> kMetricNames = {"MAPE", "MAE", "R2", "RMSE", "MSE", "SMAPE"};
std::array<double, 6> metric_values(const MetricsRecord& r);

struct RankedModel {
    std::size_t record = 0;          // index into the input group
    std::array<double, 6> ranks{};   // per metric, 1 = best, ties share the average rank
    double composite = 0;            // mean of the six ranks
};

/// Orders one ticker's records by composite rank (ascending), breaking ties
/// by MAPE rank and then by input order. Needs at least two records with all
/// metrics finite, else ValidationError.
std::vector<RankedModel> composite_rank(const std::vector<MetricsRecord>& group);

} // namespace sentlab
