#pragma once

#include "sentlab/nn/tensor.hpp"
#include "sentlab/text_features.hpp"

#include <string>
#include <vector>

namespace sentlab::forecast {

enum class FeatureSetKind { hlov, hlovs, hlove };

std::string to_string(FeatureSetKind kind);
FeatureSetKind parse_feature_set(const std::string& name);

struct FeatureSetSpec {
    FeatureSetKind kind = FeatureSetKind::hlovs;
    std::size_t embedding_dim = 0; // HLOVE only

    std::size_t feature_count() const;
    /// high, low, open, volume, close, then score or e0..e{d-1}.
    std::vector<std::string> columns() const;
};

/// Column index of the past close within every feature set.
inline constexpr std::size_t kCloseColumn = 4;
/// Known-future covariates per step: holiday flag + Monday..Friday one-hot.
inline constexpr std::size_t kKnownFutureWidth = 6;

double panel_value(const PanelRow& row, const FeatureSetSpec& spec, std::size_t column);

/// z-score statistics of one company, fitted on its training rows.
struct CompanyScaler {
    std::string ticker;
    std::size_t fit_rows = 0;
    std::vector<double> mean;
    std::vector<double> stdev; // 1.0 substituted for zero spread

    double normalize(std::size_t column, double v) const { return (v - mean[column]) / stdev[column]; }
    double denormalize(std::size_t column, double z) const { return z * stdev[column] + mean[column]; }
    double normalize_close(double v) const { return normalize(kCloseColumn, v); }
    double denormalize_close(double z) const { return denormalize(kCloseColumn, z); }
};

struct Normalizer {
    std::vector<std::string> columns;
    std::vector<CompanyScaler> companies;

    const CompanyScaler& for_ticker(const std::string& ticker) const;
};

CompanyScaler fit_scaler(const AlignedPanel& panel, const FeatureSetSpec& spec, std::size_t rows);

struct WindowSample {
    std::size_t company = 0;
    nn::Tensor past;         // [lookback, F], normalized
    nn::Tensor known_future; // [horizon, kKnownFutureWidth]
    std::vector<double> target;     // normalized close, length horizon
    std::vector<double> target_raw; // close in price units
    double anchor_close = 0;        // last observed normalized close
    double anchor_raw = 0;          // the same close in price units
    std::vector<Date> target_dates;
};

struct WindowSet {
    std::vector<WindowSample> train;
    std::vector<WindowSample> test;
    Normalizer normalizer;
};

/// T - lookback - horizon + 1 (0 when negative).
std::size_t window_count(std::size_t rows, std::size_t lookback, std::size_t horizon);

/// Stride-1 windows over rows [0, rows_end) whose targets start at or after
/// `first_target`.
std::vector<WindowSample> slide_windows(const AlignedPanel& panel, const FeatureSetSpec& spec,
                                        const CompanyScaler& scaler, std::size_t company, std::size_t lookback,
                                        std::size_t horizon, std::size_t first_target = 0,
                                        std::size_t rows_end = std::size_t(-1));

/// Per company: chronological split at floor(split*T), scaler fitted on the
/// training rows, training windows entirely inside the training rows, test
/// windows with targets inside the test rows. Windows of all companies are
/// pooled, tagged with the company's position in `panels`.
WindowSet build_windows(const std::vector<AlignedPanel>& panels, const FeatureSetSpec& spec, std::size_t lookback,
                        std::size_t horizon, double split);

/// Same split, using an existing normalizer (e.g. restored from a checkpoint).
WindowSet build_windows(const std::vector<AlignedPanel>& panels, const FeatureSetSpec& spec, std::size_t lookback,
                        std::size_t horizon, double split, const Normalizer& normalizer);

} // namespace sentlab::forecast
