#include "sentlab/forecast/windows.hpp"

#include "sentlab/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace sentlab::forecast {

std::string to_string(FeatureSetKind kind) {
    switch (kind) {
    case FeatureSetKind::hlov: return "HLOV";
    case FeatureSetKind::hlovs: return "HLOVS";
    case FeatureSetKind::hlove: return "HLOVE";
    }
    return "?";
}

FeatureSetKind parse_feature_set(const std::string& name) {
    std::string u = name;
    for (auto& c : u) c = char(std::toupper(static_cast<unsigned char>(c)));
    if (u == "HLOV") return FeatureSetKind::hlov;
    if (u == "HLOVS") return FeatureSetKind::hlovs;
    if (u == "HLOVE") return FeatureSetKind::hlove;
    throw ConfigError("unknown feature set '" + name + "' (expected HLOV, HLOVS or HLOVE)");
}

std::size_t FeatureSetSpec::feature_count() const {
    switch (kind) {
    case FeatureSetKind::hlov: return 5;
    case FeatureSetKind::hlovs: return 6;
    case FeatureSetKind::hlove: return 5 + embedding_dim;
    }
    return 5;
}

std::vector<std::string> FeatureSetSpec::columns() const {
    std::vector<std::string> cols = {"high", "low", "open", "volume", "close"};
    if (kind == FeatureSetKind::hlovs) cols.push_back("score");
    if (kind == FeatureSetKind::hlove)
        for (std::size_t k = 0; k < embedding_dim; ++k) cols.push_back("e" + std::to_string(k));
    return cols;
}

double panel_value(const PanelRow& row, const FeatureSetSpec& spec, std::size_t column) {
    switch (column) {
    case 0: return row.high;
    case 1: return row.low;
    case 2: return row.open;
    case 3: return row.volume;
    case 4: return row.close;
    default: break;
    }
    if (spec.kind == FeatureSetKind::hlovs && column == 5) return row.score;
    if (spec.kind == FeatureSetKind::hlove && column - 5 < row.embedding.size()) return row.embedding[column - 5];
    throw ShapeError("feature column " + std::to_string(column) + " not available");
}

const CompanyScaler& Normalizer::for_ticker(const std::string& ticker) const {
    for (const auto& c : companies)
        if (c.ticker == ticker) return c;
    throw ValidationError("normalizer has no statistics for ticker '" + ticker + "'");
}

CompanyScaler fit_scaler(const AlignedPanel& panel, const FeatureSetSpec& spec, std::size_t rows) {
    const std::size_t F = spec.feature_count();
    if (rows == 0 || rows > panel.rows.size()) throw SizingError(panel.ticker + ": invalid scaler fit range");
    CompanyScaler s;
    s.ticker = panel.ticker;
    s.fit_rows = rows;
    s.mean.assign(F, 0.0);
    s.stdev.assign(F, 1.0);
    for (std::size_t c = 0; c < F; ++c) {
        double m = 0;
        for (std::size_t r = 0; r < rows; ++r) m += panel_value(panel.rows[r], spec, c);
        m /= double(rows);
        double var = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            const double d = panel_value(panel.rows[r], spec, c) - m;
            var += d * d;
        }
        const double sd = std::sqrt(var / double(rows));
        s.mean[c] = m;
        s.stdev[c] = sd > 0 ? sd : 1.0;
    }
    return s;
}

std::size_t window_count(std::size_t rows, std::size_t lookback, std::size_t horizon) {
    return rows + 1 >= lookback + horizon + 1 ? rows - lookback - horizon + 1 : 0;
}

std::vector<WindowSample> slide_windows(const AlignedPanel& panel, const FeatureSetSpec& spec,
                                        const CompanyScaler& scaler, std::size_t company, std::size_t lookback,
                                        std::size_t horizon, std::size_t first_target, std::size_t rows_end) {
    if (lookback == 0 || horizon == 0) throw ConfigError("lookback and horizon must be positive");
    rows_end = std::min(rows_end, panel.rows.size());
    const std::size_t F = spec.feature_count();
    if (spec.kind == FeatureSetKind::hlove && panel.embedding_dim != spec.embedding_dim)
        throw ShapeError(panel.ticker + ": panel embedding dimension " + std::to_string(panel.embedding_dim) +
                         " differs from feature set dimension " + std::to_string(spec.embedding_dim));

    std::vector<WindowSample> out;
    const std::size_t n = window_count(rows_end, lookback, horizon);
    for (std::size_t start = 0; start < n; ++start) {
        if (start + lookback < first_target) continue;
        WindowSample w;
        w.company = company;
        w.past = nn::Tensor::matrix(lookback, F);
        for (std::size_t t = 0; t < lookback; ++t)
            for (std::size_t c = 0; c < F; ++c)
                w.past(t, c) = scaler.normalize(c, panel_value(panel.rows[start + t], spec, c));
        w.anchor_close = w.past(lookback - 1, kCloseColumn);
        w.anchor_raw = panel.rows[start + lookback - 1].close;
        w.known_future = nn::Tensor::matrix(horizon, kKnownFutureWidth);
        for (std::size_t k = 0; k < horizon; ++k) {
            const auto& row = panel.rows[start + lookback + k];
            w.known_future(k, 0) = row.holiday ? 1.0 : 0.0;
            if (row.dow < 5) w.known_future(k, 1 + std::size_t(row.dow)) = 1.0;
            w.target.push_back(scaler.normalize_close(row.close));
            w.target_raw.push_back(row.close);
            w.target_dates.push_back(row.date);
        }
        out.push_back(std::move(w));
    }
    return out;
}

namespace {

WindowSet build_impl(const std::vector<AlignedPanel>& panels, const FeatureSetSpec& spec, std::size_t lookback,
                     std::size_t horizon, double split, const Normalizer* given) {
    if (!(split > 0 && split < 1)) throw ConfigError("train split must lie strictly between 0 and 1");
    if (lookback == 0 || horizon == 0) throw ConfigError("lookback and horizon must be positive");
    WindowSet set;
    set.normalizer.columns = spec.columns();
    for (std::size_t c = 0; c < panels.size(); ++c) {
        const auto& panel = panels[c];
        const std::size_t T = panel.rows.size();
        if (T < lookback + horizon)
            throw SizingError(panel.ticker + ": " + std::to_string(T) + " rows, need at least " +
                              std::to_string(lookback + horizon));
        const auto cut = std::size_t(std::floor(split * double(T)));
        if (cut < lookback + horizon)
            throw SizingError(panel.ticker + ": training region of " + std::to_string(cut) +
                              " rows is shorter than lookback + horizon");
        CompanyScaler scaler = given ? given->for_ticker(panel.ticker) : fit_scaler(panel, spec, cut);
        if (scaler.mean.size() != spec.feature_count())
            throw ValidationError(panel.ticker + ": normalizer column count does not match the feature set");
        auto train = slide_windows(panel, spec, scaler, c, lookback, horizon, 0, cut);
        auto test = slide_windows(panel, spec, scaler, c, lookback, horizon, cut, T);
        std::move(train.begin(), train.end(), std::back_inserter(set.train));
        std::move(test.begin(), test.end(), std::back_inserter(set.test));
        set.normalizer.companies.push_back(std::move(scaler));
    }
    return set;
}

} // namespace

WindowSet build_windows(const std::vector<AlignedPanel>& panels, const FeatureSetSpec& spec, std::size_t lookback,
                        std::size_t horizon, double split) {
    return build_impl(panels, spec, lookback, horizon, split, nullptr);
}

WindowSet build_windows(const std::vector<AlignedPanel>& panels, const FeatureSetSpec& spec, std::size_t lookback,
                        std::size_t horizon, double split, const Normalizer& normalizer) {
    return build_impl(panels, spec, lookback, horizon, split, &normalizer);
}

} // namespace sentlab::forecast
