#include "sentlab/forecast/grid.hpp"

#include "sentlab/error.hpp"
#include "sentlab/forecast/train.hpp"
#include "sentlab/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace sentlab::forecast {

std::vector<std::vector<std::pair<std::string, std::string>>> expand_grid(const std::vector<GridAxis>& space) {
    std::vector<std::vector<std::pair<std::string, std::string>>> points{{}};
    for (const auto& axis : space) {
        if (axis.values.empty()) throw ConfigError("grid axis '" + axis.key + "' has no values");
        std::vector<std::vector<std::pair<std::string, std::string>>> next;
        for (const auto& p : points)
            for (const auto& v : axis.values) {
                next.push_back(p);
                next.back().emplace_back(axis.key, v);
            }
        points = std::move(next);
    }
    return points;
}

GridResult grid_search(const TrainConfig& base, const std::vector<GridAxis>& space,
                       const std::vector<AlignedPanel>& panels, const FeatureSetSpec& spec, double split,
                       double val_fraction, std::size_t jobs) {
    if (!(split > 0 && split < 1)) throw ConfigError("split must lie in (0,1)");
    if (!(val_fraction > 0 && val_fraction < 1)) throw ConfigError("validation fraction must lie in (0,1)");
    if (panels.empty()) throw ValidationError("grid search needs at least one panel");

    // Only the training region is visible to the search.
    std::vector<AlignedPanel> visible = panels;
    std::vector<std::string> tickers;
    for (auto& p : visible) {
        p.rows.resize(std::size_t(std::floor(split * double(p.rows.size()))));
        tickers.push_back(p.ticker);
    }

    GridResult result;
    for (auto& settings : expand_grid(space)) {
        GridPoint point;
        point.index = result.leaderboard.size();
        point.settings = std::move(settings);
        point.config = base;
        result.leaderboard.push_back(std::move(point));
    }

    parallel_for(result.leaderboard.size(), jobs, [&](std::size_t i) {
        GridPoint& point = result.leaderboard[i];
        try {
            for (const auto& [k, v] : point.settings) apply_setting(point.config, k, v);
            point.config.validate();
            const auto windows =
                build_windows(visible, spec, point.config.lookback, point.config.horizon, 1.0 - val_fraction);
            if (windows.test.empty()) throw SizingError("validation region yields no windows");
            auto model = make_model(point.config, ModelShape{spec.feature_count(), visible.size()});
            train_model(*model, windows.train);
            const auto rows = predict_rows(*model, windows.test, windows.normalizer, tickers);
            const auto m = metrics_for(rows, "");
            if (!std::isfinite(m.mape) || !std::isfinite(m.rmse)) throw TrainingError("non-finite validation metrics");
            point.val_mape = m.mape;
            point.val_rmse = m.rmse;
            point.ok = true;
        } catch (const Error& e) {
            point.ok = false;
            point.error = e.what();
        }
    });

    std::vector<std::size_t> order;
    for (const auto& p : result.leaderboard)
        if (p.ok) order.push_back(p.index);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = result.leaderboard[a];
        const auto& pb = result.leaderboard[b];
        if (pa.val_mape != pb.val_mape) return pa.val_mape < pb.val_mape;
        return pa.val_rmse < pb.val_rmse;
    });
    for (std::size_t r = 0; r < order.size(); ++r) result.leaderboard[order[r]].rank = r + 1;
    if (!order.empty()) result.best = order.front();
    return result;
}

} // namespace sentlab::forecast
