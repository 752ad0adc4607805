#pragma once

#include "sentlab/forecast/config.hpp"
#include "sentlab/forecast/windows.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sentlab::forecast {

/// One hyperparameter and its candidate values, as accepted by apply_setting.
struct GridAxis {
    std::string key;
    std::vector<std::string> values;
};

struct GridPoint {
    std::size_t index = 0;
    std::vector<std::pair<std::string, std::string>> settings;
    TrainConfig config;
    bool ok = false;
    std::string error;
    double val_mape = 0;
    double val_rmse = 0;
    std::size_t rank = 0; // 1 = best; 0 for failed points
};

struct GridResult {
    std::vector<GridPoint> leaderboard; // grid order
    std::optional<std::size_t> best;    // index into leaderboard
};

/// Cartesian product of the axes, first axis varying slowest.
std::vector<std::vector<std::pair<std::string, std::string>>> expand_grid(const std::vector<GridAxis>& space);

/// Trains one model per grid point on the leading `split` share of every
/// panel minus its last `val_fraction`, scoring pooled validation MAPE in
/// price units (ties: RMSE, then grid order). Points that fail to build or
/// train are kept with their error. Runs up to `jobs` points concurrently.
GridResult grid_search(const TrainConfig& base, const std::vector<GridAxis>& space,
                       const std::vector<AlignedPanel>& panels, const FeatureSetSpec& spec, double split,
                       double val_fraction, std::size_t jobs = 1);

} // namespace sentlab::forecast
