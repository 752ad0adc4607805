#pragma once

#include "sentlab/forecast/config.hpp"
#include "sentlab/forecast/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sentlab::app {

/// Settings of one batch run. Loaded from a flat `section.key = value` file;
/// relative paths resolve against the file's directory.
struct RunConfig {
    std::filesystem::path ohlcv_dir;  // <ohlcv_dir>/<TICKER>.csv
    std::filesystem::path tweets;
    std::filesystem::path embeddings; // optional
    std::filesystem::path holidays;   // optional
    std::filesystem::path output = "out";

    std::vector<std::string> tickers;
    std::vector<std::string> feature_sets{"hlovs"};
    std::vector<std::string> models{"tft_lite"};
    std::uint64_t seed = 42;
    double split = 0.8;
    std::size_t jobs = 1;

    std::size_t smoothing_span = 15;
    std::size_t atr_window = 14;
    std::size_t histogram_bins = 40;
    std::size_t baseline_seeds = 5;

    forecast::TrainConfig train;
    bool train_seed_set = false;
    std::vector<forecast::GridAxis> grid;
    double validation_fraction = 0.2;

    void validate() const;
};

/// Applies one dotted key. `base_dir` resolves relative paths.
void apply_run_setting(RunConfig& config, const std::string& key, const std::string& value,
                       const std::filesystem::path& base_dir);

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace sentlab::app
