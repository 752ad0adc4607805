#pragma once

#include "sentlab/forecast/models.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sentlab {

inline constexpr int kCheckpointVersion = 1;

/// Everything needed to rebuild a trained model and map its outputs back to
/// prices. Stored as JSON; doubles are written in shortest round-trip form.
struct ModelCheckpoint {
    int format_version = kCheckpointVersion;
    forecast::TrainConfig config;
    forecast::ModelShape shape;
    forecast::FeatureSetSpec feature_set;
    std::vector<std::string> tickers;
    forecast::Normalizer normalizer;
    std::vector<std::pair<std::string, nn::Tensor>> tensors;
};

ModelCheckpoint make_checkpoint(const forecast::Forecaster& model, const forecast::FeatureSetSpec& feature_set,
                                const forecast::Normalizer& normalizer, std::vector<std::string> tickers);

std::string serialize_checkpoint(const ModelCheckpoint& checkpoint);

/// Throws UnsupportedVersionError for a version other than 1 and
/// CorruptionError for anything unreadable or incomplete.
ModelCheckpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::filesystem::path& path);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

/// Builds the model the checkpoint describes and copies its tensors in.
/// A missing, extra or mis-shaped tensor is a CorruptionError.
std::unique_ptr<forecast::Forecaster> restore_model(const ModelCheckpoint& checkpoint);

} // namespace sentlab
