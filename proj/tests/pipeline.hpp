#pragma once

#include "cli.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pipeline {

inline const std::vector<std::string> kCommands{"preprocess", "features", "analyze", "train",
                                                "predict",    "evaluate", "gridsearch", "report"};

inline int run(std::vector<std::string> args) {
    args.insert(args.begin(), "sentlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return sentlab::app::run_cli(int(argv.size()), argv.data());
}

inline std::filesystem::path fixture_config() { return std::filesystem::path(SENTLAB_FIXTURE_DIR) / "run.cfg"; }

/// Runs `command` on the bundled fixture, writing into `output`.
inline int run_fixture(const std::string& command, const std::filesystem::path& output,
                       std::vector<std::string> extra = {}) {
    std::vector<std::string> args{command, "--config", fixture_config().string(), "--output", output.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
}

} // namespace pipeline
