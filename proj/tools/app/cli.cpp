#include "cli.hpp"

#include "commands.hpp"
#include "sentlab/error.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <map>

namespace sentlab::app {

namespace {

void setup_logging() {
    static const bool once = [] {
        auto logger = spdlog::stderr_color_mt("sentlab");
        spdlog::set_default_logger(logger);
        spdlog::set_pattern("[%l] %v");
        return true;
    }();
    (void)once;
    spdlog::set_level(spdlog::level::info);
    if (const char* level = std::getenv("SENTLAB_LOG")) spdlog::set_level(spdlog::level::from_str(level));
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    setup_logging();
    CLI::App app{"sentlab: sentiment-vs-embedding stock forecasting lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::string tickers, feature_sets, models, output;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::map<std::string, std::string> train_overrides;

    forecast::TrainConfig defaults;
    std::vector<std::pair<std::string, CLI::App*>> subcommands;
    for (const char* name :
         {"preprocess", "features", "analyze", "train", "predict", "evaluate", "gridsearch", "report"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config,-c", config_path, "run configuration file")->required();
        sub->add_option("--tickers", tickers, "comma-separated tickers");
        sub->add_option("--feature-set,--feature-sets", feature_sets, "hlov, hlovs, hlove (comma list)");
        sub->add_option("--models,--model", models, "nlinear, tft_lite (comma list)");
        sub->add_option("--output", output, "output directory");
        sub->add_option("--seed", seed, "global seed");
        sub->add_option("--jobs", jobs, "worker threads");
        for (const auto& [key, value] : forecast::describe(defaults)) {
            if (key == "model" || key == "seed") continue;
            std::string flag = "--" + key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            sub->add_option_function<std::string>(
                flag, [&train_overrides, key = key](const std::string& v) { train_overrides[key] = v; },
                "training setting (default " + value + ")");
        }
        subcommands.emplace_back(name, sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        std::string command_name;
        for (const auto& [name, sub] : subcommands)
            if (sub->parsed()) command_name = name;
        const Command command = parse_command(command_name);

        RunConfig config = load_run_config(config_path);
        const std::filesystem::path cwd;
        if (!tickers.empty()) apply_run_setting(config, "run.tickers", tickers, cwd);
        if (!feature_sets.empty()) apply_run_setting(config, "run.feature_sets", feature_sets, cwd);
        if (!models.empty()) apply_run_setting(config, "run.models", models, cwd);
        if (!output.empty()) apply_run_setting(config, "paths.output", output, cwd);
        if (jobs) apply_run_setting(config, "run.jobs", std::to_string(*jobs), cwd);
        if (seed) {
            config.seed = *seed;
            config.train.seed = *seed;
        }
        for (const auto& [k, v] : train_overrides) forecast::apply_setting(config.train, k, v);

        spdlog::debug("{}: config {}, output {}", command_name, config_path, config.output.string());
        run_command(command, config);
        return kOk;
    } catch (const MissingPrerequisiteError& e) {
        spdlog::error("{}", e.what());
        return kMissingPrerequisite;
    } catch (const TrainingError& e) {
        spdlog::error("training failed: {}", e.what());
        return kInternal;
    } catch (const Error& e) {
        if (e.kind() == "io") {
            spdlog::error("{}", e.what());
            return kInternal;
        }
        spdlog::error("{} error: {}", e.kind(), e.what());
        return kValidation;
    } catch (const std::exception& e) {
        spdlog::error("internal error: {}", e.what());
        return kInternal;
    }
}

} // namespace sentlab::app
