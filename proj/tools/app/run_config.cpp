#include "run_config.hpp"

#include "sentlab/error.hpp"
#include "sentlab/forecast/windows.hpp"
#include "sentlab/io.hpp"

#include <algorithm>
#include <cctype>

namespace sentlab::app {

namespace {

std::vector<std::string> list_of(const std::string& value) {
    std::vector<std::string> out;
    for (const auto& part : split(value, ','))
        if (const auto t = trim(part); !t.empty()) out.emplace_back(t);
    return out;
}

std::size_t count_of(const std::string& key, const std::string& value) {
    const auto v = parse_int(value);
    if (!v || *v <= 0) throw ConfigError(key + ": expected a positive integer, got '" + value + "'");
    return std::size_t(*v);
}

double real_of(const std::string& key, const std::string& value) {
    const auto v = parse_double(value);
    if (!v) throw ConfigError(key + ": expected a number, got '" + value + "'");
    return *v;
}

std::filesystem::path path_of(const std::string& value, const std::filesystem::path& base) {
    std::filesystem::path p(value);
    return p.is_absolute() || base.empty() ? p : base / p;
}

} // namespace

void RunConfig::validate() const {
    if (tickers.empty()) throw ConfigError("run.tickers must list at least one ticker");
    if (!(split > 0 && split < 1)) throw ConfigError("run.split must lie in (0,1)");
    if (jobs == 0) throw ConfigError("run.jobs must be positive");
    if (feature_sets.empty()) throw ConfigError("run.feature_sets must not be empty");
    for (const auto& f : feature_sets) forecast::parse_feature_set(f);
    if (models.empty()) throw ConfigError("run.models must not be empty");
    for (const auto& m : models) forecast::parse_model(m);
    train.validate();
}

void apply_run_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value,
                       const std::filesystem::path& base_dir) {
    const std::string key(trim(raw_key));
    const std::string value(trim(raw_value));
    if (key == "paths.ohlcv_dir") c.ohlcv_dir = path_of(value, base_dir);
    else if (key == "paths.tweets") c.tweets = path_of(value, base_dir);
    else if (key == "paths.embeddings") c.embeddings = value.empty() ? std::filesystem::path{} : path_of(value, base_dir);
    else if (key == "paths.holidays") c.holidays = value.empty() ? std::filesystem::path{} : path_of(value, base_dir);
    else if (key == "paths.output") c.output = path_of(value, base_dir);
    else if (key == "run.tickers") {
        c.tickers = list_of(value);
        for (auto& t : c.tickers) std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return char(std::toupper(ch)); });
    }
    else if (key == "run.feature_sets" || key == "run.feature_set") c.feature_sets = list_of(value);
    else if (key == "run.models" || key == "run.model") c.models = list_of(value);
    else if (key == "run.seed") {
        const auto v = parse_int(value);
        if (!v || *v < 0) throw ConfigError("run.seed: expected a non-negative integer");
        c.seed = std::uint64_t(*v);
        if (!c.train_seed_set) c.train.seed = c.seed;
    } else if (key == "run.split") c.split = real_of(key, value);
    else if (key == "run.jobs") c.jobs = count_of(key, value);
    else if (key == "features.smoothing_span") c.smoothing_span = count_of(key, value);
    else if (key == "analysis.atr_window") c.atr_window = count_of(key, value);
    else if (key == "analysis.histogram_bins") c.histogram_bins = count_of(key, value);
    else if (key == "analysis.baseline_seeds") c.baseline_seeds = count_of(key, value);
    else if (key == "grid.validation_fraction") c.validation_fraction = real_of(key, value);
    else if (key.rfind("grid.", 0) == 0) {
        const auto name = key.substr(5);
        forecast::TrainConfig probe;
        for (const auto& v : list_of(value)) forecast::apply_setting(probe, name, v);
        auto it = std::find_if(c.grid.begin(), c.grid.end(), [&](const auto& a) { return a.key == name; });
        if (it == c.grid.end()) c.grid.push_back({name, list_of(value)});
        else it->values = list_of(value);
    } else if (key.rfind("train.", 0) == 0) {
        const auto name = key.substr(6);
        forecast::apply_setting(c.train, name, value);
        if (name == "seed") c.train_seed_set = true;
    } else {
        throw ConfigError("unknown setting '" + key + "'");
    }
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
    RunConfig c;
    c.train.seed = c.seed;
    c.output = path_of("out", base_dir);
    std::size_t line_no = 0;
    for (const auto& line : split(text, '\n')) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
        try {
            apply_run_setting(c, std::string(t.substr(0, eq)), std::string(t.substr(eq + 1)), base_dir);
        } catch (const ConfigError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_text_file(path), path.parent_path());
}

} // namespace sentlab::app
