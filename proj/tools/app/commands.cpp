#include "commands.hpp"

#include "sentlab/checkpoint.hpp"
#include "sentlab/error.hpp"
#include "sentlab/forecast/grid.hpp"
#include "sentlab/forecast/train.hpp"
#include "sentlab/market_data.hpp"
#include "sentlab/metrics.hpp"
#include "sentlab/parallel.hpp"
#include "sentlab/stats.hpp"
#include "sentlab/text_features.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>

namespace sentlab::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace forecast;

namespace {

// Output layout, relative to the run's output directory.
struct Layout {
    fs::path root;
    fs::path tweets_clean() const { return root / "tweets_clean.csv"; }
    fs::path preprocess_stats() const { return root / "preprocess_stats.json"; }
    fs::path panel(const std::string& t) const { return root / "panels" / (t + ".csv"); }
    fs::path correlations() const { return root / "analysis" / "correlations.json"; }
    fs::path probe() const { return root / "analysis" / "probe.json"; }
    fs::path returns() const { return root / "analysis" / "returns.json"; }
    fs::path histogram() const { return root / "analysis" / "returns_histogram.csv"; }
    fs::path checkpoint(const std::string& tag) const { return root / "models" / (tag + ".json"); }
    fs::path loss_curve(const std::string& tag) const { return root / "models" / (tag + "_loss.csv"); }
    fs::path predictions(const std::string& tag) const { return root / "predictions" / (tag + ".csv"); }
    fs::path metrics() const { return root / "metrics.json"; }
    fs::path metrics_table() const { return root / "metrics_table.csv"; }
    fs::path leaderboard(const std::string& f) const { return root / "gridsearch" / ("leaderboard_" + f + ".csv"); }
    fs::path best_config(const std::string& f) const { return root / "gridsearch" / ("best_" + f + ".cfg"); }
    fs::path report_dir() const { return root / "report"; }
};

void require(const fs::path& path) {
    if (!fs::exists(path)) throw MissingPrerequisiteError(path.string());
}

std::string write_json(const json& j) { return j.dump(2) + "\n"; }

json read_json(const fs::path& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

/// JSON numbers cannot be NaN; undefined values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

BusinessCalendar load_calendar(const RunConfig& c) {
    return c.holidays.empty() ? BusinessCalendar{} : BusinessCalendar::from_holiday_file(c.holidays);
}

std::vector<AlignedPanel> load_panels(const RunConfig& c, const Layout& out) {
    std::vector<AlignedPanel> panels;
    for (const auto& t : c.tickers) {
        require(out.panel(t));
        panels.push_back(read_panel_csv(out.panel(t)));
        if (panels.back().ticker != t)
            throw ValidationError(out.panel(t).string() + " holds ticker '" + panels.back().ticker + "'");
    }
    return panels;
}

FeatureSetSpec spec_for(const std::string& name, const std::vector<AlignedPanel>& panels) {
    FeatureSetSpec spec{parse_feature_set(name), 0};
    if (spec.kind == FeatureSetKind::hlove) {
        spec.embedding_dim = panels.front().embedding_dim;
        if (spec.embedding_dim == 0) throw ConfigError("HLOVE needs embeddings; set paths.embeddings and rerun features");
    }
    return spec;
}

std::string tag_of(const std::string& model, const std::string& feature_set) {
    return to_string(parse_model(model)) + "_" + to_string(parse_feature_set(feature_set));
}

std::vector<std::pair<std::string, std::string>> model_runs(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> runs;
    for (const auto& m : c.models)
        for (const auto& f : c.feature_sets) runs.emplace_back(m, f);
    return runs;
}

std::vector<OhlcvBar> bars_of(const AlignedPanel& p) {
    std::vector<OhlcvBar> bars;
    for (const auto& r : p.rows) bars.push_back({r.date, r.open, r.high, r.low, r.close, r.close, r.volume});
    return bars;
}

template <class F>
std::vector<double> column(const AlignedPanel& p, F f) {
    std::vector<double> out;
    out.reserve(p.rows.size());
    for (const auto& r : p.rows) out.push_back(f(r));
    return out;
}

std::string prediction_csv(const std::vector<PredictionRow>& rows) {
    std::string out = "date,ticker,step,truth,pred\n";
    for (const auto& r : rows)
        out += csv_row({format_date(r.date), r.ticker, std::to_string(r.step), format_double(r.truth), format_double(r.pred)});
    return out;
}

json metrics_json(const MetricsRecord& m) {
    return {{"ticker", m.ticker},  {"model", m.model}, {"feature_set", m.feature_set},
            {"MAPE", number(m.mape)}, {"MAE", number(m.mae)},  {"R2", number(m.r2)},
            {"RMSE", number(m.rmse)}, {"MSE", number(m.mse)},  {"SMAPE", number(m.smape)}};
}

// ---------------------------------------------------------------- commands

void preprocess(const RunConfig& c, const Layout& out) {
    require(c.tweets);
    const auto tweets = read_tweets_csv(c.tweets);
    std::set<std::string> known;
    for (const auto& t : c.tickers) known.insert(t);
    auto result = filter_corpus(tweets, known);
    for (auto& t : result.kept) t.body = clean_tweet(t.body);
    const auto& s = result.stats;
    const json stats = {{"input", s.input},
                        {"missing_writer", s.missing_writer},
                        {"multi_ticker", s.multi_ticker},
                        {"raw_duplicates", s.raw_duplicates},
                        {"clean_duplicates", s.clean_duplicates},
                        {"kept", s.kept}};
    write_file_atomic(out.tweets_clean(), format_tweets_csv(result.kept));
    write_file_atomic(out.preprocess_stats(), write_json(stats));
    spdlog::info("preprocess: kept {} of {} tweets", s.kept, s.input);
}

void features(const RunConfig& c, const Layout& out) {
    require(out.tweets_clean());
    const auto calendar = load_calendar(c);
    auto tweets = read_tweets_csv(out.tweets_clean());
    if (!c.embeddings.empty()) {
        require(c.embeddings);
        attach_embeddings(tweets, read_embeddings_csv(c.embeddings));
    }
    const auto daily = aggregate_daily_text(tweets, calendar);
    std::vector<std::string> files(c.tickers.size());
    parallel_for(c.tickers.size(), c.jobs, [&](std::size_t i) {
        const auto& t = c.tickers[i];
        const auto bars = parse_ohlcv_csv(c.ohlcv_dir / (t + ".csv"), calendar, t);
        std::vector<DailyTextFeatures> mine;
        for (const auto& d : daily)
            if (d.ticker == t) mine.push_back(d);
        files[i] = format_panel_csv(align_panel(bars, mine, calendar, c.smoothing_span));
    });
    for (std::size_t i = 0; i < files.size(); ++i) write_file_atomic(out.panel(c.tickers[i]), files[i]);
    spdlog::info("features: {} panels written", files.size());
}

json correlation_json(const CorrelationTable& t) {
    json m = json::array();
    for (std::size_t r = 0; r < t.values.rows; ++r) {
        json row = json::array();
        for (std::size_t k = 0; k < t.values.cols; ++k) row.push_back(number(t.values(r, k)));
        m.push_back(row);
    }
    return {{"variables", t.names}, {"matrix", m}};
}

void analyze(const RunConfig& c, const Layout& out) {
    const auto panels = load_panels(c, out);
    std::vector<json> corr(panels.size()), probes(panels.size()), returns(panels.size());
    std::vector<std::string> hist(panels.size());
    parallel_for(panels.size(), c.jobs, [&](std::size_t i) {
        const auto& p = panels[i];
        const auto close = column(p, [](const PanelRow& r) { return r.close; });
        const auto volume = column(p, [](const PanelRow& r) { return r.volume; });
        const auto bars = bars_of(p);
        const auto vol = atr(bars, c.atr_window);
        const auto volume_smooth = ewma(volume, c.smoothing_span);
        const std::vector<std::string> names{"close", "volume", "volatility", "sentiment"};
        corr[i] = {{"ticker", p.ticker},
                   {"smoothed", correlation_json(correlation_table(
                                    names, {close, volume_smooth, vol, column(p, [](const PanelRow& r) { return r.score; })}))},
                   {"raw", correlation_json(correlation_table(
                               names, {close, volume, vol, column(p, [](const PanelRow& r) { return r.score_raw; })}))}};

        const auto rs = daily_returns_sigma(close);
        returns[i] = {{"ticker", p.ticker}, {"n", rs.returns.size()}, {"sum_squares", rs.sum_squares}, {"sigma", rs.sigma}};
        const auto [lo_it, hi_it] = std::minmax_element(rs.returns.begin(), rs.returns.end());
        const double lo = *lo_it, hi = *hi_it, width = hi > lo ? (hi - lo) / double(c.histogram_bins) : 1.0;
        std::vector<std::size_t> counts(c.histogram_bins, 0);
        for (const double r : rs.returns)
            ++counts[std::min(c.histogram_bins - 1, std::size_t((r - lo) / width))];
        for (std::size_t b = 0; b < counts.size(); ++b)
            hist[i] += csv_row({p.ticker, format_double(lo + double(b) * width), format_double(lo + double(b + 1) * width),
                                std::to_string(counts[b])});

        json probe = {{"ticker", p.ticker}, {"n_samples", p.rows.size()}, {"dim", p.embedding_dim}};
        if (p.embedding_dim == 0) {
            probe["skipped"] = "panel has no embeddings";
        } else {
            Matrix x(p.rows.size(), p.embedding_dim);
            for (std::size_t r = 0; r < p.rows.size(); ++r)
                for (std::size_t k = 0; k < p.embedding_dim; ++k) x(r, k) = p.rows[r].embedding[k];
            const auto y = column(p, [](const PanelRow& r) { return r.score_raw; });
            try {
                double random = 0;
                for (std::size_t s = 0; s < c.baseline_seeds; ++s)
                    random += ols_r2_probe(random_vector_baseline(x.rows, x.cols, c.seed + 1000 * s + i), y);
                probe["r2_embeddings"] = ols_r2_probe(x, y);
                probe["r2_random"] = random / double(c.baseline_seeds);
                probe["baseline_seeds"] = c.baseline_seeds;
                probe["well_posed"] = x.rows > x.cols;
                if (x.rows <= x.cols) spdlog::warn("probe for {}: {} samples <= {} dims", p.ticker, x.rows, x.cols);
            } catch (const DomainError& e) {
                probe["skipped"] = e.what();
            }
        }
        probes[i] = probe;
    });
    write_file_atomic(out.correlations(), write_json(json(corr)));
    write_file_atomic(out.probe(), write_json(json(probes)));
    write_file_atomic(out.returns(), write_json(json(returns)));
    std::string h = "ticker,bin_left,bin_right,count\n";
    for (const auto& s : hist) h += s;
    write_file_atomic(out.histogram(), h);
    spdlog::info("analyze: {} tickers", panels.size());
}

void train(const RunConfig& c, const Layout& out) {
    const auto panels = load_panels(c, out);
    const auto runs = model_runs(c);
    std::vector<std::string> checkpoints(runs.size()), curves(runs.size());
    parallel_for(runs.size(), c.jobs, [&](std::size_t i) {
        const auto& [model_name, fs_name] = runs[i];
        const auto spec = spec_for(fs_name, panels);
        TrainConfig cfg = c.train;
        cfg.model = parse_model(model_name);
        const auto windows = build_windows(panels, spec, cfg.lookback, cfg.horizon, c.split);
        auto model = make_model(cfg, ModelShape{spec.feature_count(), panels.size()});
        const auto tag = tag_of(model_name, fs_name);
        spdlog::info("train {}: {} windows, {} parameters", tag, windows.train.size(), model->params().scalar_count());
        const auto result = train_model(*model, windows.train, [&](std::size_t epoch, double loss) {
            spdlog::debug("train {}: epoch {} loss {}", tag, epoch, loss);
        });
        checkpoints[i] = serialize_checkpoint(make_checkpoint(*model, spec, windows.normalizer, c.tickers));
        curves[i] = "epoch,loss\n";
        for (std::size_t e = 0; e < result.loss_curve.size(); ++e)
            curves[i] += std::to_string(e + 1) + "," + format_double(result.loss_curve[e]) + "\n";
    });
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto tag = tag_of(runs[i].first, runs[i].second);
        write_file_atomic(out.checkpoint(tag), checkpoints[i]);
        write_file_atomic(out.loss_curve(tag), curves[i]);
    }
}

struct Forecasts {
    std::string tag;
    std::string model;
    std::string feature_set;
    std::vector<PredictionRow> rows;
};

/// Trained-model forecasts for every configured run plus the persistence
/// baseline on the first run's test windows.
std::vector<Forecasts> forecast_all(const RunConfig& c, const Layout& out) {
    const auto runs = model_runs(c);
    for (const auto& [m, f] : runs) require(out.checkpoint(tag_of(m, f)));
    const auto panels = load_panels(c, out);
    std::vector<Forecasts> result(runs.size());
    parallel_for(runs.size(), c.jobs, [&](std::size_t i) {
        const auto tag = tag_of(runs[i].first, runs[i].second);
        const auto ckpt = load_checkpoint(out.checkpoint(tag));
        if (ckpt.tickers != c.tickers) throw ValidationError(tag + ": checkpoint was trained on other tickers");
        auto model = restore_model(ckpt);
        const auto windows = build_windows(panels, ckpt.feature_set, ckpt.config.lookback, ckpt.config.horizon,
                                           c.split, ckpt.normalizer);
        result[i] = {tag, to_string(ckpt.config.model), to_string(ckpt.feature_set.kind),
                     predict_rows(*model, windows.test, ckpt.normalizer, ckpt.tickers)};
    });
    const auto first = load_checkpoint(out.checkpoint(result.front().tag));
    const auto windows = build_windows(panels, FeatureSetSpec{FeatureSetKind::hlov, 0}, first.config.lookback,
                                       first.config.horizon, c.split);
    result.push_back({"naive_seasonal", "naive_seasonal", "close", naive_rows(windows.test, c.tickers)});
    return result;
}

void predict(const RunConfig& c, const Layout& out) {
    for (const auto& f : forecast_all(c, out)) write_file_atomic(out.predictions(f.tag), prediction_csv(f.rows));
}

void evaluate(const RunConfig& c, const Layout& out) {
    const auto forecasts = forecast_all(c, out);
    json records = json::array();
    json rankings = json::object();
    std::string table = "ticker,model,feature_set,MAPE,MAE,R2,RMSE,MSE,SMAPE,composite,rank\n";
    for (const auto& t : c.tickers) {
        std::vector<MetricsRecord> group;
        for (const auto& f : forecasts) {
            auto m = metrics_for(f.rows, t);
            m.model = f.model;
            m.feature_set = f.feature_set;
            records.push_back(metrics_json(m));
            group.push_back(m);
        }
        json ranked = json::array();
        std::size_t place = 0;
        for (const auto& r : composite_rank(group)) {
            const auto& m = group[r.record];
            ranked.push_back({{"model", m.model}, {"feature_set", m.feature_set}, {"composite", r.composite}, {"ranks", r.ranks}});
            std::vector<std::string> row{t, m.model, m.feature_set};
            for (const double v : metric_values(m)) row.push_back(format_double(v));
            row.push_back(format_double(r.composite));
            row.push_back(std::to_string(++place));
            table += csv_row(row);
        }
        rankings[t] = ranked;
    }
    write_file_atomic(out.metrics(), write_json({{"records", records}, {"rankings", rankings}}));
    write_file_atomic(out.metrics_table(), table);
    for (const auto& f : forecasts) write_file_atomic(out.predictions(f.tag), prediction_csv(f.rows));
    spdlog::info("evaluate: {} records", records.size());
}

void gridsearch(const RunConfig& c, const Layout& out) {
    if (c.grid.empty()) throw ConfigError("gridsearch needs at least one grid.<key> = v1,v2,... setting");
    const auto panels = load_panels(c, out);
    for (const auto& fs_name : c.feature_sets) {
        const auto spec = spec_for(fs_name, panels);
        TrainConfig base = c.train;
        base.model = parse_model(c.models.front());
        const auto result = grid_search(base, c.grid, panels, spec, c.split, c.validation_fraction, c.jobs);
        std::vector<std::string> header{"index", "rank", "status"};
        for (const auto& a : c.grid) header.push_back(a.key);
        header.insert(header.end(), {"val_mape", "val_rmse", "error"});
        std::string csv = csv_row(header);
        for (const auto& p : result.leaderboard) {
            std::vector<std::string> row{std::to_string(p.index), p.ok ? std::to_string(p.rank) : "",
                                         p.ok ? "ok" : "failed"};
            for (const auto& kv : p.settings) row.push_back(kv.second);
            row.push_back(p.ok ? format_double(p.val_mape) : "");
            row.push_back(p.ok ? format_double(p.val_rmse) : "");
            row.push_back(p.error);
            csv += csv_row(row);
        }
        const auto name = to_string(spec.kind);
        write_file_atomic(out.leaderboard(name), csv);
        if (result.best) {
            std::string cfg;
            for (const auto& [k, v] : result.leaderboard[*result.best].settings) cfg += "train." + k + " = " + v + "\n";
            write_file_atomic(out.best_config(name), cfg);
            spdlog::info("gridsearch {}: best point {} (validation MAPE {})", name, *result.best,
                         result.leaderboard[*result.best].val_mape);
        } else {
            spdlog::warn("gridsearch {}: every grid point failed", name);
        }
    }
}

void report(const RunConfig& c, const Layout& out) {
    require(out.metrics());
    const auto panels = load_panels(c, out);
    json doc = json::object();
    doc["tickers"] = c.tickers;
    if (fs::exists(out.preprocess_stats())) doc["preprocess"] = read_json(out.preprocess_stats());
    if (fs::exists(out.correlations())) doc["correlations"] = read_json(out.correlations());
    if (fs::exists(out.probe())) doc["probe"] = read_json(out.probe());
    if (fs::exists(out.returns())) doc["returns"] = read_json(out.returns());
    doc["metrics"] = read_json(out.metrics());
    json grids = json::object();
    for (const auto& f : c.feature_sets) {
        const auto name = to_string(parse_feature_set(f));
        if (fs::exists(out.best_config(name))) grids[name] = read_text_file(out.best_config(name));
    }
    if (!grids.empty()) doc["gridsearch_best"] = grids;

    const auto dir = out.report_dir();
    for (const auto& p : panels) {
        const auto close = column(p, [](const PanelRow& r) { return r.close; });
        const auto score = column(p, [](const PanelRow& r) { return r.score; });
        const auto close_s = min_max_scale(close);
        const auto score_s = min_max_scale(score);
        const auto vol = atr(bars_of(p), c.atr_window);
        const auto vol_s = min_max_scale(vol);
        std::string overlay = "date,close_scaled,sentiment_scaled\n";
        std::string pairs = "date,sentiment,volatility,sentiment_scaled,volatility_scaled\n";
        std::string scatter = "date,close,volume,volatility,sentiment,next_return\n";
        for (std::size_t i = 0; i < p.rows.size(); ++i) {
            const auto d = format_date(p.rows[i].date);
            overlay += csv_row({d, format_double(close_s[i]), format_double(score_s[i])});
            pairs += csv_row({d, format_double(score[i]), format_double(vol[i]), format_double(score_s[i]),
                              format_double(vol_s[i])});
            const std::string next = i + 1 < p.rows.size() ? format_double(close[i + 1] / close[i] - 1.0) : "";
            scatter += csv_row({d, format_double(close[i]), format_double(p.rows[i].volume), format_double(vol[i]),
                                format_double(score[i]), next});
        }
        write_file_atomic(dir / ("price_sentiment_" + p.ticker + ".csv"), overlay);
        write_file_atomic(dir / ("sentiment_volatility_" + p.ticker + ".csv"), pairs);
        write_file_atomic(dir / ("scatter_" + p.ticker + ".csv"), scatter);
    }
    write_file_atomic(dir / "report.json", write_json(doc));
    spdlog::info("report written to {}", dir.string());
}

} // namespace

Command parse_command(const std::string& name) {
    static const std::pair<const char*, Command> table[] = {
        {"preprocess", Command::preprocess}, {"features", Command::features}, {"analyze", Command::analyze},
        {"train", Command::train},           {"predict", Command::predict},   {"evaluate", Command::evaluate},
        {"gridsearch", Command::gridsearch}, {"report", Command::report}};
    for (const auto& [n, c] : table)
        if (name == n) return c;
    throw ConfigError("unknown command '" + name + "'");
}

std::string to_string(Command command) {
    switch (command) {
    case Command::preprocess: return "preprocess";
    case Command::features: return "features";
    case Command::analyze: return "analyze";
    case Command::train: return "train";
    case Command::predict: return "predict";
    case Command::evaluate: return "evaluate";
    case Command::gridsearch: return "gridsearch";
    case Command::report: return "report";
    }
    return "?";
}

void run_command(Command command, const RunConfig& config) {
    config.validate();
    const Layout out{config.output};
    switch (command) {
    case Command::preprocess: return preprocess(config, out);
    case Command::features: return features(config, out);
    case Command::analyze: return analyze(config, out);
    case Command::train: return train(config, out);
    case Command::predict: return predict(config, out);
    case Command::evaluate: return evaluate(config, out);
    case Command::gridsearch: return gridsearch(config, out);
    case Command::report: return report(config, out);
    }
}

} // namespace sentlab::app
