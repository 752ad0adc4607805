// Runs every acceptance criterion and prints one pass/fail line per
// criterion. Exit status is non-zero if any criterion fails.

#include "gradcheck_cases.hpp"
#include "oracles.hpp"
#include "panels.hpp"
#include "pipeline.hpp"

#include "sentlab/checkpoint.hpp"
#include "sentlab/forecast/train.hpp"
#include "sentlab/io.hpp"
#include "sentlab/market_data.hpp"
#include "sentlab/metrics.hpp"
#include "sentlab/stats.hpp"
#include "sentlab/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sentlab;
using namespace sentlab::forecast;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds; // 0: no runtime bound
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

Outcome metric_oracle() {
    const auto m = compute_metrics(std::vector<double>{100, 200}, std::vector<double>{110, 180});
    const double expected[6] = {10, 15, 0.9, 15.811388, 250, 10.025063};
    const auto got = metric_values(m);
    double worst = 0;
    for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(got[i] - expected[i]));
    return {worst <= 1e-6, fmt("max abs deviation %.2e", worst)};
}

Outcome dmse_oracle() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<std::size_t> len(1, 5);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t h = len(rng);
        std::vector<double> p(h), t(h);
        for (std::size_t k = 0; k < h; ++k) {
            p[k] = normal(rng);
            t[k] = normal(rng);
        }
        const double a = normal(rng);
        worst = std::max(worst, std::abs(dmse_loss(p, t, a) - oracle::dmse(p, t, a)));
    }
    const double hand1 = dmse_loss(std::vector<double>{0}, std::vector<double>{2}, 1);
    const double hand2 = dmse_loss(std::vector<double>{1.5, 2.5}, std::vector<double>{1, 2}, 1);
    const bool ok = worst <= 1e-12 && hand1 == 4000 && hand2 == 0.25;
    return {ok, fmt("max oracle deviation %.2e; hand cases %.17g, %.17g", worst, hand1, hand2)};
}

Outcome gradient_checks() {
    double worst = 0;
    std::string worst_name;
    std::size_t checked = 0, failures = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        for (auto& c : cases::all_cases(seed)) {
            const auto r = c.check(1e-5, 1e-4);
            checked += r.checked;
            failures += r.failures;
            if (r.max_rel_error > worst) {
                worst = r.max_rel_error;
                worst_name = c.name + " (" + r.worst_parameter + ")";
            }
        }
    }
    return {failures == 0, fmt("%g coordinates, max rel error %.2e", double(checked), worst) + " at " + worst_name};
}

Outcome atr_closed_form() {
    double worst_pow = 0;
    bool exact = true;
    for (std::size_t n : {2u, 14u}) {
        const double a = 1.75;
        std::vector<OhlcvBar> bars;
        for (int t = 0; t < 50; ++t) {
            OhlcvBar b;
            b.open = b.close = b.adj_close = 20;
            b.high = t == 0 ? 20 + a / 2 : 20;
            b.low = t == 0 ? 20 - a / 2 : 20;
            bars.push_back(b);
        }
        const auto got = atr(bars, n);
        const double q = double(n - 1) / double(n);
        double v = a; // ((n-1)/n)^(t-1) * ATR_1 accumulated by repeated multiplication
        for (std::size_t t = 0; t < got.size(); ++t) {
            if (t > 0) v = q * v;
            exact = exact && got[t] == v;
            worst_pow = std::max(worst_pow, std::abs(got[t] - std::pow(q, double(t)) * a) / (std::pow(q, double(t)) * a));
        }
    }
    return {exact && worst_pow < 1e-12,
            std::string(exact ? "bitwise equal to the geometric recursion" : "differs from the geometric recursion") +
                fmt("; max rel deviation from pow() %.2e", worst_pow)};
}

Outcome ewma_responsiveness() {
    std::vector<double> x(40, 1.0);
    const std::size_t step = 20;
    for (std::size_t i = step; i < x.size(); ++i) x[i] = 0.0;
    const auto e = ewma(x, 15);
    const auto r = smooth(x, SmoothingMethod::rolling_mean, 15);
    bool ok = true;
    double margin = 1e300;
    for (std::size_t k = 1; k <= 10; ++k) {
        const std::size_t t = step - 1 + k;
        const double ee = std::abs(e[t]), re = std::abs(r.values[t - r.first_index]);
        ok = ok && ee < re;
        margin = std::min(margin, re - ee);
    }
    return {ok, fmt("smallest gap |rolling| - |ewma| = %.4f", margin)};
}

Outcome spearman_oracle() {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> len(3, 80);
    double worst = 0;
    int compared = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = len(rng);
        const auto x = oracle::tied_vector(rng, n), y = oracle::tied_vector(rng, n);
        const auto r = spearman(x, y);
        if (!r) continue;
        ++compared;
        worst = std::max(worst, std::abs(*r - oracle::spearman(x, y)));
    }
    const double fixture = *spearman(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 2, 3, 4});
    const bool ok = compared >= 990 && worst <= 1e-12 && std::abs(fixture - 0.948683) <= 1e-6;
    return {ok, fmt("%g vectors, max deviation %.2e, tied fixture %.6f", compared, worst, fixture)};
}

Outcome probe_replication() {
    const std::size_t n = 500, d = 32;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    std::vector<double> s(n), u(d);
    s[0] = normal(rng);
    for (std::size_t t = 1; t < n; ++t) s[t] = 0.7 * s[t - 1] + std::sqrt(1 - 0.49) * normal(rng);
    double norm = 0;
    for (auto& v : u) {
        v = normal(rng);
        norm += v * v;
    }
    for (auto& v : u) v /= std::sqrt(norm);
    Matrix e(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) e(i, j) = s[i] * u[j] + 0.3 * normal(rng);
    const double r2 = ols_r2_probe(e, s);
    double random = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) random += ols_r2_probe(random_vector_baseline(n, d, seed), s) / 20;
    const double expected = double(d) / double(n - 1);
    const bool ok = r2 > 0.8 && std::abs(random - expected) <= 0.05;
    return {ok, fmt("embedding R2 %.4f, random R2 %.4f (d/(n-1) = %.4f)", r2, random, expected)};
}

Outcome nlinear_convergence() {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> c(300);
    for (std::size_t t = 0; t < c.size(); ++t) c[t] = 2.0 * double(t + 1) + noise(rng);
    const auto panel = panels::from_closes("LIN", c.size(), [&](std::size_t t) { return c[t]; });
    const FeatureSetSpec spec{FeatureSetKind::hlov, 0};
    const auto set = build_windows({panel}, spec, 15, 3, 0.8);
    TrainConfig cfg;
    cfg.model = ModelKind::nlinear;
    cfg.lookback = 15;
    cfg.horizon = 3;
    cfg.epochs = 200;
    cfg.seed = 8;
    auto model = make_model(cfg, {spec.feature_count(), 1});
    train_model(*model, set.train);
    const double mape = metrics_for(predict_rows(*model, set.test, set.normalizer, {"LIN"}), "").mape;
    return {mape < 1.0, fmt("test MAPE %.4f%%", mape)};
}

Outcome directional_replication() {
    int s_beats_v = 0, s_not_worse_e = 0;
    std::ostringstream detail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SyntheticConfig sc;
        sc.seed = seed;
        const auto market = make_synthetic_market(sc);
        double mape[3];
        int k = 0;
        for (const auto kind : {FeatureSetKind::hlov, FeatureSetKind::hlovs, FeatureSetKind::hlove}) {
            const FeatureSetSpec spec{kind, sc.embedding_dim};
            const auto set = build_windows(market.panels, spec, 15, 3, 0.8);
            TrainConfig cfg;
            cfg.model = ModelKind::tft_lite;
            cfg.hidden_size = 16;
            cfg.hidden_continuous_size = 8;
            cfg.dropout = 0.1;
            cfg.epochs = 20;
            cfg.seed = seed;
            auto model = make_model(cfg, {spec.feature_count(), market.panels.size()});
            train_model(*model, set.train);
            mape[k++] = metrics_for(predict_rows(*model, set.test, set.normalizer, sc.tickers), "").mape;
        }
        s_beats_v += mape[1] < mape[0];
        s_not_worse_e += mape[1] <= mape[2];
        detail << fmt("\n      seed %2.0f  HLOV %.4f  HLOVS %.4f  HLOVE %.4f", double(seed), mape[0], mape[1], mape[2]);
    }
    return {s_beats_v >= 7 && s_not_worse_e >= 6,
            fmt("HLOVS < HLOV on %g/10, HLOVS <= HLOVE on %g/10", s_beats_v, s_not_worse_e) + detail.str()};
}

Outcome end_to_end_determinism() {
    const auto base = fs::temp_directory_path() / "sentlab_acceptance";
    fs::remove_all(base);
    std::string failures;
    for (const char* run : {"a", "b"}) {
        for (const auto& command : pipeline::kCommands) {
            const int code = pipeline::run_fixture(command, base / run, {"--seed", "42"});
            if (code != 0) failures += std::string(" ") + command + "(" + run + ")=" + std::to_string(code);
        }
    }
    if (!failures.empty()) return {false, "non-zero exit:" + failures};
    const bool same_metrics = read_text_file(base / "a" / "metrics.json") == read_text_file(base / "b" / "metrics.json");

    std::size_t checkpoints = 0;
    bool round_trip = true;
    for (const auto& entry : fs::directory_iterator(base / "a" / "models")) {
        if (entry.path().extension() != ".json") continue;
        ++checkpoints;
        const std::string text = read_text_file(entry.path());
        const auto ckpt = parse_checkpoint(text);
        auto model = restore_model(ckpt);
        const auto again = make_checkpoint(*model, ckpt.feature_set, ckpt.normalizer, ckpt.tickers);
        round_trip = round_trip && serialize_checkpoint(again) == text &&
                     read_text_file(base / "b" / "models" / entry.path().filename()) == text;
        for (std::size_t i = 0; i < ckpt.tensors.size(); ++i)
            round_trip = round_trip && model->params()[i].value == ckpt.tensors[i].second;
    }
    fs::remove_all(base);
    const bool ok = same_metrics && checkpoints > 0 && round_trip;
    return {ok, std::string("metrics.json ") + (same_metrics ? "identical" : "DIFFERS") + ", " +
                    std::to_string(checkpoints) + " checkpoints " + (round_trip ? "round-trip bit-exactly" : "DIFFER")};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "metric oracle", 1, metric_oracle},
        {2, "DMSE oracle equivalence", 5, dmse_oracle},
        {3, "gradient checks", 60, gradient_checks},
        {4, "ATR closed form", 0, atr_closed_form},
        {5, "EWMA vs rolling-mean responsiveness", 0, ewma_responsiveness},
        {6, "Spearman oracle", 0, spearman_oracle},
        {7, "embedding probe vs random baseline", 30, probe_replication},
        {8, "NLinear convergence", 30, nlinear_convergence},
        {9, "sentiment features improve TFT-lite", 900, directional_replication},
        {10, "end-to-end determinism", 0, end_to_end_determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0 && secs >= c.budget_seconds) {
            o.pass = false;
            o.detail += fmt(" (over the %.0f s budget)", c.budget_seconds);
        }
        failed += !o.pass;
        std::printf("[%s] %2d %s (%.2f s)\n      %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
