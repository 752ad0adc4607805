#include "gradcheck_cases.hpp"
#include "oracles.hpp"
#include "panels.hpp"

#include "sentlab/error.hpp"
#include "sentlab/forecast/grid.hpp"
#include "sentlab/forecast/loss.hpp"
#include "sentlab/forecast/models.hpp"
#include "sentlab/forecast/train.hpp"
#include "sentlab/forecast/windows.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sentlab;
using namespace sentlab::forecast;

namespace {

AlignedPanel linear_trend(std::uint64_t seed, std::size_t rows = 300) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> c(rows);
    for (std::size_t t = 0; t < rows; ++t) c[t] = 2.0 * double(t + 1) + noise(rng);
    return panels::from_closes("LIN", rows, [c](std::size_t t) { return c[t]; });
}

TrainConfig small_tft() {
    TrainConfig c;
    c.model = ModelKind::tft_lite;
    c.hidden_size = 8;
    c.hidden_continuous_size = 4;
    c.n_heads = 2;
    c.dropout = 0.1;
    c.lookback = 6;
    c.horizon = 2;
    c.epochs = 2;
    c.batch_size = 16;
    return c;
}

} // namespace

TEST_CASE("feature sets") {
    CHECK(FeatureSetSpec{FeatureSetKind::hlov, 0}.feature_count() == 5);
    CHECK(FeatureSetSpec{FeatureSetKind::hlovs, 0}.feature_count() == 6);
    CHECK(FeatureSetSpec{FeatureSetKind::hlove, 8}.feature_count() == 13);
    CHECK(FeatureSetSpec{FeatureSetKind::hlovs, 0}.columns()[kCloseColumn] == "close");
    CHECK(parse_feature_set("HLOVE") == FeatureSetKind::hlove);
    CHECK_THROWS_AS(parse_feature_set("ohlc"), ConfigError);
}

TEST_CASE("windows") {
    const auto p = panels::from_closes("A", 100, [](std::size_t t) { return 10.0 + double(t); });
    const FeatureSetSpec hlovs{FeatureSetKind::hlovs, 0};

    SUBCASE("counting") {
        CHECK(window_count(100, 15, 3) == 83);
        CHECK(window_count(10, 15, 3) == 0);
        const auto scaler = fit_scaler(p, hlovs, 100);
        const auto w = slide_windows(p, hlovs, scaler, 0, 15, 3);
        CHECK(w.size() == 83);
        CHECK(w[0].past.rows() == 15);
        CHECK(w[0].past.cols() == 6);
        CHECK(w[0].known_future.cols() == kKnownFutureWidth);
        for (std::size_t t = 5; t < 200; t += 17)
            for (std::size_t l = 1; l < 20; l += 3)
                for (std::size_t h = 1; h < 6; ++h)
                    CHECK(window_count(t, l, h) == (t >= l + h ? t - l - h + 1 : 0));
    }
    SUBCASE("pooling") {
        const auto q = panels::from_closes("B", 80, [](std::size_t t) { return 50.0 - 0.1 * double(t); });
        const auto set = build_windows({p, q}, hlovs, 15, 3, 0.8);
        const std::size_t train_a = window_count(80, 15, 3), train_b = window_count(64, 15, 3);
        std::size_t a = 0, b = 0;
        for (const auto& s : set.train) (s.company == 0 ? a : b) += 1;
        CHECK(a == train_a);
        CHECK(b == train_b);
        for (const auto& s : set.test) CHECK(s.company <= 1);
        CHECK(set.normalizer.companies.size() == 2);
    }
    SUBCASE("normalizer uses training rows only") {
        const auto set = build_windows({p}, hlovs, 15, 3, 0.8);
        const auto& sc = set.normalizer.companies[0];
        CHECK(sc.fit_rows == 80);
        double mean = 0;
        for (std::size_t t = 0; t < 80; ++t) mean += p.rows[t].close / 80.0;
        CHECK(sc.mean[kCloseColumn] == doctest::Approx(mean).epsilon(1e-12));
        std::mt19937_64 rng(1);
        std::normal_distribution<double> normal(0.0, 50.0);
        for (int i = 0; i < 100; ++i) {
            const double x = normal(rng);
            CHECK(std::abs(sc.denormalize_close(sc.normalize_close(x)) - x) < 1e-10);
        }
        for (const auto& s : set.test) CHECK(s.target_dates.front() >= p.rows[80].date);
        const auto& last = set.test.back();
        CHECK(last.target_raw.back() == p.rows.back().close);
        CHECK(last.anchor_raw == p.rows[p.rows.size() - 4].close);
    }
    SUBCASE("constant column gets unit spread") {
        const auto flat = panels::from_closes("F", 40, [](std::size_t) { return 7.0; });
        const auto sc = fit_scaler(flat, hlovs, 30);
        CHECK(sc.stdev[kCloseColumn] == 1.0);
    }
}

TEST_CASE("dmse_loss") {
    CHECK(dmse_loss(std::vector<double>{0}, std::vector<double>{2}, 1) == 4000);
    CHECK(dmse_loss(std::vector<double>{1.5, 2.5}, std::vector<double>{1, 2}, 1) == 0.25);

    std::mt19937_64 rng(41);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<std::size_t> len(1, 5);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t h = len(rng);
        std::vector<double> p(h), t(h);
        for (std::size_t i = 0; i < h; ++i) {
            p[i] = normal(rng);
            t[i] = normal(rng);
        }
        const double a = normal(rng);
        const double d = dmse_loss(p, t, a);
        CHECK(std::abs(d - oracle::dmse(p, t, a)) <= 1e-12 * std::max(1.0, std::abs(d)));
        CHECK(d >= 0);
        CHECK(dmse_loss(t, t, a) == 0);
        // Same-direction predictions reduce to plain MSE.
        std::vector<double> same(h);
        double mse = 0;
        for (std::size_t i = 0; i < h; ++i) {
            same[i] = t[i] + 0.5 * ((i == 0 ? t[0] - a : t[i] - t[i - 1]));
            const double prev_t = i == 0 ? a : t[i - 1];
            const double prev_s = i == 0 ? a : same[i - 1];
            if ((t[i] - prev_t) * (same[i] - prev_s) < 0) same[i] = t[i];
            mse += (same[i] - t[i]) * (same[i] - t[i]) / double(h);
        }
        bool aligned = true;
        for (std::size_t i = 0; i < h; ++i)
            aligned = aligned && (t[i] - (i ? t[i - 1] : a)) * (same[i] - (i ? same[i - 1] : a)) >= 0;
        if (aligned) CHECK(dmse_loss(same, t, a) == doctest::Approx(mse).epsilon(1e-12));
    }
}

TEST_CASE("batched dmse matches the scalar loss") {
    std::mt19937_64 rng(43);
    nn::Graph g;
    const nn::Tensor pred = cases::randn(4, 3, rng), truth = cases::randn(4, 3, rng);
    const std::vector<double> anchors{0.1, -0.2, 0.3, 0.0};
    double expected = 0;
    for (std::size_t r = 0; r < 4; ++r) {
        std::vector<double> p(pred.data() + 3 * r, pred.data() + 3 * r + 3), t(truth.data() + 3 * r, truth.data() + 3 * r + 3);
        expected += dmse_loss(p, t, anchors[r]) / 4;
    }
    CHECK(dmse(g.constant(pred), truth, anchors).value()[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("naive_seasonal_forecast") {
    CHECK(naive_seasonal_forecast(std::vector<double>{1, 4, 7.5}, 3) == std::vector<double>{7.5, 7.5, 7.5});
    CHECK(naive_seasonal_forecast(std::vector<double>{2, 9}, 1) == std::vector<double>{9});
    CHECK_THROWS(naive_seasonal_forecast(std::vector<double>{}, 3));
}

TEST_CASE("nlinear_forward") {
    const nn::Tensor w = nn::Tensor::matrix(3, 1, 1.0 / 3.0), b = nn::Tensor::row({0.0});
    CHECK(nlinear_forward(std::vector<double>{1, 2, 3}, w, b)[0] == doctest::Approx(2.0).epsilon(1e-15));
    const nn::Tensor w2 = nn::Tensor::matrix(4, 2, 0.25), b2 = nn::Tensor::row({0.0, 0.0});
    CHECK(nlinear_forward(std::vector<double>{5, 5, 5, 5}, w2, b2) == std::vector<double>{5, 5});

    std::mt19937_64 rng(44);
    std::normal_distribution<double> normal;
    const nn::Tensor wr = cases::randn(6, 3, rng), br = cases::randn(1, 3, rng);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(6), xs(6);
        const double c = 100 * normal(rng);
        for (std::size_t i = 0; i < 6; ++i) {
            x[i] = normal(rng);
            xs[i] = x[i] + c;
        }
        const auto y = nlinear_forward(x, wr, br), ys = nlinear_forward(xs, wr, br);
        for (std::size_t i = 0; i < 3; ++i) CHECK(ys[i] == doctest::Approx(y[i] + c).epsilon(1e-12));
    }
    CHECK_THROWS_AS(nlinear_forward(std::vector<double>{1, 2}, w, b), ShapeError);
}

TEST_CASE("nlinear model agrees with the plain forward") {
    std::mt19937_64 rng(45);
    TrainConfig cfg;
    cfg.model = ModelKind::nlinear;
    cfg.lookback = 5;
    cfg.horizon = 3;
    cfg.const_init = false;
    auto model = make_model(cfg, {5, 1});
    const auto samples = cases::random_windows(4, 5, 3, 5, 1, rng);
    const auto preds = model->predict(samples);
    const auto& w = model->params()[0].value;
    const auto& b = model->params()[1].value;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::vector<double> x;
        for (std::size_t t = 0; t < 5; ++t) x.push_back(samples[i].past(t, kCloseColumn));
        const auto expected = nlinear_forward(x, w, b);
        for (std::size_t s = 0; s < 3; ++s) CHECK(preds[i][s] == doctest::Approx(expected[s]).epsilon(1e-13));
    }
}

TEST_CASE("tft_lite") {
    std::mt19937_64 rng(46);
    const auto cfg = small_tft();
    SUBCASE("output shape") {
        for (std::size_t f : {5, 6, 9}) {
            auto model = make_model(cfg, {f, 2});
            const auto samples = cases::random_windows(5, cfg.lookback, cfg.horizon, f, 2, rng);
            const auto preds = model->predict(samples);
            REQUIRE(preds.size() == 5);
            for (const auto& p : preds) CHECK(p.size() == cfg.horizon);
        }
    }
    SUBCASE("zero parameters give the head bias") {
        auto model = make_model(cfg, {6, 2});
        for (auto& p : model->params()) p.value.fill(0.0);
        auto& bias = model->params()[model->params().index_of("head.b")].value;
        bias[0] = 0.25;
        bias[1] = -1.5;
        const auto preds = model->predict(cases::random_windows(3, cfg.lookback, cfg.horizon, 6, 2, rng));
        for (const auto& p : preds) {
            CHECK(p[0] == 0.25);
            CHECK(p[1] == -1.5);
        }
    }
    SUBCASE("deterministic forward, including dropout") {
        auto a = make_model(cfg, {6, 2});
        auto b = make_model(cfg, {6, 2});
        const auto batch = make_batch(cases::random_windows(4, cfg.lookback, cfg.horizon, 6, 2, rng));
        std::mt19937_64 ra(3), rb(3);
        nn::Graph ga, gb;
        CHECK(a->forward(ga, batch, true, &ra).value() == b->forward(gb, batch, true, &rb).value());
        nn::Graph ea, eb;
        CHECK(a->forward(ea, batch, false, nullptr).value() == b->forward(eb, batch, false, nullptr).value());
    }
    SUBCASE("bad configuration") {
        auto bad = cfg;
        bad.n_heads = 3;
        CHECK_THROWS_AS(make_model(bad, {6, 2}), ConfigError);
        auto model = make_model(cfg, {6, 1});
        CHECK_THROWS(model->predict(cases::random_windows(2, cfg.lookback, cfg.horizon, 6, 2, rng)));
    }
}

TEST_CASE("train_model") {
    const FeatureSetSpec hlov{FeatureSetKind::hlov, 0};
    const auto set = build_windows({linear_trend(1)}, hlov, 15, 3, 0.8);

    SUBCASE("zero epochs is a no-op") {
        TrainConfig cfg;
        cfg.model = ModelKind::nlinear;
        cfg.epochs = 0;
        auto model = make_model(cfg, {5, 1});
        const auto before = model->params()[0].value;
        CHECK(train_model(*model, set.train).loss_curve.empty());
        CHECK(model->params()[0].value == before);
    }
    SUBCASE("identical seeds give identical curves") {
        auto cfg = small_tft();
        cfg.lookback = 15;
        cfg.horizon = 3;
        auto a = make_model(cfg, {5, 1});
        auto b = make_model(cfg, {5, 1});
        const auto ra = train_model(*a, set.train), rb = train_model(*b, set.train);
        CHECK(ra.loss_curve == rb.loss_curve);
        CHECK(a->predict(set.test) == b->predict(set.test));
    }
    SUBCASE("nlinear loss falls tenfold on a linear trend") {
        TrainConfig cfg;
        cfg.model = ModelKind::nlinear;
        cfg.epochs = 200;
        auto model = make_model(cfg, {5, 1});
        const double before = evaluate_loss(*model, set.train);
        const auto r = train_model(*model, set.train);
        CHECK(r.loss_curve.size() == 200);
        CHECK(evaluate_loss(*model, set.train) * 10 <= before);
    }
    SUBCASE("empty training set") {
        TrainConfig cfg;
        cfg.model = ModelKind::nlinear;
        auto model = make_model(cfg, {5, 1});
        CHECK_THROWS_AS(train_model(*model, {}), TrainingError);
    }
}

TEST_CASE("prediction rows") {
    const FeatureSetSpec hlov{FeatureSetKind::hlov, 0};
    const auto set = build_windows({linear_trend(2, 60)}, hlov, 6, 2, 0.7);
    const auto naive = naive_rows(set.test, {"LIN"});
    REQUIRE(naive.size() == 2 * set.test.size());
    CHECK(naive[0].step == 1);
    CHECK(naive[1].step == 2);
    CHECK(naive[0].pred == set.test[0].anchor_raw);
    CHECK(naive[1].truth == set.test[0].target_raw[1]);

    TrainConfig cfg;
    cfg.model = ModelKind::nlinear;
    cfg.lookback = 6;
    cfg.horizon = 2;
    auto model = make_model(cfg, {5, 1});
    const auto rows = predict_rows(*model, set.test, set.normalizer, {"LIN"});
    const auto preds = model->predict(set.test);
    const auto& sc = set.normalizer.companies[0];
    CHECK(rows[3].pred == doctest::Approx(sc.denormalize_close(preds[1][1])).epsilon(1e-14));
    CHECK(metrics_for(rows, "LIN").mape == metrics_for(rows, "").mape);
}

TEST_CASE("grid_search") {
    TrainConfig base;
    base.model = ModelKind::nlinear;
    base.epochs = 5;
    base.lookback = 5;
    base.horizon = 3;
    const FeatureSetSpec hlov{FeatureSetKind::hlov, 0};
    const auto panel = linear_trend(3, 120);

    SUBCASE("expansion order") {
        const auto g = expand_grid({{"lookback", {"5", "10"}}, {"learning_rate", {"0.1", "0.01", "0.001"}}});
        REQUIRE(g.size() == 6);
        CHECK(g[0][0].second == "5");
        CHECK(g[1][1].second == "0.01");
        CHECK(g[3][0].second == "10");
    }
    SUBCASE("singleton grid") {
        const auto r = grid_search(base, {{"lookback", {"7"}}}, {panel}, hlov, 0.8, 0.2);
        REQUIRE(r.best);
        CHECK(r.leaderboard.size() == 1);
        CHECK(r.leaderboard[*r.best].config.lookback == 7);
        CHECK(r.leaderboard[0].rank == 1);
    }
    SUBCASE("two rows") {
        const auto r = grid_search(base, {{"learning_rate", {"0.01", "0.001"}}, {"epochs", {"3"}}}, {panel}, hlov, 0.8, 0.2);
        CHECK(r.leaderboard.size() == 2);
    }
    SUBCASE("failing points are kept") {
        const auto r = grid_search(base, {{"lookback", {"5", "500"}}}, {panel}, hlov, 0.8, 0.2);
        REQUIRE(r.leaderboard.size() == 2);
        CHECK(r.leaderboard[0].ok);
        CHECK_FALSE(r.leaderboard[1].ok);
        CHECK_FALSE(r.leaderboard[1].error.empty());
        CHECK(r.leaderboard[1].rank == 0);
        CHECK(*r.best == 0);
    }
    SUBCASE("parallel search matches the serial one") {
        const std::vector<GridAxis> space{{"learning_rate", {"0.01", "0.001"}}, {"lookback", {"4", "6"}}};
        const auto a = grid_search(base, space, {panel}, hlov, 0.8, 0.2, 1);
        const auto b = grid_search(base, space, {panel}, hlov, 0.8, 0.2, 3);
        for (std::size_t i = 0; i < a.leaderboard.size(); ++i) {
            CHECK(a.leaderboard[i].val_mape == b.leaderboard[i].val_mape);
            CHECK(a.leaderboard[i].rank == b.leaderboard[i].rank);
        }
    }
    SUBCASE("period-12 pattern needs the longer lookback") {
        // Twelve unrelated levels repeating: forecasting three steps ahead
        // needs the value twelve steps back, which only lookback 15 sees.
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> level(90, 110);
        std::normal_distribution<double> noise(0.0, 0.05);
        std::vector<double> pattern(12);
        for (auto& v : pattern) v = level(rng);
        std::vector<double> closes(400);
        for (std::size_t t = 0; t < closes.size(); ++t) closes[t] = pattern[t % 12] + noise(rng);
        const auto seasonal = panels::from_closes("SEA", closes.size(), [closes](std::size_t t) { return closes[t]; });
        auto cfg = base;
        cfg.const_init = false;
        cfg.loss = LossKind::mse;
        cfg.learning_rate = 0.01;
        cfg.epochs = 60;
        const auto r = grid_search(cfg, {{"lookback", {"5", "15"}}}, {seasonal}, hlov, 0.8, 0.2);
        REQUIRE(r.best);
        CHECK(r.leaderboard[*r.best].config.lookback == 15);
        CHECK(r.leaderboard[1].val_mape * 3 < r.leaderboard[0].val_mape);
    }
}

TEST_CASE("train config settings") {
    TrainConfig c;
    apply_setting(c, "hidden-size", "16");
    apply_setting(c, "feed_forward", "relu");
    apply_setting(c, "norm_type", "layernorm");
    CHECK(c.hidden_size == 16);
    CHECK(c.feed_forward == nn::FeedForward::relu);
    CHECK(c.norm_type == nn::NormType::layernorm);
    CHECK_THROWS_AS(apply_setting(c, "hidden_size", "many"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "no_such_key", "1"), ConfigError);
    TrainConfig d;
    for (const auto& [k, v] : describe(c)) apply_setting(d, k, v);
    CHECK(describe(d) == describe(c));
}
