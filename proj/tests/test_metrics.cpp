#include "oracles.hpp"

#include "sentlab/error.hpp"
#include "sentlab/metrics.hpp"

#include <doctest.h>

#include <random>

using namespace sentlab;

namespace {

MetricsRecord record(std::array<double, 6> v) {
    MetricsRecord r;
    r.mape = v[0];
    r.mae = v[1];
    r.r2 = v[2];
    r.rmse = v[3];
    r.mse = v[4];
    r.smape = v[5];
    return r;
}

} // namespace

TEST_CASE("compute_metrics examples") {
    const std::vector<double> t{100, 200}, p{110, 180};
    const auto m = compute_metrics(t, p);
    CHECK(m.mape == doctest::Approx(10).epsilon(1e-12));
    CHECK(m.mae == doctest::Approx(15).epsilon(1e-12));
    CHECK(m.mse == doctest::Approx(250).epsilon(1e-12));
    CHECK(m.rmse == doctest::Approx(15.811388).epsilon(1e-7));
    CHECK(m.r2 == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(m.smape == doctest::Approx(10.025063).epsilon(1e-7));

    const auto perfect = compute_metrics(t, t);
    CHECK(perfect.mape == 0);
    CHECK(perfect.mae == 0);
    CHECK(perfect.rmse == 0);
    CHECK(perfect.smape == 0);
    CHECK(perfect.r2 == 1);

    CHECK(compute_metrics(t, std::vector<double>{150, 150}).r2 == doctest::Approx(0.0));
}

TEST_CASE("compute_metrics errors") {
    CHECK_THROWS_AS(compute_metrics(std::vector<double>{0, 1}, std::vector<double>{1, 1}), DomainError);
    CHECK_THROWS_AS(compute_metrics(std::vector<double>{2, 2}, std::vector<double>{1, 1}), DomainError);
    CHECK_THROWS(compute_metrics(std::vector<double>{2, 3}, std::vector<double>{1}));
}

TEST_CASE("compute_metrics properties") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> t(12), p(12);
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = 50 + 10 * normal(rng);
            p[i] = t[i] + 3 * normal(rng);
        }
        const auto m = compute_metrics(t, p);
        const auto o = oracle::metrics(t, p);
        CHECK(m.mape == doctest::Approx(o.mape).epsilon(1e-12));
        CHECK(m.mae == doctest::Approx(o.mae).epsilon(1e-12));
        CHECK(m.r2 == doctest::Approx(o.r2).epsilon(1e-12));
        CHECK(m.rmse == doctest::Approx(o.rmse).epsilon(1e-12));
        CHECK(m.smape == doctest::Approx(o.smape).epsilon(1e-12));

        const double c = 0.1 + std::abs(normal(rng)) * 5;
        std::vector<double> ct, cp;
        for (std::size_t i = 0; i < t.size(); ++i) {
            ct.push_back(c * t[i]);
            cp.push_back(c * p[i]);
        }
        const auto s = compute_metrics(ct, cp);
        CHECK(s.mape == doctest::Approx(m.mape).epsilon(1e-12));
        CHECK(s.smape == doctest::Approx(m.smape).epsilon(1e-12));
        CHECK(compute_metrics(p, t).smape == doctest::Approx(m.smape).epsilon(1e-12));
        CHECK(m.mae > 0);
    }
}

TEST_CASE("composite_rank") {
    SUBCASE("dominance") {
        const auto r = composite_rank({record({5, 5, 0.1, 5, 25, 5}), record({1, 1, 0.9, 1, 1, 1})});
        CHECK(r[0].record == 1);
        CHECK(r[0].composite == 1);
        CHECK(r[1].composite == 2);
    }
    SUBCASE("averaging") {
        // A wins MAPE, R2, RMSE, SMAPE; B wins MAE and MSE.
        const auto a = record({1, 2, 0.9, 1, 4, 1});
        const auto b = record({2, 1, 0.8, 2, 3, 2});
        const auto r = composite_rank({b, a});
        CHECK(r[0].record == 1);
        CHECK(r[0].composite == doctest::Approx(4.0 / 3.0));
        CHECK(r[1].composite == doctest::Approx(5.0 / 3.0));
    }
    SUBCASE("ties keep input order") {
        const auto x = record({1, 1, 0.5, 1, 1, 1});
        const auto r = composite_rank({x, x, x});
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(r[i].record == i);
            CHECK(r[i].composite == 2);
        }
    }
    SUBCASE("too few records") {
        CHECK_THROWS_AS(composite_rank({record({1, 1, 1, 1, 1, 1})}), ValidationError);
    }
    SUBCASE("invariant under a monotone transform of one column") {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> unit(0.1, 10);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<MetricsRecord> g;
            for (int i = 0; i < 5; ++i) g.push_back(record({unit(rng), unit(rng), unit(rng), unit(rng), unit(rng), unit(rng)}));
            auto h = g;
            for (auto& r : h) r.mae = std::log(r.mae) * 3 + 1;
            const auto a = composite_rank(g), b = composite_rank(h);
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a[i].record == b[i].record);
                CHECK(a[i].ranks == b[i].ranks);
            }
        }
    }
}
