#include "gradcheck_cases.hpp"

#include "sentlab/error.hpp"
#include "sentlab/nn/blocks.hpp"
#include "sentlab/nn/optim.hpp"

#include <doctest.h>

#include <cmath>

using namespace sentlab;
using namespace sentlab::nn;

namespace {

Tensor row(std::vector<double> v) { return Tensor::row(std::move(v)); }

void zero_all(ParameterSet& ps) {
    for (auto& p : ps) p.value.fill(0.0);
}

} // namespace

TEST_CASE("rmsnorm") {
    Graph g;
    for (const double v : rmsnorm_rows(g.constant(row({3, 3, 3})), g.constant(row({1, 1, 1}))).value().values())
        CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rmsnorm_rows(g.constant(row({0, 0})), g.constant(row({1, 1}))).value() == row({0, 0}));
    const auto y = rmsnorm_rows(g.constant(row({1, -1})), g.constant(row({2, 2}))).value();
    CHECK(y[0] == doctest::Approx(2).epsilon(1e-8));
    CHECK(y[1] == doctest::Approx(-2).epsilon(1e-8));
    CHECK_THROWS_AS(rmsnorm_rows(g.constant(row({1, 2})), g.constant(row({1, 1, 1}))), ShapeError);

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const Tensor x = cases::randn(1, 6, rng), gain = cases::randn(1, 6, rng);
        Tensor cx = x;
        for (auto& v : cx.values()) v *= 37.5;
        const auto a = rmsnorm_rows(g.constant(x), g.constant(gain)).value();
        const auto b = rmsnorm_rows(g.constant(cx), g.constant(gain)).value();
        // Scale invariance holds up to the epsilon inside the square root.
        for (std::size_t i = 0; i < 6; ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-7));
    }
}

TEST_CASE("swiglu_ff") {
    Graph g;
    const auto one = g.constant(Tensor::scalar(1));
    CHECK(swiglu_ff(one, one, one, one, FeedForward::swiglu).value()[0] == doctest::Approx(0.731059).epsilon(1e-6));
    const auto zero = g.constant(row({0, 0}));
    std::mt19937_64 rng(2);
    const auto w1 = g.constant(cases::randn(2, 3, rng)), w2 = g.constant(cases::randn(2, 3, rng)),
               w3 = g.constant(cases::randn(3, 2, rng));
    for (const auto v : {FeedForward::swiglu, FeedForward::relu})
        CHECK(swiglu_ff(zero, w1, w2, w3, v).value() == row({0, 0}));
    const auto neg = g.constant(Tensor({1, 1}, std::vector<double>{-1.0}));
    CHECK(swiglu_ff(one, neg, one, one, FeedForward::relu).value()[0] == 0.0);
    CHECK_THROWS_AS(swiglu_ff(zero, w3, w2, w1, FeedForward::swiglu), ShapeError);
}

TEST_CASE("grn") {
    std::mt19937_64 rng(3);
    for (std::size_t h : {4, 8, 16}) {
        ParameterSet ps;
        GrnConfig cfg;
        cfg.input = cfg.hidden = cfg.output = h;
        cfg.context = 3;
        const auto grn = Grn::create(ps, "g", cfg, rng);
        Graph g;
        Pass pass{g, ps};
        const auto x = pass.input(cases::randn(2, h, rng));
        const auto y = grn(pass, x, pass.input(cases::randn(2, 3, rng)));
        CHECK(y.rows() == 2);
        CHECK(y.cols() == h);
    }
    SUBCASE("context is optional") {
        ParameterSet ps;
        GrnConfig cfg;
        cfg.input = cfg.hidden = cfg.output = 4;
        const auto grn = Grn::create(ps, "g", cfg, rng);
        Graph g;
        Pass pass{g, ps};
        const auto y = grn(pass, pass.input(cases::randn(3, 4, rng)));
        CHECK(y.cols() == 4);
        CHECK(y.value().all_finite());
    }
    SUBCASE("zero weights reduce to the norm of the input") {
        ParameterSet ps;
        GrnConfig cfg;
        cfg.input = cfg.hidden = cfg.output = 4;
        const auto grn = Grn::create(ps, "g", cfg, rng);
        zero_all(ps);
        ps[grn.norm.gain].value.fill(1.0);
        Graph g;
        Pass pass{g, ps};
        const Tensor xv = cases::randn(1, 4, rng);
        const auto y = grn(pass, pass.input(xv)).value();
        const auto expected = rmsnorm_rows(g.constant(xv), g.constant(row({1, 1, 1, 1}))).value();
        for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(expected[i]).epsilon(1e-14));
    }
}

TEST_CASE("lstm_step") {
    std::mt19937_64 rng(4);
    ParameterSet ps;
    const auto cell = LstmCell::create(ps, "l", 2, 3, rng);
    SUBCASE("zero parameters") {
        zero_all(ps);
        Graph g;
        Pass pass{g, ps};
        const Tensor c0 = row({0.4, -1.2, 2.0});
        const auto [h, c] = cell(pass, pass.input(row({1, -1})), pass.input(row({0, 0, 0})), pass.input(c0));
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(c.value()[i] == doctest::Approx(0.5 * c0[i]).epsilon(1e-15));
            CHECK(h.value()[i] == doctest::Approx(0.5 * std::tanh(0.5 * c0[i])).epsilon(1e-15));
        }
        const auto [h0, cz] = cell(pass, pass.input(row({0, 0})), pass.input(row({0, 0, 0})), pass.input(row({0, 0, 0})));
        CHECK(h0.value() == row({0, 0, 0}));
        CHECK(cz.value() == row({0, 0, 0}));
    }
    SUBCASE("hidden state is bounded") {
        Graph g;
        Pass pass{g, ps};
        for (int trial = 0; trial < 20; ++trial) {
            const auto [h, c] = cell(pass, pass.input(cases::randn(4, 2, rng, 10)), pass.input(cases::randn(4, 3, rng, 10)),
                                     pass.input(cases::randn(4, 3, rng, 10)));
            for (const double v : h.value().values()) CHECK(std::abs(v) < 1);
        }
    }
}

TEST_CASE("multi_head_attention") {
    std::mt19937_64 rng(5);
    ParameterSet ps;
    CHECK_THROWS_AS(MultiHeadAttention::create(ps, "bad", 6, 4, rng), ConfigError);
    const auto mha = MultiHeadAttention::create(ps, "a", 4, 2, rng);

    SUBCASE("identical keys give uniform weights") {
        Graph g;
        Pass pass{g, ps};
        Tensor same = Tensor::matrix(3, 4);
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 4; ++c) same(r, c) = 0.1 * double(c + 1);
        Tensor weights;
        mha(pass, pass.input(cases::randn(3, 4, rng)), pass.input(same), pass.input(cases::randn(3, 4, rng)), 1, false,
            &weights);
        for (const double w : weights.values()) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("causal rows are normalized and respect the mask") {
        Graph g;
        Pass pass{g, ps};
        const auto x = pass.input(cases::randn(2 * 5, 4, rng));
        Tensor weights;
        mha(pass, x, x, x, 2, true, &weights);
        REQUIRE(weights.rows() == 2 * 2 * 5);
        for (std::size_t r = 0; r < weights.rows(); ++r) {
            const std::size_t q = r % 5;
            double total = 0;
            for (std::size_t k = 0; k < 5; ++k) {
                CHECK(weights(r, k) >= 0);
                if (k > q) CHECK(weights(r, k) == 0.0);
                total += weights(r, k);
            }
            CHECK(std::abs(total - 1) < 1e-12);
            if (q == 0) CHECK(weights(r, 0) == 1.0);
        }
    }
}

TEST_CASE("variable_selection") {
    std::mt19937_64 rng(6);
    SUBCASE("single variable") {
        ParameterSet ps;
        const auto vs = VariableSelection::create(ps, "vs", 1, 3, 4, 0, NormType::rmsnorm, 0.0, rng);
        Graph g;
        Pass pass{g, ps};
        const auto x = pass.input(cases::randn(2, 3, rng));
        const auto out = vs(pass, {x}, std::nullopt);
        CHECK(out.weights.value() == Tensor::matrix(2, 1, 1.0));
        const auto direct = vs.per_variable[0](pass, x).value();
        CHECK(out.combined.value() == direct);
    }
    SUBCASE("zero selector logits give uniform weights") {
        ParameterSet ps;
        const auto vs = VariableSelection::create(ps, "vs", 4, 2, 4, 0, NormType::rmsnorm, 0.0, rng);
        for (auto& p : ps)
            if (p.name.rfind("vs.select.", 0) == 0 && p.name.find("norm") == std::string::npos) p.value.fill(0.0);
        Graph g;
        Pass pass{g, ps};
        std::vector<Var> vars;
        for (int f = 0; f < 4; ++f) vars.push_back(pass.input(cases::randn(3, 2, rng)));
        const auto out = vs(pass, vars, std::nullopt);
        for (const double w : out.weights.value().values()) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("weights are on the simplex") {
        ParameterSet ps;
        const auto vs = VariableSelection::create(ps, "vs", 5, 2, 4, 3, NormType::layernorm, 0.0, rng);
        Graph g;
        Pass pass{g, ps};
        std::vector<Var> vars;
        for (int f = 0; f < 5; ++f) vars.push_back(pass.input(cases::randn(7, 2, rng, 3)));
        const auto out = vs(pass, vars, pass.input(cases::randn(7, 3, rng)));
        for (std::size_t r = 0; r < 7; ++r) {
            double total = 0;
            for (std::size_t f = 0; f < 5; ++f) {
                CHECK(out.weights.value()(r, f) >= 0);
                total += out.weights.value()(r, f);
            }
            CHECK(std::abs(total - 1) < 1e-12);
        }
    }
    SUBCASE("no variables") {
        ParameterSet ps;
        CHECK_THROWS_AS(VariableSelection::create(ps, "vs", 0, 2, 4, 0, NormType::rmsnorm, 0.0, rng), ConfigError);
    }
}

TEST_CASE("adam_step") {
    SUBCASE("first step moves by lr against the gradient sign") {
        std::vector<Parameter> ps{Parameter("w", row({1.0, -2.0, 0.5}))};
        ps[0].grad = row({0.3, -4.0, 1e-3});
        adam_step(ps, 0.01, 0.9, 0.999, 1e-8);
        CHECK(ps[0].value[0] == doctest::Approx(0.99).epsilon(1e-6));
        CHECK(ps[0].value[1] == doctest::Approx(-1.99).epsilon(1e-6));
        CHECK(ps[0].value[2] == doctest::Approx(0.49).epsilon(1e-4));
        CHECK(ps[0].step == 1);
    }
    SUBCASE("zero gradient leaves parameters unchanged") {
        std::vector<Parameter> ps{Parameter("w", row({1.0, -2.0}))};
        adam_step(ps, 0.01, 0.9, 0.999, 1e-8);
        CHECK(ps[0].value == row({1.0, -2.0}));
    }
    SUBCASE("replicas stay bitwise equal") {
        std::mt19937_64 rng(7);
        std::vector<Parameter> a{Parameter("w", cases::randn(3, 3, rng))};
        auto b = a;
        for (int s = 0; s < 25; ++s) {
            const Tensor grad = cases::randn(3, 3, rng);
            a[0].grad = grad;
            b[0].grad = grad;
            adam_step(a, 1e-3, 0.9, 0.999, 1e-8);
            adam_step(b, 1e-3, 0.9, 0.999, 1e-8);
        }
        CHECK(a[0].value == b[0].value);
    }
    SUBCASE("non-finite gradient names the parameter") {
        std::vector<Parameter> ps{Parameter("ok", row({1.0})), Parameter("broken", row({1.0}))};
        ps[1].grad = row({std::nan("")});
        try {
            adam_step(ps, 0.01, 0.9, 0.999, 1e-8);
            FAIL("expected a training error");
        } catch (const TrainingError& e) {
            CHECK(std::string(e.what()).find("broken") != std::string::npos);
        }
        CHECK(ps[0].value == row({1.0}));
    }
}

TEST_CASE("gradcheck") {
    SUBCASE("quadratic") {
        ParameterSet ps;
        std::mt19937_64 rng(8);
        ps.add("theta", cases::randn(2, 3, rng));
        const auto report = gradcheck(
            [](Graph& g, ParameterSet& p) {
                const auto t = g.parameter(p[0]);
                return sum(mul(t, t));
            },
            ps, 1e-5, 1e-9);
        CHECK(report.passed);
        CHECK(report.checked == 6);
    }
    SUBCASE("every block") {
        for (std::uint64_t seed : {101, 102}) {
            for (auto& c : cases::all_cases(seed)) {
                const auto report = c.check();
                INFO(c.name << " seed " << seed << " worst " << report.worst_parameter << "[" << report.worst_index
                            << "] rel " << report.max_rel_error);
                CHECK(report.passed);
                CHECK(report.checked == c.parameters().scalar_count());
            }
        }
    }
}

TEST_CASE("dropout") {
    std::mt19937_64 a(9), b(9);
    Graph g;
    const auto x = g.constant(Tensor::matrix(4, 50, 1.0));
    CHECK(dropout(x, 0.0, a).value() == x.value());
    const auto da = dropout(x, 0.3, a).value(), db = dropout(x, 0.3, b).value();
    CHECK(da == db);
    for (const double v : da.values()) CHECK((v == 0.0 || v == doctest::Approx(1.0 / 0.7)));
}
