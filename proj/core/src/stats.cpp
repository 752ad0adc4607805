#include "sentlab/stats.hpp"

#include "sentlab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace sentlab {

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
        // Positions i..j-1 share the mean of ranks i+1..j.
        const double r = 0.5 * double(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = double(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("spearman: length mismatch");
    if (x.size() < 2) throw ParameterError("spearman: need at least two observations");
    const auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; });
    };
    if (constant(x) || constant(y)) return std::nullopt;
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return std::clamp(pearson(rx, ry), -1.0, 1.0);
}

CorrelationTable correlation_table(const std::vector<std::string>& names,
                                   const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size()) throw ShapeError("correlation_table: names/columns mismatch");
    CorrelationTable t;
    t.names = names;
    t.values = Matrix(names.size(), names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        t.values(i, i) = 1.0;
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            const auto r = spearman(columns[i], columns[j]);
            const double v = r ? *r : std::numeric_limits<double>::quiet_NaN();
            t.values(i, j) = v;
            t.values(j, i) = v;
        }
    }
    return t;
}

double ols_r2_probe(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows, d = x.cols;
    if (y.size() != n) throw ShapeError("ols_r2_probe: X has " + std::to_string(n) + " rows, y has " +
                                        std::to_string(y.size()));
    if (n < 2) throw ParameterError("ols_r2_probe: need at least two samples");
    if (d < 1) throw ParameterError("ols_r2_probe: need at least one feature");
    if (!std::all_of(x.data.begin(), x.data.end(), [](double v) { return std::isfinite(v); }) ||
        !std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); }))
        throw ValidationError("ols_r2_probe: non-finite input");
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; }))
        throw DomainError("ols_r2_probe: constant target");

    Eigen::MatrixXd design(n, d + 1);
    design.col(0).setOnes();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) design(Eigen::Index(i), Eigen::Index(j + 1)) = x(i, j);
    const Eigen::Map<const Eigen::VectorXd> target(y.data(), Eigen::Index(n));

    constexpr double lambda = 1e-8;
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += lambda;
    const Eigen::VectorXd w = gram.ldlt().solve(design.transpose() * target);

    const Eigen::VectorXd residual = target - design * w;
    const double mean = target.mean();
    const double ss_res = residual.squaredNorm();
    const double ss_tot = (target.array() - mean).square().sum();
    return 1.0 - ss_res / ss_tot;
}

Matrix random_vector_baseline(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n == 0 || d == 0) throw ParameterError("random_vector_baseline: n and d must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(n, d);
    for (auto& v : m.data) v = normal(rng);
    return m;
}

} // namespace sentlab
