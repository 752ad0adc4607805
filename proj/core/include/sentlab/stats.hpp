#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sentlab {

/// Dense row-major matrix used by the regression probe.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    bool operator==(const Matrix&) const = default;
};

/// Fractional (average) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> x);

double pearson(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation with average ranks for ties. nullopt when
/// either input is constant (correlation undefined).
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct CorrelationTable {
    std::vector<std::string> names;
    Matrix values; // symmetric, unit diagonal; NaN where undefined
};

CorrelationTable correlation_table(const std::vector<std::string>& names,
                                   const std::vector<std::vector<double>>& columns);

/// In-sample R^2 of a ridge-stabilised (lambda = 1e-8) least-squares fit of y
/// on [1 | X].
double ols_r2_probe(const Matrix& x, std::span<const double> y);

/// Standard-normal n x d matrix, fully determined by the seed.
Matrix random_vector_baseline(std::size_t n, std::size_t d, std::uint64_t seed);

struct ProbeResult {
    std::string ticker;
    double r2_embeddings = 0;
    double r2_random = 0;
    std::size_t n_samples = 0;
    std::size_t dim = 0;
    bool well_posed = true; // n_samples > dim
};

} // namespace sentlab
