#include "sentlab/nn/ops.hpp"

#include "sentlab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace sentlab::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

ConstMapMat view(const Tensor& t) { return {t.data(), Eigen::Index(t.rows()), Eigen::Index(t.cols())}; }
MapMat view(Tensor& t) { return {t.data(), Eigen::Index(t.rows()), Eigen::Index(t.cols())}; }

Graph& graph_of(std::initializer_list<Var> vars) {
    Graph* g = nullptr;
    for (const auto& v : vars) {
        if (!v.graph) throw ShapeError("variable is not attached to a graph");
        if (g && v.graph != g) throw ShapeError("variables belong to different graphs");
        g = v.graph;
    }
    return *g;
}

void require_same_shape(Var a, Var b, const char* op) {
    if (!a.value().same_shape(b.value()))
        throw ShapeError(std::string(op) + ": shape mismatch " + a.value().shape_string() + " vs " +
                         b.value().shape_string());
}

Tensor like(const Tensor& t, double fill = 0.0) { return Tensor::matrix(t.rows(), t.cols(), fill); }

/// Elementwise op given y = f(x) and dy/dx expressed through (x, y).
template <class F, class D>
Var unary(Var a, F f, D dfdx) {
    Graph& g = graph_of({a});
    const Tensor& x = a.value();
    Tensor y = like(x);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
    const std::size_t ia = a.id;
    return g.record(std::move(y), {ia}, [ia, dfdx](Graph& gr, std::size_t self) {
        if (!gr.requires_grad(ia)) return;
        const Tensor& x = gr.value(ia);
        const Tensor& y = gr.value(self);
        const Tensor& dy = gr.grad(self);
        Tensor& dx = gr.grad(ia);
        for (std::size_t i = 0; i < x.size(); ++i) dx[i] += dy[i] * dfdx(x[i], y[i]);
    });
}

double sigmoid_scalar(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace

Var matmul(Var a, Var b) {
    Graph& g = graph_of({a, b});
    const Tensor& A = a.value();
    const Tensor& B = b.value();
    if (A.cols() != B.rows())
        throw ShapeError("matmul: " + A.shape_string() + " x " + B.shape_string());
    Tensor C = Tensor::matrix(A.rows(), B.cols());
    view(C).noalias() = view(A) * view(B);
    const std::size_t ia = a.id, ib = b.id;
    return g.record(std::move(C), {ia, ib}, [ia, ib](Graph& gr, std::size_t self) {
        const auto dC = view(std::as_const(gr.grad(self)));
        if (gr.requires_grad(ia)) view(gr.grad(ia)).noalias() += dC * view(gr.value(ib)).transpose();
        if (gr.requires_grad(ib)) view(gr.grad(ib)).noalias() += view(gr.value(ia)).transpose() * dC;
    });
}

Var linear(Var x, Var w, std::optional<Var> bias) {
    Graph& g = bias ? graph_of({x, w, *bias}) : graph_of({x, w});
    const Tensor& X = x.value();
    const Tensor& W = w.value();
    if (X.cols() != W.rows())
        throw ShapeError("linear: input " + X.shape_string() + " vs weight " + W.shape_string());
    Tensor Y = Tensor::matrix(X.rows(), W.cols());
    view(Y).noalias() = view(X) * view(W);
    std::vector<std::size_t> inputs = {x.id, w.id};
    if (bias) {
        const Tensor& b = bias->value();
        if (b.size() != W.cols())
            throw ShapeError("linear: bias " + b.shape_string() + " vs weight " + W.shape_string());
        const Eigen::Map<const Eigen::RowVectorXd> bv(b.data(), Eigen::Index(b.size()));
        view(Y).rowwise() += bv;
        inputs.push_back(bias->id);
    }
    const std::size_t ix = x.id, iw = w.id;
    const std::size_t ib = bias ? bias->id : std::size_t(-1);
    return g.record(std::move(Y), std::move(inputs), [ix, iw, ib](Graph& gr, std::size_t self) {
        const auto dY = view(std::as_const(gr.grad(self)));
        if (gr.requires_grad(ix)) view(gr.grad(ix)).noalias() += dY * view(gr.value(iw)).transpose();
        if (gr.requires_grad(iw)) view(gr.grad(iw)).noalias() += view(gr.value(ix)).transpose() * dY;
        if (ib != std::size_t(-1) && gr.requires_grad(ib)) {
            Tensor& db = gr.grad(ib);
            Eigen::Map<Eigen::RowVectorXd>(db.data(), Eigen::Index(db.size())) += dY.colwise().sum();
        }
    });
}

Var add(Var a, Var b) {
    Graph& g = graph_of({a, b});
    require_same_shape(a, b, "add");
    Tensor y = like(a.value());
    view(y) = view(a.value()) + view(b.value());
    const std::size_t ia = a.id, ib = b.id;
    return g.record(std::move(y), {ia, ib}, [ia, ib](Graph& gr, std::size_t self) {
        const auto dy = view(std::as_const(gr.grad(self)));
        if (gr.requires_grad(ia)) view(gr.grad(ia)) += dy;
        if (gr.requires_grad(ib)) view(gr.grad(ib)) += dy;
    });
}

Var sub(Var a, Var b) {
    Graph& g = graph_of({a, b});
    require_same_shape(a, b, "sub");
    Tensor y = like(a.value());
    view(y) = view(a.value()) - view(b.value());
    const std::size_t ia = a.id, ib = b.id;
    return g.record(std::move(y), {ia, ib}, [ia, ib](Graph& gr, std::size_t self) {
        const auto dy = view(std::as_const(gr.grad(self)));
        if (gr.requires_grad(ia)) view(gr.grad(ia)) += dy;
        if (gr.requires_grad(ib)) view(gr.grad(ib)) -= dy;
    });
}

Var mul(Var a, Var b) {
    Graph& g = graph_of({a, b});
    require_same_shape(a, b, "mul");
    Tensor y = like(a.value());
    view(y) = view(a.value()).cwiseProduct(view(b.value()));
    const std::size_t ia = a.id, ib = b.id;
    return g.record(std::move(y), {ia, ib}, [ia, ib](Graph& gr, std::size_t self) {
        const auto dy = view(std::as_const(gr.grad(self)));
        if (gr.requires_grad(ia)) view(gr.grad(ia)) += dy.cwiseProduct(view(gr.value(ib)));
        if (gr.requires_grad(ib)) view(gr.grad(ib)) += dy.cwiseProduct(view(gr.value(ia)));
    });
}

Var scale(Var a, double factor) {
    return unary(a, [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Var add_row(Var a, Var row) {
    Graph& g = graph_of({a, row});
    const Tensor& A = a.value();
    const Tensor& r = row.value();
    if (r.size() != A.cols()) throw ShapeError("add_row: " + A.shape_string() + " + " + r.shape_string());
    Tensor y = A;
    view(y).rowwise() += Eigen::Map<const Eigen::RowVectorXd>(r.data(), Eigen::Index(r.size()));
    const std::size_t ia = a.id, ir = row.id;
    return g.record(std::move(y), {ia, ir}, [ia, ir](Graph& gr, std::size_t self) {
        const auto dy = view(std::as_const(gr.grad(self)));
        if (gr.requires_grad(ia)) view(gr.grad(ia)) += dy;
        if (gr.requires_grad(ir)) {
            Tensor& dr = gr.grad(ir);
            Eigen::Map<Eigen::RowVectorXd>(dr.data(), Eigen::Index(dr.size())) += dy.colwise().sum();
        }
    });
}

Var sigmoid(Var a) {
    return unary(a, sigmoid_scalar, [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
    return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var relu(Var a) {
    return unary(a, [](double x) { return x > 0 ? x : 0.0; }, [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Var silu(Var a) {
    return unary(
        a, [](double x) { return x * sigmoid_scalar(x); },
        [](double x, double) {
            const double s = sigmoid_scalar(x);
            return s * (1.0 + x * (1.0 - s));
        });
}

Var elu(Var a) {
    return unary(
        a, [](double x) { return x > 0 ? x : std::expm1(x); },
        [](double x, double y) { return x > 0 ? 1.0 : y + 1.0; });
}

Var softmax_rows(Var a) {
    Graph& g = graph_of({a});
    const Tensor& x = a.value();
    Tensor y = like(x);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < x.cols(); ++c) mx = std::max(mx, x(r, c));
        double z = 0;
        for (std::size_t c = 0; c < x.cols(); ++c) z += (y(r, c) = std::exp(x(r, c) - mx));
        for (std::size_t c = 0; c < x.cols(); ++c) y(r, c) /= z;
    }
    const std::size_t ia = a.id;
    return g.record(std::move(y), {ia}, [ia](Graph& gr, std::size_t self) {
        if (!gr.requires_grad(ia)) return;
        const Tensor& y = gr.value(self);
        const Tensor& dy = gr.grad(self);
        Tensor& dx = gr.grad(ia);
        for (std::size_t r = 0; r < y.rows(); ++r) {
            double dot = 0;
            for (std::size_t c = 0; c < y.cols(); ++c) dot += dy(r, c) * y(r, c);
            for (std::size_t c = 0; c < y.cols(); ++c) dx(r, c) += y(r, c) * (dy(r, c) - dot);
        }
    });
}

Var rmsnorm_rows(Var x, Var gain, double eps) {
    Graph& g = graph_of({x, gain});
    const Tensor& X = x.value();
    const Tensor& G = gain.value();
    if (G.size() != X.cols())
        throw ShapeError("rmsnorm: input " + X.shape_string() + " vs gain " + G.shape_string());
    const std::size_t n = X.cols();
    auto inv_rms = std::make_shared<std::vector<double>>(X.rows());
    Tensor y = like(X);
    for (std::size_t r = 0; r < X.rows(); ++r) {
        double ms = 0;
        for (std::size_t c = 0; c < n; ++c) ms += X(r, c) * X(r, c);
        const double inv = 1.0 / std::sqrt(ms / double(n) + eps);
        (*inv_rms)[r] = inv;
        for (std::size_t c = 0; c < n; ++c) y(r, c) = G[c] * X(r, c) * inv;
    }
    const std::size_t ix = x.id, ig = gain.id;
    return g.record(std::move(y), {ix, ig}, [ix, ig, inv_rms, n](Graph& gr, std::size_t self) {
        const Tensor& X = gr.value(ix);
        const Tensor& G = gr.value(ig);
        const Tensor& dy = gr.grad(self);
        const bool want_x = gr.requires_grad(ix), want_g = gr.requires_grad(ig);
        for (std::size_t r = 0; r < X.rows(); ++r) {
            const double inv = (*inv_rms)[r];
            double dot = 0;
            for (std::size_t c = 0; c < n; ++c) {
                const double xhat = X(r, c) * inv;
                if (want_g) gr.grad(ig)[c] += dy(r, c) * xhat;
                dot += dy(r, c) * G[c] * xhat;
            }
            if (!want_x) continue;
            Tensor& dx = gr.grad(ix);
            for (std::size_t c = 0; c < n; ++c) {
                const double xhat = X(r, c) * inv;
                dx(r, c) += (dy(r, c) * G[c] - xhat * dot / double(n)) * inv;
            }
        }
    });
}

Var layernorm_rows(Var x, Var gain, Var bias, double eps) {
    Graph& g = graph_of({x, gain, bias});
    const Tensor& X = x.value();
    const Tensor& G = gain.value();
    const Tensor& B = bias.value();
    if (G.size() != X.cols() || B.size() != X.cols())
        throw ShapeError("layernorm: input " + X.shape_string() + " vs gain " + G.shape_string());
    const std::size_t n = X.cols();
    auto xhat = std::make_shared<Tensor>(like(X));
    auto inv_std = std::make_shared<std::vector<double>>(X.rows());
    Tensor y = like(X);
    for (std::size_t r = 0; r < X.rows(); ++r) {
        double mu = 0;
        for (std::size_t c = 0; c < n; ++c) mu += X(r, c);
        mu /= double(n);
        double var = 0;
        for (std::size_t c = 0; c < n; ++c) var += (X(r, c) - mu) * (X(r, c) - mu);
        const double inv = 1.0 / std::sqrt(var / double(n) + eps);
        (*inv_std)[r] = inv;
        for (std::size_t c = 0; c < n; ++c) {
            (*xhat)(r, c) = (X(r, c) - mu) * inv;
            y(r, c) = G[c] * (*xhat)(r, c) + B[c];
        }
    }
    const std::size_t ix = x.id, ig = gain.id, ib = bias.id;
    return g.record(std::move(y), {ix, ig, ib}, [ix, ig, ib, xhat, inv_std, n](Graph& gr, std::size_t self) {
        const Tensor& G = gr.value(ig);
        const Tensor& dy = gr.grad(self);
        const bool want_x = gr.requires_grad(ix);
        for (std::size_t r = 0; r < dy.rows(); ++r) {
            double mean_d = 0, mean_dx = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (gr.requires_grad(ig)) gr.grad(ig)[c] += dy(r, c) * (*xhat)(r, c);
                if (gr.requires_grad(ib)) gr.grad(ib)[c] += dy(r, c);
                const double d = dy(r, c) * G[c];
                mean_d += d;
                mean_dx += d * (*xhat)(r, c);
            }
            if (!want_x) continue;
            mean_d /= double(n);
            mean_dx /= double(n);
            Tensor& dx = gr.grad(ix);
            for (std::size_t c = 0; c < n; ++c)
                dx(r, c) += (dy(r, c) * G[c] - mean_d - (*xhat)(r, c) * mean_dx) * (*inv_std)[r];
        }
    });
}

Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no inputs");
    Graph& g = *parts.front().graph;
    const std::size_t rows = parts.front().rows();
    std::size_t cols = 0;
    std::vector<std::size_t> inputs;
    for (const auto& p : parts) {
        if (p.graph != &g) throw ShapeError("concat_cols: variables belong to different graphs");
        if (p.rows() != rows) throw ShapeError("concat_cols: row count mismatch");
        cols += p.cols();
        inputs.push_back(p.id);
    }
    Tensor y = Tensor::matrix(rows, cols);
    std::size_t off = 0;
    for (const auto& p : parts) {
        view(y).middleCols(Eigen::Index(off), Eigen::Index(p.cols())) = view(p.value());
        off += p.cols();
    }
    return g.record(std::move(y), inputs, [inputs](Graph& gr, std::size_t self) {
        const auto dy = view(std::as_const(gr.grad(self)));
        std::size_t off = 0;
        for (const auto id : inputs) {
            const std::size_t w = gr.value(id).cols();
            if (gr.requires_grad(id)) view(gr.grad(id)) += dy.middleCols(Eigen::Index(off), Eigen::Index(w));
            off += w;
        }
    });
}

Var slice_cols(Var a, std::size_t start, std::size_t count) {
    Graph& g = graph_of({a});
    const Tensor& A = a.value();
    if (start + count > A.cols() || count == 0)
        throw ShapeError("slice_cols: [" + std::to_string(start) + "," + std::to_string(start + count) +
                         ") out of " + A.shape_string());
    Tensor y = Tensor::matrix(A.rows(), count);
    view(y) = view(A).middleCols(Eigen::Index(start), Eigen::Index(count));
    const std::size_t ia = a.id;
    return g.record(std::move(y), {ia}, [ia, start, count](Graph& gr, std::size_t self) {
        if (!gr.requires_grad(ia)) return;
        view(gr.grad(ia)).middleCols(Eigen::Index(start), Eigen::Index(count)) +=
            view(std::as_const(gr.grad(self)));
    });
}

Var scale_rows(Var a, Var s) {
    Graph& g = graph_of({a, s});
    const Tensor& A = a.value();
    const Tensor& S = s.value();
    if (S.rows() != A.rows() || S.cols() != 1)
        throw ShapeError("scale_rows: " + A.shape_string() + " by " + S.shape_string());
    Tensor y = A;
    for (std::size_t r = 0; r < A.rows(); ++r)
        for (std::size_t c = 0; c < A.cols(); ++c) y(r, c) *= S[r];
    const std::size_t ia = a.id, is = s.id;
    return g.record(std::move(y), {ia, is}, [ia, is](Graph& gr, std::size_t self) {
        const Tensor& A = gr.value(ia);
        const Tensor& S = gr.value(is);
        const Tensor& dy = gr.grad(self);
        for (std::size_t r = 0; r < A.rows(); ++r) {
            double acc = 0;
            for (std::size_t c = 0; c < A.cols(); ++c) {
                acc += dy(r, c) * A(r, c);
                if (gr.requires_grad(ia)) gr.grad(ia)(r, c) += dy(r, c) * S[r];
            }
            if (gr.requires_grad(is)) gr.grad(is)[r] += acc;
        }
    });
}

Var repeat_rows(Var a, std::size_t times) {
    Graph& g = graph_of({a});
    const Tensor& A = a.value();
    Tensor y = Tensor::matrix(A.rows() * times, A.cols());
    for (std::size_t b = 0; b < A.rows(); ++b)
        for (std::size_t t = 0; t < times; ++t)
            std::copy_n(A.data() + b * A.cols(), A.cols(), y.data() + (b * times + t) * A.cols());
    const std::size_t ia = a.id;
    return g.record(std::move(y), {ia}, [ia, times](Graph& gr, std::size_t self) {
        if (!gr.requires_grad(ia)) return;
        const Tensor& dy = gr.grad(self);
        Tensor& da = gr.grad(ia);
        const std::size_t n = da.cols();
        for (std::size_t b = 0; b < da.rows(); ++b)
            for (std::size_t t = 0; t < times; ++t)
                for (std::size_t c = 0; c < n; ++c) da(b, c) += dy(b * times + t, c);
    });
}

Var take_step(Var a, std::size_t steps, std::size_t step) {
    Graph& g = graph_of({a});
    const Tensor& A = a.value();
    if (steps == 0 || A.rows() % steps != 0 || step >= steps)
        throw ShapeError("take_step: " + A.shape_string() + " steps=" + std::to_string(steps));
    const std::size_t batch = A.rows() / steps, n = A.cols();
    Tensor y = Tensor::matrix(batch, n);
    for (std::size_t b = 0; b < batch; ++b)
        std::copy_n(A.data() + (b * steps + step) * n, n, y.data() + b * n);
    const std::size_t ia = a.id;
    return g.record(std::move(y), {ia}, [ia, steps, step](Graph& gr, std::size_t self) {
        if (!gr.requires_grad(ia)) return;
        const Tensor& dy = gr.grad(self);
        Tensor& da = gr.grad(ia);
        for (std::size_t b = 0; b < dy.rows(); ++b)
            for (std::size_t c = 0; c < dy.cols(); ++c) da(b * steps + step, c) += dy(b, c);
    });
}

Var stack_steps(const std::vector<Var>& steps) {
    if (steps.empty()) throw ShapeError("stack_steps: no inputs");
    Graph& g = *steps.front().graph;
    const std::size_t batch = steps.front().rows(), n = steps.front().cols(), T = steps.size();
    std::vector<std::size_t> inputs;
    for (const auto& s : steps) {
        if (s.graph != &g || s.rows() != batch || s.cols() != n) throw ShapeError("stack_steps: inconsistent steps");
        inputs.push_back(s.id);
    }
    Tensor y = Tensor::matrix(batch * T, n);
    for (std::size_t t = 0; t < T; ++t) {
        const Tensor& s = steps[t].value();
        for (std::size_t b = 0; b < batch; ++b) std::copy_n(s.data() + b * n, n, y.data() + (b * T + t) * n);
    }
    return g.record(std::move(y), inputs, [inputs, batch, n](Graph& gr, std::size_t self) {
        const Tensor& dy = gr.grad(self);
        const std::size_t T = inputs.size();
        for (std::size_t t = 0; t < T; ++t) {
            if (!gr.requires_grad(inputs[t])) continue;
            Tensor& ds = gr.grad(inputs[t]);
            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t c = 0; c < n; ++c) ds(b, c) += dy(b * T + t, c);
        }
    });
}

Var gather_rows(Var table, const std::vector<std::size_t>& indices) {
    Graph& g = graph_of({table});
    const Tensor& T = table.value();
    const std::size_t n = T.cols();
    Tensor y = Tensor::matrix(indices.size(), n);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (indices[r] >= T.rows())
            throw ShapeError("gather_rows: index " + std::to_string(indices[r]) + " out of " + T.shape_string());
        std::copy_n(T.data() + indices[r] * n, n, y.data() + r * n);
    }
    const std::size_t it = table.id;
    return g.record(std::move(y), {it}, [it, indices, n](Graph& gr, std::size_t self) {
        if (!gr.requires_grad(it)) return;
        const Tensor& dy = gr.grad(self);
        Tensor& dt = gr.grad(it);
        for (std::size_t r = 0; r < indices.size(); ++r)
            for (std::size_t c = 0; c < n; ++c) dt(indices[r], c) += dy(r, c);
    });
}

Var dropout(Var a, double rate, std::mt19937_64& rng) {
    if (rate < 0 || rate >= 1) throw ConfigError("dropout rate must be in [0,1)");
    if (rate == 0) return a;
    Graph& g = graph_of({a});
    const Tensor& A = a.value();
    auto mask = std::make_shared<Tensor>(like(A));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double keep = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < mask->size(); ++i) (*mask)[i] = u(rng) >= rate ? keep : 0.0;
    Tensor y = like(A);
    view(y) = view(A).cwiseProduct(view(std::as_const(*mask)));
    const std::size_t ia = a.id;
    return g.record(std::move(y), {ia}, [ia, mask](Graph& gr, std::size_t self) {
        if (!gr.requires_grad(ia)) return;
        view(gr.grad(ia)) += view(std::as_const(gr.grad(self))).cwiseProduct(view(std::as_const(*mask)));
    });
}

Var sum(Var a) {
    Graph& g = graph_of({a});
    double s = 0;
    for (const double v : a.value().values()) s += v;
    const std::size_t ia = a.id;
    return g.record(Tensor::scalar(s), {ia}, [ia](Graph& gr, std::size_t self) {
        if (!gr.requires_grad(ia)) return;
        const double d = gr.grad(self)[0];
        for (auto& v : gr.grad(ia).values()) v += d;
    });
}

Var mean(Var a) {
    const double n = double(a.value().size());
    return scale(sum(a), 1.0 / n);
}

Var scaled_dot_attention(Var q, Var k, Var v, std::size_t batch, std::size_t n_heads, bool causal,
                         Tensor* weights) {
    Graph& g = graph_of({q, k, v});
    const Tensor& Q = q.value();
    const Tensor& K = k.value();
    const Tensor& V = v.value();
    const std::size_t H = Q.cols();
    if (n_heads == 0 || H % n_heads != 0)
        throw ConfigError("attention: hidden size " + std::to_string(H) + " not divisible by " +
                          std::to_string(n_heads) + " heads");
    if (K.cols() != H || V.cols() != H || batch == 0 || Q.rows() % batch != 0 || K.rows() % batch != 0 ||
        V.rows() != K.rows())
        throw ShapeError("attention: inconsistent q/k/v shapes");
    const std::size_t Lq = Q.rows() / batch, Lk = K.rows() / batch, dk = H / n_heads;
    if (causal && Lq != Lk) throw ShapeError("attention: causal mask needs equal query/key lengths");
    const double inv_scale = 1.0 / std::sqrt(double(dk));

    auto P = std::make_shared<Tensor>(Tensor::matrix(batch * n_heads * Lq, Lk));
    Tensor out = Tensor::matrix(Q.rows(), H);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t h = 0; h < n_heads; ++h)
            for (std::size_t i = 0; i < Lq; ++i) {
                const std::size_t prow = (b * n_heads + h) * Lq + i;
                const std::size_t visible = causal ? i + 1 : Lk;
                double mx = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < visible; ++j) {
                    double s = 0;
                    for (std::size_t c = 0; c < dk; ++c) s += Q(b * Lq + i, h * dk + c) * K(b * Lk + j, h * dk + c);
                    (*P)(prow, j) = s * inv_scale;
                    mx = std::max(mx, (*P)(prow, j));
                }
                double z = 0;
                for (std::size_t j = 0; j < visible; ++j) z += ((*P)(prow, j) = std::exp((*P)(prow, j) - mx));
                for (std::size_t j = 0; j < Lk; ++j) (*P)(prow, j) = j < visible ? (*P)(prow, j) / z : 0.0;
                for (std::size_t j = 0; j < visible; ++j) {
                    const double p = (*P)(prow, j);
                    for (std::size_t c = 0; c < dk; ++c) out(b * Lq + i, h * dk + c) += p * V(b * Lk + j, h * dk + c);
                }
            }
    if (weights) *weights = *P;

    const std::size_t iq = q.id, ik = k.id, iv = v.id;
    return g.record(std::move(out), {iq, ik, iv},
                    [=](Graph& gr, std::size_t self) {
                        const Tensor& Q = gr.value(iq);
                        const Tensor& K = gr.value(ik);
                        const Tensor& V = gr.value(iv);
                        const Tensor& dO = gr.grad(self);
                        const bool wq = gr.requires_grad(iq), wk = gr.requires_grad(ik), wv = gr.requires_grad(iv);
                        std::vector<double> dP(Lk), dS(Lk);
                        for (std::size_t b = 0; b < batch; ++b)
                            for (std::size_t h = 0; h < n_heads; ++h)
                                for (std::size_t i = 0; i < Lq; ++i) {
                                    const std::size_t prow = (b * n_heads + h) * Lq + i;
                                    const std::size_t visible = causal ? i + 1 : Lk;
                                    double dot = 0;
                                    for (std::size_t j = 0; j < visible; ++j) {
                                        double s = 0;
                                        for (std::size_t c = 0; c < dk; ++c)
                                            s += dO(b * Lq + i, h * dk + c) * V(b * Lk + j, h * dk + c);
                                        dP[j] = s;
                                        dot += s * (*P)(prow, j);
                                    }
                                    for (std::size_t j = 0; j < visible; ++j)
                                        dS[j] = (*P)(prow, j) * (dP[j] - dot) * inv_scale;
                                    for (std::size_t j = 0; j < visible; ++j) {
                                        const double p = (*P)(prow, j);
                                        for (std::size_t c = 0; c < dk; ++c) {
                                            const std::size_t qc = h * dk + c;
                                            if (wv) gr.grad(iv)(b * Lk + j, qc) += p * dO(b * Lq + i, qc);
                                            if (wq) gr.grad(iq)(b * Lq + i, qc) += dS[j] * K(b * Lk + j, qc);
                                            if (wk) gr.grad(ik)(b * Lk + j, qc) += dS[j] * Q(b * Lq + i, qc);
                                        }
                                    }
                                }
                    });
}

} // namespace sentlab::nn
