#pragma once

#include <cmath>
#include <vector>

#include "ginnlp/dataset.hpp"
#include "ginnlp/errors.hpp"
#include "ginnlp/matrix.hpp"

namespace ginnlp {

struct LinearModel {
    Matrix weights;                   // d x M
    std::vector<double> intercepts;   // M
};

namespace detail {

// Cholesky solve of the SPD system A X = B, A overwritten. d <= tens here,
// so a dense factorization is plenty.
inline Matrix cholesky_solve(Matrix A, Matrix B) {
    const std::size_t n = A.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double diag = A(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= A(j, k) * A(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag)) throw SingularSystem();
        const double l = std::sqrt(diag);
        A(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = A(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= A(i, k) * A(j, k);
            A(i, j) = v / l;
        }
    }
    // forward then backward substitution per right-hand side
    Matrix X(n, B.cols());
    for (std::size_t c = 0; c < B.cols(); ++c) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = B(i, c);
            for (std::size_t k = 0; k < i; ++k) v -= A(i, k) * y[k];
            y[i] = v / A(i, i);
        }
        for (std::size_t ii = n; ii > 0; --ii) {
            const std::size_t i = ii - 1;
            double v = y[i];
            for (std::size_t k = i + 1; k < n; ++k) v -= A(k, i) * X(k, c);
            X(i, c) = v / A(i, i);
        }
    }
    return X;
}

}  // namespace detail

// Normal equations on centered data: (Xc'Xc + ridge I) W = Xc'Yc. The tiny
// default ridge exists purely for conditioning.
inline LinearModel fit_linear(const Dataset& train, double ridge = 1e-8) {
    train.validate();
    if (ridge < 0.0) throw ConfigError("ridge", "must be >= 0");
    const std::size_t n = train.n_rows();
    const std::size_t d = train.n_features();
    const std::size_t m = train.n_targets();

    std::vector<double> mean_x(d, 0.0), mean_y(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean_x[j] += train.features(i, j);
        for (std::size_t t = 0; t < m; ++t) mean_y[t] += train.targets(i, t);
    }
    for (double& v : mean_x) v /= static_cast<double>(n);
    for (double& v : mean_y) v /= static_cast<double>(n);

    Matrix xtx(d, d), xty(d, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            const double xa = train.features(i, a) - mean_x[a];
            for (std::size_t b = 0; b < d; ++b)
                xtx(a, b) += xa * (train.features(i, b) - mean_x[b]);
            for (std::size_t t = 0; t < m; ++t)
                xty(a, t) += xa * (train.targets(i, t) - mean_y[t]);
        }
    }
    for (std::size_t a = 0; a < d; ++a) xtx(a, a) += ridge;

    LinearModel model;
    model.weights = detail::cholesky_solve(xtx, xty);
    model.intercepts.resize(m);
    for (std::size_t t = 0; t < m; ++t) {
        double b = mean_y[t];
        for (std::size_t j = 0; j < d; ++j) b -= mean_x[j] * model.weights(j, t);
        model.intercepts[t] = b;
    }
    return model;
}

inline Matrix predict_linear(const LinearModel& model, const Matrix& X) {
    if (X.cols() != model.weights.rows())
        throw ShapeMismatch("input width != linear model dimension");
    Matrix out(X.rows(), model.weights.cols());
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t t = 0; t < model.weights.cols(); ++t) {
            double y = model.intercepts[t];
            for (std::size_t j = 0; j < X.cols(); ++j)
                y += X(i, j) * model.weights(j, t);
            out(i, t) = y;
        }
    return out;
}

}  // namespace ginnlp
