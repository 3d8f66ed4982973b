#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ginnlp/baseline.hpp"
#include "ginnlp/rng.hpp"

using namespace ginnlp;

namespace {

Dataset linear_data(Rng& rng, std::size_t n, std::size_t d, std::size_t m,
                    double noise = 0.0) {
    Dataset ds;
    ds.features = Matrix(n, d);
    ds.targets = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) ds.features(i, j) = rng.uniform(-3.0, 3.0);
        for (std::size_t t = 0; t < m; ++t) {
            double y = 1.0 + static_cast<double>(t);
            for (std::size_t j = 0; j < d; ++j)
                y += (static_cast<double>(j) + 1.0) * ds.features(i, j);
            ds.targets(i, t) = y + noise * rng.normal();
        }
    }
    for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("x" + std::to_string(j));
    for (std::size_t t = 0; t < m; ++t) ds.target_names.push_back("y" + std::to_string(t));
    return ds;
}

double train_mse(const LinearModel& model, const Dataset& ds) {
    const Matrix pred = predict_linear(model, ds.features);
    double s = 0.0;
    for (std::size_t i = 0; i < ds.n_rows(); ++i)
        for (std::size_t t = 0; t < ds.n_targets(); ++t) {
            const double e = pred(i, t) - ds.targets(i, t);
            s += e * e;
        }
    return s / static_cast<double>(ds.n_rows() * ds.n_targets());
}

}  // namespace

TEST_CASE("exact recovery of noiseless linear data") {
    Rng rng(17);
    Dataset ds;
    ds.features = Matrix(20, 1);
    ds.targets = Matrix(20, 1);
    for (std::size_t i = 0; i < 20; ++i) {
        ds.features(i, 0) = rng.uniform(-5.0, 5.0);
        ds.targets(i, 0) = 2.0 * ds.features(i, 0) + 1.0;
    }
    ds.feature_names = {"x"};
    ds.target_names = {"y"};
    const LinearModel m = fit_linear(ds);
    CHECK(m.weights(0, 0) == Catch::Approx(2.0).margin(1e-9));
    CHECK(m.intercepts[0] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("constant target gives zero weights and the mean as intercept") {
    Rng rng(18);
    Dataset ds;
    ds.features = Matrix(15, 3);
    ds.targets = Matrix(15, 1);
    for (std::size_t i = 0; i < 15; ++i) {
        for (std::size_t j = 0; j < 3; ++j) ds.features(i, j) = rng.uniform(-2.0, 2.0);
        ds.targets(i, 0) = 7.25;
    }
    ds.feature_names = {"a", "b", "c"};
    ds.target_names = {"y"};
    const LinearModel m = fit_linear(ds);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(std::abs(m.weights(j, 0)) < 1e-9);
    CHECK(m.intercepts[0] == Catch::Approx(7.25).margin(1e-9));
}

TEST_CASE("training residuals are orthogonal to every feature") {
    Rng rng(19);
    const Dataset ds = linear_data(rng, 60, 4, 2, 0.5);
    const LinearModel m = fit_linear(ds, 0.0);
    const Matrix pred = predict_linear(m, ds.features);
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t j = 0; j < 4; ++j) {
            double dot = 0.0;
            double mean_x = 0.0;
            for (std::size_t i = 0; i < ds.n_rows(); ++i) mean_x += ds.features(i, j);
            mean_x /= static_cast<double>(ds.n_rows());
            for (std::size_t i = 0; i < ds.n_rows(); ++i)
                dot += (ds.features(i, j) - mean_x) * (ds.targets(i, t) - pred(i, t));
            CHECK(std::abs(dot) / static_cast<double>(ds.n_rows()) < 1e-6);
        }
}

TEST_CASE("predict_linear basics") {
    LinearModel m;
    m.weights = Matrix(2, 1);
    m.intercepts = {3.0};
    SECTION("zero weights give constant rows") {
        const Matrix pred = predict_linear(m, Matrix(4, 2, 1.5));
        for (std::size_t i = 0; i < 4; ++i) CHECK(pred(i, 0) == 3.0);
    }
    SECTION("shape mismatch") {
        CHECK_THROWS_AS(predict_linear(m, Matrix(4, 3, 1.0)), ShapeMismatch);
    }
    SECTION("affine identity") {
        m.weights(0, 0) = 2.0;
        m.weights(1, 0) = -1.0;
        Matrix x1(1, 2), x2(1, 2), sum(1, 2);
        x1(0, 0) = 1.0; x1(0, 1) = 4.0;
        x2(0, 0) = -2.0; x2(0, 1) = 0.5;
        sum(0, 0) = x1(0, 0) + x2(0, 0);
        sum(0, 1) = x1(0, 1) + x2(0, 1);
        const double lhs = predict_linear(m, sum)(0, 0);
        const double rhs =
            predict_linear(m, x1)(0, 0) + predict_linear(m, x2)(0, 0) - m.intercepts[0];
        CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
    }
}

TEST_CASE("fitted model beats 100 random linear alternatives on training MSE") {
    Rng rng(23);
    const Dataset ds = linear_data(rng, 80, 3, 2, 1.0);
    const LinearModel fitted = fit_linear(ds);
    const double fitted_mse = train_mse(fitted, ds);
    for (int trial = 0; trial < 100; ++trial) {
        LinearModel alt = fitted;
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t t = 0; t < 2; ++t)
                alt.weights(j, t) += rng.uniform(-1.0, 1.0);
        for (double& b : alt.intercepts) b += rng.uniform(-1.0, 1.0);
        CHECK(train_mse(alt, ds) >= fitted_mse - 1e-9);
    }
}

TEST_CASE("fit is deterministic") {
    Rng rng(29);
    const Dataset ds = linear_data(rng, 50, 4, 2, 0.3);
    const LinearModel a = fit_linear(ds);
    const LinearModel b = fit_linear(ds);
    CHECK(a.weights == b.weights);
    CHECK(a.intercepts == b.intercepts);
}

TEST_CASE("duplicated column without ridge is singular") {
    Dataset ds;
    ds.features = Matrix(10, 2);
    ds.targets = Matrix(10, 1);
    Rng rng(3);
    for (std::size_t i = 0; i < 10; ++i) {
        ds.features(i, 0) = rng.uniform(-1.0, 1.0);
        ds.features(i, 1) = ds.features(i, 0);  // exact duplicate
        ds.targets(i, 0) = rng.uniform(-1.0, 1.0);
    }
    ds.feature_names = {"a", "b"};
    ds.target_names = {"y"};
    CHECK_THROWS_AS(fit_linear(ds, 0.0), SingularSystem);
    CHECK_NOTHROW(fit_linear(ds, 1e-8));
}
