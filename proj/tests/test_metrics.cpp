#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ginnlp/metrics.hpp"
#include "ginnlp/rng.hpp"
#include "support/oracles.hpp"

using namespace ginnlp;

TEST_CASE("mae hand values") {
    CHECK(mae(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
    CHECK(mae(std::vector<double>{1, 3}, std::vector<double>{2, 1}) == Catch::Approx(1.5));
    CHECK(mae(std::vector<double>{10}, std::vector<double>{7}) == Catch::Approx(3.0));
}

TEST_CASE("mape hand values and the zero guard") {
    {
        auto [v, excluded] = mape(std::vector<double>{2}, std::vector<double>{1});
        CHECK(v == Catch::Approx(50.0));
        CHECK(excluded == 0);
    }
    {
        auto [v, excluded] =
            mape(std::vector<double>{1e-12, 2}, std::vector<double>{5, 2}, 1e-8);
        CHECK(v == Catch::Approx(0.0));
        CHECK(excluded == 1);
    }
    {
        auto [v, excluded] = mape(std::vector<double>{4, -3}, std::vector<double>{4, -3});
        CHECK(v == 0.0);
        CHECK(excluded == 0);
    }
    CHECK_THROWS_AS(mape(std::vector<double>{0.0}, std::vector<double>{1.0}, 1e-8),
                    AllExcluded);
}

TEST_CASE("rmse hand values") {
    CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) ==
          Catch::Approx(std::sqrt(12.5)));
    CHECK(rmse(std::vector<double>{1, 2, 3}, std::vector<double>{3, 4, 5}) ==
          Catch::Approx(2.0));
    CHECK(rmse(std::vector<double>{5}, std::vector<double>{5}) == 0.0);
}

TEST_CASE("metric error paths") {
    CHECK_THROWS_AS(mae(std::vector<double>{1}, std::vector<double>{1, 2}),
                    LengthMismatch);
    CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), EmptyInput);
    CHECK_THROWS_AS(rmse(std::vector<double>{1}, std::vector<double>{}), LengthMismatch);
}

TEST_CASE("report aggregates per-target metrics") {
    SECTION("single target averages are the target metrics") {
        const Matrix Y = Matrix::from_rows({{1.0}, {2.0}});
        const Matrix Yh = Matrix::from_rows({{2.0}, {4.0}});
        const MetricsReport r = report(Y, Yh);
        CHECK(r.avg_mae == r.mae_per_target[0]);
        CHECK(r.avg_rmse == r.rmse_per_target[0]);
    }
    SECTION("avg is the arithmetic mean across targets") {
        // build two targets with known MAE 0.40 and 1.02
        const std::size_t n = 10;
        Matrix Y(n, 2), Yh(n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            Y(i, 0) = 10.0;
            Yh(i, 0) = 10.0 + 0.40;
            Y(i, 1) = 20.0;
            Yh(i, 1) = 20.0 - 1.02;
        }
        const MetricsReport r = report(Y, Yh);
        CHECK(r.mae_per_target[0] == Catch::Approx(0.40));
        CHECK(r.mae_per_target[1] == Catch::Approx(1.02));
        CHECK(r.avg_mae == Catch::Approx(0.71));
    }
    SECTION("row permutation leaves the report unchanged") {
        Rng rng(5);
        const std::size_t n = 40;
        Matrix Y(n, 2), Yh(n, 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t < 2; ++t) {
                Y(i, t) = rng.uniform(1.0, 9.0);
                Yh(i, t) = rng.uniform(1.0, 9.0);
            }
        const MetricsReport a = report(Y, Yh);
        const auto perm = Rng(8).permutation(n);
        Matrix Yp(n, 2), Yhp(n, 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t < 2; ++t) {
                Yp(i, t) = Y(perm[i], t);
                Yhp(i, t) = Yh(perm[i], t);
            }
        const MetricsReport b = report(Yp, Yhp);
        CHECK(a.avg_mae == Catch::Approx(b.avg_mae).epsilon(1e-12));
        CHECK(a.avg_mape == Catch::Approx(b.avg_mape).epsilon(1e-12));
        CHECK(a.avg_rmse == Catch::Approx(b.avg_rmse).epsilon(1e-12));
    }
    SECTION("shape mismatch") {
        CHECK_THROWS_AS(report(Matrix(2, 1), Matrix(2, 2)), ShapeMismatch);
    }
}

TEST_CASE("metrics agree with the independent reference implementations") {
    Rng rng(2025);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(30);
        std::vector<double> y(n), yh(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform(-50.0, 50.0);
            yh[i] = rng.uniform(-50.0, 50.0);
        }
        CHECK(std::abs(mae(y, yh) - oracles::mae_ref(y, yh)) < 1e-12);
        CHECK(std::abs(rmse(y, yh) - oracles::rmse_ref(y, yh)) < 1e-12);
        bool any_used = false;
        for (double v : y) any_used |= std::abs(v) > 1e-8;
        if (any_used) {
            auto [v, excluded] = mape(y, yh);
            CHECK(std::abs(v - oracles::mape_ref(y, yh)) < 1e-9);
        }
        // quadratic mean dominates the mean of absolute errors
        CHECK(rmse(y, yh) >= mae(y, yh) - 1e-12);
    }
}

TEST_CASE("translation equivariance checked against the oracle") {
    Rng rng(31);
    std::vector<double> y(25), yh(25), yh_shift(25);
    for (std::size_t i = 0; i < 25; ++i) {
        y[i] = rng.uniform(1.0, 10.0);
        yh[i] = rng.uniform(1.0, 10.0);
    }
    for (double c : {-2.0, 0.5, 3.0}) {
        for (std::size_t i = 0; i < 25; ++i) yh_shift[i] = yh[i] + c;
        CHECK(mae(y, yh_shift) == Catch::Approx(oracles::mae_ref(y, yh_shift)).margin(1e-12));
        CHECK(rmse(y, yh_shift) ==
              Catch::Approx(oracles::rmse_ref(y, yh_shift)).margin(1e-12));
    }
}

TEST_CASE("csv row layout matches the table column order") {
    CHECK(metrics_csv_header(2) ==
          "label,mae_y1,mae_y2,avg_mae,mape_y1,mape_y2,avg_mape,rmse_y1,rmse_y2,avg_rmse");
    MetricsReport r;
    r.mae_per_target = {1.0, 2.0};
    r.mape_per_target = {3.0, 4.0};
    r.rmse_per_target = {5.0, 6.0};
    r.avg_mae = 1.5;
    r.avg_mape = 3.5;
    r.avg_rmse = 5.5;
    CHECK(metrics_csv_row("model", r) == "model,1,2,1.5,3,4,3.5,5,6,5.5");
}
