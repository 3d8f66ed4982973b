#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "ginnlp/model.hpp"
#include "support/oracles.hpp"

using namespace ginnlp;

namespace {

Model hand_model(std::vector<std::vector<double>> exponents,
                 std::vector<std::vector<double>> coeffs, std::vector<double> biases) {
    Model m;
    m.input_dim = exponents.front().size();
    for (auto& e : exponents) m.blocks.push_back({std::move(e)});
    for (std::size_t t = 0; t < coeffs.size(); ++t)
        m.heads.push_back({coeffs[t], biases[t]});
    m.validate();
    return m;
}

}  // namespace

TEST_CASE("forward_block hand values") {
    CHECK(forward_block({{0.0, 0.0, 0.0}}, std::vector<double>{2.0, 5.0, 0.1}) == 1.0);
    CHECK(forward_block({{2.0, -1.0}}, std::vector<double>{3.0, 2.0}) ==
          Catch::Approx(4.5).epsilon(1e-12));
    CHECK(forward_block({{0.5}}, std::vector<double>{4.0}) ==
          Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("forward_block rejects bad input before arithmetic") {
    CHECK_THROWS_AS(forward_block({{1.0, 1.0}}, std::vector<double>{1.0, 0.0}),
                    NonPositiveInput);
    CHECK_THROWS_AS(forward_block({{1.0, 1.0}}, std::vector<double>{1.0, -3.0}),
                    NonPositiveInput);
    CHECK_THROWS_AS(forward_block({{1.0, 1.0}}, std::vector<double>{1.0}),
                    ShapeMismatch);
}

TEST_CASE("forward hand values") {
    SECTION("single block") {
        const Model m = hand_model({{1.0, 1.0}}, {{2.0}}, {1.0});
        const auto y = forward(m, std::vector<double>{2.0, 3.0});
        REQUIRE(y.size() == 1);
        CHECK(y[0] == Catch::Approx(13.0).epsilon(1e-12));
    }
    SECTION("zero coefficients leave only the bias") {
        const Model m = hand_model({{1.0, 2.0}, {0.5, -1.0}}, {{0.0, 0.0}, {0.0, 0.0}},
                                   {4.0, -2.5});
        for (double x1 : {0.3, 1.0, 7.0}) {
            const auto y = forward(m, std::vector<double>{x1, 2.0});
            CHECK(y[0] == 4.0);
            CHECK(y[1] == -2.5);
        }
    }
    SECTION("additive identity blocks") {
        const Model m = hand_model({{1.0, 0.0}, {0.0, 1.0}}, {{1.0, 1.0}}, {0.0});
        const auto y = forward(m, std::vector<double>{3.25, 0.75});
        CHECK(y[0] == Catch::Approx(4.0).epsilon(1e-12));
    }
}

TEST_CASE("forward_batch matches forward row-wise and is row independent") {
    Rng rng(5);
    const Model m = init_model(4, 2, 3, rng);
    Matrix X(6, 4);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j) X(i, j) = rng.uniform(0.2, 4.0);

    const Matrix out = forward_batch(m, X);
    for (std::size_t i = 0; i < 6; ++i) {
        const auto yi = forward(m, std::vector<double>(X.row_ptr(i), X.row_ptr(i) + 4));
        for (std::size_t t = 0; t < 2; ++t) CHECK(out(i, t) == yi[t]);
    }

    // permuting rows permutes outputs identically
    Matrix Xr(6, 4);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j) Xr(i, j) = X(5 - i, j);
    const Matrix outr = forward_batch(m, Xr);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t t = 0; t < 2; ++t) CHECK(outr(i, t) == out(5 - i, t));
}

TEST_CASE("init_model is deterministic and shaped correctly") {
    const Model a = init_model(3, 2, 1, std::uint64_t{0});
    const Model b = init_model(3, 2, 1, std::uint64_t{0});
    REQUIRE(a.blocks.size() == 1);
    CHECK(a.blocks[0].exponents == b.blocks[0].exponents);
    for (std::size_t t = 0; t < 2; ++t) {
        CHECK(a.heads[t].coefficients == b.heads[t].coefficients);
        CHECK(a.heads[t].bias == 0.0);
    }

    const Model c = init_model(5, 3, 3, std::uint64_t{11});
    for (const auto& head : c.heads) REQUIRE(head.coefficients.size() == 3);
}

TEST_CASE("initializer statistics over 1e5 draws") {
    Rng rng(2024);
    const std::size_t n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Model m = init_model(1, 1, 1, rng);
        const double w = m.blocks[0].exponents[0];
        sum += w;
        sumsq += w * w;
    }
    const double mean = sum / n;
    const double sigma = std::sqrt(sumsq / n - mean * mean);
    CHECK(std::abs(mean) < 0.01);
    CHECK(sigma > 0.095);
    CHECK(sigma < 0.105);
}

TEST_CASE("log path agrees with the direct power product") {
    Rng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t d = 1 + rng.below(6);
        PowerTermBlock block;
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j) {
            block.exponents.push_back(rng.uniform(-3.0, 3.0));
            x[j] = rng.uniform(0.05, 20.0);
        }
        double direct = 1.0;
        for (std::size_t j = 0; j < d; ++j) direct *= std::pow(x[j], block.exponents[j]);
        const double via_log = forward_block(block, x);
        CHECK(std::abs(via_log - direct) <= 1e-9 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("forward_block homogeneity in the input scale") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + rng.below(5);
        PowerTermBlock block;
        std::vector<double> x(d), cx(d);
        double wsum = 0.0;
        const double c = rng.uniform(0.2, 5.0);
        for (std::size_t j = 0; j < d; ++j) {
            block.exponents.push_back(rng.uniform(-2.0, 2.0));
            wsum += block.exponents[j];
            x[j] = rng.uniform(0.1, 10.0);
            cx[j] = c * x[j];
        }
        const double lhs = forward_block(block, cx);
        const double rhs = std::pow(c, wsum) * forward_block(block, x);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("extreme exponents clamp instead of overflowing") {
    clamp_event_count() = 0;
    const PowerTermBlock block{{400.0}};
    const double v = forward_block(block, std::vector<double>{100.0});
    CHECK(std::isfinite(v));
    CHECK(clamp_event_count() > 0);
}

TEST_CASE("checkpoint JSON round-trips parameters bit-exactly") {
    Rng rng(31);
    Model m = init_model(6, 2, 4, rng);
    m.heads[0].bias = 1.0 / 3.0;
    m.blocks[2].exponents[1] = 0.1 + 0.2;  // classic non-representable sum

    const auto dir = oracles::fresh_dir("model");
    const auto path = (dir / "ckpt.json").string();
    save_model(m, path);
    const Model back = load_model(path);
    REQUIRE(back.n_blocks() == m.n_blocks());
    for (std::size_t k = 0; k < m.n_blocks(); ++k)
        CHECK(back.blocks[k].exponents == m.blocks[k].exponents);
    for (std::size_t t = 0; t < m.n_tasks(); ++t) {
        CHECK(back.heads[t].coefficients == m.heads[t].coefficients);
        CHECK(back.heads[t].bias == m.heads[t].bias);
    }
    std::filesystem::remove_all(dir);
}
