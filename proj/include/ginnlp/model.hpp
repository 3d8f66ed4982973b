#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ginnlp/errors.hpp"
#include "ginnlp/matrix.hpp"
#include "ginnlp/rng.hpp"

namespace ginnlp {

inline constexpr double kInitSigma = 0.1;
inline constexpr double kLogClamp = 700.0;  // keeps exp() inside double range

// Counts how often a block's log-sum had to be clamped before
// exponentiation. Transient extreme exponents occur mid-training, so this
// is a diagnostic, not an error.
inline std::atomic<std::uint64_t>& clamp_event_count() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}

// One power term: exponents w over the d input features, output
// exp(sum_i w_i * log(x_i)) = prod_i x_i^{w_i}.
struct PowerTermBlock {
    std::vector<double> exponents;
};

// Per-task linear readout over block outputs.
struct TaskHead {
    std::vector<double> coefficients;  // one per block
    double bias = 0.0;
};

// Per-row block outputs p_k, kept as an explicit type so training can reuse
// them between the forward pass and the gradient accumulation.
struct BlockActivations {
    std::vector<double> values;
};

struct Model {
    std::vector<PowerTermBlock> blocks;
    std::vector<TaskHead> heads;
    std::size_t input_dim = 0;

    std::size_t n_blocks() const { return blocks.size(); }
    std::size_t n_tasks() const { return heads.size(); }

    void validate() const {
        if (heads.empty()) throw ShapeMismatch("model needs at least one task head");
        for (const auto& b : blocks)
            if (b.exponents.size() != input_dim)
                throw ShapeMismatch("block exponent length != input_dim");
        for (const auto& h : heads)
            if (h.coefficients.size() != blocks.size())
                throw ShapeMismatch("head coefficient count != number of blocks");
    }
};

namespace detail {

inline void check_positive_input(std::span<const double> x, std::size_t expected_dim) {
    if (x.size() != expected_dim)
        throw ShapeMismatch("input dimension " + std::to_string(x.size()) +
                            " != model input_dim " + std::to_string(expected_dim));
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] > 0.0)) throw NonPositiveInput(i, x[i]);
}

}  // namespace detail

// Normative log-sum-exp path: exp(sum w_i log x_i).
inline double forward_block(const PowerTermBlock& block, std::span<const double> x) {
    detail::check_positive_input(x, block.exponents.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += block.exponents[i] * std::log(x[i]);
    if (s > kLogClamp) {
        s = kLogClamp;
        clamp_event_count()++;
    } else if (s < -kLogClamp) {
        s = -kLogClamp;
        clamp_event_count()++;
    }
    return std::exp(s);
}

inline BlockActivations block_activations(const Model& model, std::span<const double> x) {
    detail::check_positive_input(x, model.input_dim);
    BlockActivations acts;
    acts.values.reserve(model.n_blocks());
    for (const auto& b : model.blocks) acts.values.push_back(forward_block(b, x));
    return acts;
}

// y_t = b_t + sum_k w_{t,k} p_k, identity activation.
inline std::vector<double> forward(const Model& model, std::span<const double> x) {
    const BlockActivations acts = block_activations(model, x);
    std::vector<double> out(model.n_tasks());
    for (std::size_t t = 0; t < model.n_tasks(); ++t) {
        double y = model.heads[t].bias;
        for (std::size_t k = 0; k < model.n_blocks(); ++k)
            y += model.heads[t].coefficients[k] * acts.values[k];
        out[t] = y;
    }
    return out;
}

// Row-by-row evaluation with a fixed left-to-right summation order so runs
// are bit-reproducible.
inline Matrix forward_batch(const Model& model, const Matrix& X) {
    Matrix out(X.rows(), model.n_tasks());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const std::vector<double> y =
            forward(model, std::span<const double>(X.row_ptr(i), X.cols()));
        for (std::size_t t = 0; t < y.size(); ++t) out(i, t) = y[t];
    }
    return out;
}

inline PowerTermBlock make_block(std::size_t d, Rng& rng) {
    PowerTermBlock b;
    b.exponents.resize(d);
    for (std::size_t i = 0; i < d; ++i) b.exponents[i] = rng.normal(0.0, kInitSigma);
    return b;
}

// Blocks and head coefficients start near zero (N(0, 0.1^2)) so early block
// outputs stay near 1; biases start at zero.
inline Model init_model(std::size_t d, std::size_t n_tasks, std::size_t k_init, Rng& rng) {
    if (d < 1 || n_tasks < 1 || k_init < 1)
        throw ShapeMismatch("init_model requires d, M, k_init >= 1");
    Model m;
    m.input_dim = d;
    for (std::size_t k = 0; k < k_init; ++k) m.blocks.push_back(make_block(d, rng));
    m.heads.resize(n_tasks);
    for (auto& head : m.heads) {
        head.coefficients.resize(k_init);
        for (auto& c : head.coefficients) c = rng.normal(0.0, kInitSigma);
        head.bias = 0.0;
    }
    return m;
}

inline Model init_model(std::size_t d, std::size_t n_tasks, std::size_t k_init,
                        std::uint64_t seed) {
    Rng rng(seed);
    return init_model(d, n_tasks, k_init, rng);
}

// --- checkpoint serialization -------------------------------------------

inline void to_json(nlohmann::json& j, const Model& m) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : m.blocks) blocks.push_back(b.exponents);
    nlohmann::json heads = nlohmann::json::array();
    for (const auto& h : m.heads)
        heads.push_back({{"coeffs", h.coefficients}, {"bias", h.bias}});
    j = {{"input_dim", m.input_dim}, {"blocks", blocks}, {"heads", heads}};
}

inline void from_json(const nlohmann::json& j, Model& m) {
    m.input_dim = j.at("input_dim").get<std::size_t>();
    m.blocks.clear();
    for (const auto& b : j.at("blocks"))
        m.blocks.push_back(PowerTermBlock{b.get<std::vector<double>>()});
    m.heads.clear();
    for (const auto& h : j.at("heads")) {
        TaskHead head;
        head.coefficients = h.at("coeffs").get<std::vector<double>>();
        head.bias = h.at("bias").get<double>();
        m.heads.push_back(std::move(head));
    }
    m.validate();
}

inline void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot open for writing: " + path);
    out << nlohmann::json(m).dump(2) << '\n';
}

inline Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact(path);
    nlohmann::json j;
    in >> j;
    return j.get<Model>();
}

}  // namespace ginnlp
