#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ginnlp/dataset.hpp"
#include "ginnlp/errors.hpp"
#include "ginnlp/model.hpp"
#include "ginnlp/symbolic.hpp"
#include "ginnlp/train_config.hpp"

namespace ginnlp {

struct LossBreakdown {
    double task = 0.0;
    double sym = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double total = 0.0;
};

// Mirrors the Model layout exactly.
struct GradientSet {
    std::vector<std::vector<double>> block_exponents;  // K x d
    std::vector<std::vector<double>> head_coefficients;  // M x K
    std::vector<double> biases;                          // M

    static GradientSet zeros_like(const Model& m) {
        GradientSet g;
        g.block_exponents.assign(m.n_blocks(), std::vector<double>(m.input_dim, 0.0));
        g.head_coefficients.assign(m.n_tasks(), std::vector<double>(m.n_blocks(), 0.0));
        g.biases.assign(m.n_tasks(), 0.0);
        return g;
    }

    double squared_norm() const {
        double s = 0.0;
        for (const auto& v : block_exponents)
            for (double g : v) s += g * g;
        for (const auto& v : head_coefficients)
            for (double g : v) s += g * g;
        for (double g : biases) s += g * g;
        return s;
    }

    void scale(double f) {
        for (auto& v : block_exponents)
            for (double& g : v) g *= f;
        for (auto& v : head_coefficients)
            for (double& g : v) g *= f;
        for (double& g : biases) g *= f;
    }
};

namespace detail {

inline double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

// Total loss L = L_task + lambda_sym * L_sym + lambda_l1 * L_L1
//              + lambda_l2 * L_L2, with task/sym means over samples and
// tasks and the penalties summed over block exponents and head coefficients
// (biases are not regularized). When the symbolic loss is disabled its value
// is still reported but excluded from the total and the gradients.
inline std::pair<LossBreakdown, GradientSet> backward(const Model& model,
                                                      const Dataset& batch,
                                                      const TrainConfig& config) {
    model.validate();
    if (batch.n_features() != model.input_dim)
        throw ShapeMismatch("batch width != model input_dim");
    if (batch.n_targets() != model.n_tasks())
        throw ShapeMismatch("batch target count != model task count");

    const std::size_t n = batch.n_rows();
    const std::size_t d = model.input_dim;
    const std::size_t kk = model.n_blocks();
    const std::size_t mm = model.n_tasks();
    const double inv_nm = 1.0 / (static_cast<double>(n) * static_cast<double>(mm));
    const double lam_sym = config.enable_symbolic_loss ? config.lambda_sym : 0.0;

    LossBreakdown loss;
    GradientSet grads = GradientSet::zeros_like(model);

    std::vector<double> logs(d);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const double> x(batch.features.row_ptr(i), d);
        detail::check_positive_input(x, d);
        for (std::size_t j = 0; j < d; ++j) logs[j] = std::log(x[j]);

        const BlockActivations acts = block_activations(model, x);
        const MonomialVector mono = monomial_features(model, x, config.precision);

        for (std::size_t t = 0; t < mm; ++t) {
            const TaskHead& head = model.heads[t];
            double yhat = head.bias;
            double ysym = head.bias;
            for (std::size_t k = 0; k < kk; ++k) {
                yhat += head.coefficients[k] * acts.values[k];
                ysym += head.coefficients[k] * mono.values[k];
            }
            const double err = yhat - batch.targets(i, t);
            const double err_sym = ysym - batch.targets(i, t);
            loss.task += err * err * inv_nm;
            loss.sym += err_sym * err_sym * inv_nm;

            const double dyhat = 2.0 * err * inv_nm;
            const double dysym = 2.0 * err_sym * inv_nm * lam_sym;
            grads.biases[t] += dyhat + dysym;
            for (std::size_t k = 0; k < kk; ++k) {
                grads.head_coefficients[t][k] +=
                    dyhat * acts.values[k] + dysym * mono.values[k];
                // dp/dw_i = p * log(x_i); the symbolic branch uses the same
                // form with m in place of p (straight-through rounding)
                const double gblock = (dyhat * acts.values[k] + dysym * mono.values[k]) *
                                      head.coefficients[k];
                if (gblock != 0.0) {
                    for (std::size_t j = 0; j < d; ++j)
                        grads.block_exponents[k][j] += gblock * logs[j];
                }
            }
        }
    }

    for (std::size_t k = 0; k < kk; ++k)
        for (std::size_t j = 0; j < d; ++j) {
            const double w = model.blocks[k].exponents[j];
            loss.l1 += std::abs(w);
            loss.l2 += w * w;
            grads.block_exponents[k][j] +=
                config.lambda_l1 * detail::sign0(w) + 2.0 * config.lambda_l2 * w;
        }
    for (std::size_t t = 0; t < mm; ++t)
        for (std::size_t k = 0; k < kk; ++k) {
            const double c = model.heads[t].coefficients[k];
            loss.l1 += std::abs(c);
            loss.l2 += c * c;
            grads.head_coefficients[t][k] +=
                config.lambda_l1 * detail::sign0(c) + 2.0 * config.lambda_l2 * c;
        }

    loss.total = loss.task + lam_sym * loss.sym + config.lambda_l1 * loss.l1 +
                 config.lambda_l2 * loss.l2;
    return {loss, grads};
}

inline double total_loss(const Model& model, const Dataset& batch,
                         const TrainConfig& config) {
    return backward(model, batch, config).first.total;
}

// Central finite differences of the total loss over every parameter.
// Coordinates within 10h of the L1 kink (|theta| < 10h, lambda_l1 > 0) are
// excluded because the subgradient there is a convention, not a derivative.
inline double finite_difference_check(const Model& model, const Dataset& batch,
                                      const TrainConfig& config, double h = 1e-5) {
    if (!(h >= 1e-7 && h <= 1e-3)) throw ConfigError("h", "must be in [1e-7, 1e-3]");
    auto [loss, grads] = backward(model, batch, config);
    (void)loss;

    Model probe = model;
    double max_rel = 0.0;
    auto check_coord = [&](double* theta, double analytic, bool regularized) {
        if (regularized && config.lambda_l1 > 0.0 && std::abs(*theta) < 10.0 * h) return;
        const double saved = *theta;
        *theta = saved + h;
        const double up = total_loss(probe, batch, config);
        *theta = saved - h;
        const double down = total_loss(probe, batch, config);
        *theta = saved;
        const double fd = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-3});
        max_rel = std::max(max_rel, std::abs(fd - analytic) / denom);
    };

    for (std::size_t k = 0; k < model.n_blocks(); ++k)
        for (std::size_t j = 0; j < model.input_dim; ++j)
            check_coord(&probe.blocks[k].exponents[j], grads.block_exponents[k][j], true);
    for (std::size_t t = 0; t < model.n_tasks(); ++t) {
        for (std::size_t k = 0; k < model.n_blocks(); ++k)
            check_coord(&probe.heads[t].coefficients[k], grads.head_coefficients[t][k],
                        true);
        check_coord(&probe.heads[t].bias, grads.biases[t], false);
    }
    return max_rel;
}

}  // namespace ginnlp
