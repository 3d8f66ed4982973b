#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ginnlp/dataset.hpp"
#include "ginnlp/differentiation.hpp"
#include "ginnlp/errors.hpp"
#include "ginnlp/model.hpp"
#include "ginnlp/rng.hpp"
#include "ginnlp/train_config.hpp"

namespace ginnlp {

struct GrowthEvent {
    int epoch = 0;        // growth applies at the end of this epoch
    std::size_t blocks_added = 0;
};

// Growth events at epochs G, 2G, ... < E. The k_max - k_init new blocks are
// split as evenly as possible, remainders going to the earliest events.
inline std::vector<GrowthEvent> growth_schedule(std::size_t k_init, std::size_t k_max,
                                                int epochs, int grow_interval) {
    if (k_init < 1 || k_max < k_init) throw ConfigError("k_init", "need 1 <= k_init <= k_max");
    if (grow_interval < 1) throw ConfigError("grow_interval", "must be >= 1");
    const std::size_t total = k_max - k_init;
    if (total == 0) return {};

    std::vector<int> epochs_at;
    for (int e = grow_interval; e < epochs; e += grow_interval) epochs_at.push_back(e);
    if (epochs_at.empty()) throw NoGrowthWindow();

    const std::size_t n_events = epochs_at.size();
    const std::size_t base = total / n_events;
    const std::size_t rem = total % n_events;
    std::vector<GrowthEvent> out;
    for (std::size_t i = 0; i < n_events; ++i) {
        const std::size_t add = base + (i < rem ? 1 : 0);
        if (add > 0) out.push_back({epochs_at[i], add});
    }
    return out;
}

// Appends freshly initialized blocks; every head gains zero coefficients so
// predictions are unchanged at the growth instant, and all pre-existing
// parameters stay bit-identical.
inline void grow(Model& model, std::size_t n_new, Rng& rng) {
    if (n_new < 1) throw ConfigError("n_new", "must be >= 1");
    for (std::size_t k = 0; k < n_new; ++k)
        model.blocks.push_back(make_block(model.input_dim, rng));
    for (auto& head : model.heads)
        head.coefficients.resize(head.coefficients.size() + n_new, 0.0);
}

enum class StoppingReason { completed, early_stopped, max_size_reached_then_completed };

inline std::string to_string(StoppingReason r) {
    switch (r) {
        case StoppingReason::completed: return "completed";
        case StoppingReason::early_stopped: return "early_stopped";
        case StoppingReason::max_size_reached_then_completed:
            return "max_size_reached_then_completed";
    }
    return "unknown";
}

struct EpochLog {
    int epoch = 0;
    LossBreakdown loss;   // computed at the top of the epoch
    double val_loss = 0;  // held-out task loss after the update
    std::size_t k = 0;    // block count during the epoch
};

struct TrainReport {
    std::vector<EpochLog> history;
    std::vector<GrowthEvent> growth_events;
    Model final_model;
    StoppingReason reason = StoppingReason::completed;
    int epochs_run = 0;
    double final_train_task_loss = 0.0;
    double final_val_task_loss = 0.0;
};

enum class TrainEvent { before_growth, after_growth, finished };
using TrainCallback = std::function<void(TrainEvent, int epoch, const Model&)>;

namespace detail {

struct AdamState {
    GradientSet m, v;
    int t = 0;

    explicit AdamState(const Model& model)
        : m(GradientSet::zeros_like(model)), v(GradientSet::zeros_like(model)) {}

    void grow_like(const Model& model) {
        auto grow_set = [&](GradientSet& g) {
            g.block_exponents.resize(model.n_blocks(),
                                     std::vector<double>(model.input_dim, 0.0));
            for (std::size_t t2 = 0; t2 < g.head_coefficients.size(); ++t2)
                g.head_coefficients[t2].resize(model.n_blocks(), 0.0);
        };
        grow_set(m);
        grow_set(v);
    }

    void update(Model& model, const GradientSet& g, double lr) {
        static constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        ++t;
        const double corr1 = 1.0 - std::pow(b1, t);
        const double corr2 = 1.0 - std::pow(b2, t);
        auto step = [&](double& theta, double& mm, double& vv, double grad) {
            mm = b1 * mm + (1.0 - b1) * grad;
            vv = b2 * vv + (1.0 - b2) * grad * grad;
            theta -= lr * (mm / corr1) / (std::sqrt(vv / corr2) + eps);
        };
        for (std::size_t k = 0; k < model.n_blocks(); ++k)
            for (std::size_t j = 0; j < model.input_dim; ++j)
                step(model.blocks[k].exponents[j], m.block_exponents[k][j],
                     v.block_exponents[k][j], g.block_exponents[k][j]);
        for (std::size_t t2 = 0; t2 < model.n_tasks(); ++t2) {
            for (std::size_t k = 0; k < model.n_blocks(); ++k)
                step(model.heads[t2].coefficients[k], m.head_coefficients[t2][k],
                     v.head_coefficients[t2][k], g.head_coefficients[t2][k]);
            step(model.heads[t2].bias, m.biases[t2], v.biases[t2], g.biases[t2]);
        }
    }
};

inline double task_mse(const Model& model, const Dataset& data) {
    const Matrix pred = forward_batch(model, data.features);
    double s = 0.0;
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        for (std::size_t t = 0; t < data.n_targets(); ++t) {
            const double e = pred(i, t) - data.targets(i, t);
            s += e * e;
        }
    return s / (static_cast<double>(data.n_rows()) *
                static_cast<double>(data.n_targets()));
}

}  // namespace detail

// Full-batch Adam over the total loss, with periodic growth and early
// stopping on the held-out task loss. Early stopping cannot fire before the
// final scheduled growth event, so k_max is always reached.
inline TrainReport train(const SplitDataset& data, const TrainConfig& config,
                         const TrainCallback& callback = {}) {
    config.validate();
    data.train.validate();
    data.test.validate();

    const std::vector<GrowthEvent> schedule =
        growth_schedule(config.k_init, config.k_max, config.epochs, config.grow_interval);
    int last_growth_epoch = 0;
    for (const auto& ev : schedule) last_growth_epoch = std::max(last_growth_epoch, ev.epoch);

    Rng rng(config.seed);
    Model model = init_model(data.train.n_features(), data.train.n_targets(),
                             config.k_init, rng);
    detail::AdamState adam(model);

    TrainReport report;
    report.growth_events = schedule;

    std::size_t next_event = 0;
    int non_finite_streak = 0;
    double best_val = std::numeric_limits<double>::infinity();
    int epochs_since_best = 0;
    bool early_stopped = false;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        auto [loss, grads] = backward(model, data.train, config);

        if (!std::isfinite(loss.total)) {
            if (++non_finite_streak >= 10) throw DivergenceDetected(epoch);
        } else {
            non_finite_streak = 0;
            const double norm = std::sqrt(grads.squared_norm());
            if (norm > 1.0) grads.scale(1.0 / norm);
            adam.update(model, grads, config.learning_rate);
        }

        const double val = detail::task_mse(model, data.test);
        report.history.push_back({epoch, loss, val, model.n_blocks()});
        report.epochs_run = epoch;

        if (next_event < schedule.size() && schedule[next_event].epoch == epoch) {
            if (callback) callback(TrainEvent::before_growth, epoch, model);
            grow(model, schedule[next_event].blocks_added, rng);
            adam.grow_like(model);
            ++next_event;
            if (callback) callback(TrainEvent::after_growth, epoch, model);
        }

        if (epoch > last_growth_epoch) {
            if (val < best_val) {
                best_val = val;
                epochs_since_best = 0;
            } else if (++epochs_since_best >= config.patience) {
                early_stopped = true;
                break;
            }
        }
    }

    report.final_model = model;
    report.final_train_task_loss = detail::task_mse(model, data.train);
    report.final_val_task_loss = detail::task_mse(model, data.test);
    if (early_stopped)
        report.reason = StoppingReason::early_stopped;
    else if (!schedule.empty())
        report.reason = StoppingReason::max_size_reached_then_completed;
    else
        report.reason = StoppingReason::completed;
    if (callback) callback(TrainEvent::finished, report.epochs_run, model);
    return report;
}

}  // namespace ginnlp
