#pragma once

#include <cstdint>

#include "ginnlp/errors.hpp"

namespace ginnlp {

struct TrainConfig {
    int epochs = 2000;
    double learning_rate = 0.1;
    std::size_t k_init = 1;
    std::size_t k_max = 8;
    int grow_interval = 500;
    double lambda_sym = 1e-2;
    double lambda_l1 = 1e-4;
    double lambda_l2 = 1e-4;
    std::uint64_t seed = 42;
    double precision = 0.01;        // exponent rounding grid for the symbolic branch
    double prune_threshold = 1e-3;  // relative to the largest |coefficient| per head
    int patience = 200;
    bool enable_symbolic_loss = true;

    void validate() const {
        if (epochs < 1) throw ConfigError("epochs", "must be >= 1");
        if (!(learning_rate > 0.0)) throw ConfigError("learning_rate", "must be > 0");
        if (k_init < 1) throw ConfigError("k_init", "must be >= 1");
        if (k_max < k_init) throw ConfigError("k_max", "must be >= k_init");
        if (grow_interval < 1) throw ConfigError("grow_interval", "must be >= 1");
        if (lambda_sym < 0.0) throw ConfigError("lambda_sym", "must be >= 0");
        if (lambda_l1 < 0.0) throw ConfigError("lambda_l1", "must be >= 0");
        if (lambda_l2 < 0.0) throw ConfigError("lambda_l2", "must be >= 0");
        if (!(precision > 0.0)) throw ConfigError("precision", "must be > 0");
        if (prune_threshold < 0.0) throw ConfigError("prune_threshold", "must be >= 0");
        if (patience < 1) throw ConfigError("patience", "must be >= 1");
    }
};

}  // namespace ginnlp
