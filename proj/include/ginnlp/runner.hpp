#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ginnlp/baseline.hpp"
#include "ginnlp/dataset.hpp"
#include "ginnlp/errors.hpp"
#include "ginnlp/format.hpp"
#include "ginnlp/metrics.hpp"
#include "ginnlp/model.hpp"
#include "ginnlp/symbolic.hpp"
#include "ginnlp/training.hpp"

namespace ginnlp {

namespace fs = std::filesystem;

// One JSON document fully determines a run.
struct RunConfig {
    std::string dataset_path;
    std::vector<std::string> target_columns;
    double train_fraction = 0.8;
    double epsilon_pos = 1e-6;
    bool minmax_scale = false;
    TrainConfig train;

    void validate() const {
        if (dataset_path.empty()) throw ConfigError("dataset", "required");
        if (target_columns.empty()) throw ConfigError("targets", "required");
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw ConfigError("train_fraction", "must be in (0, 1)");
        if (!(epsilon_pos > 0.0)) throw ConfigError("epsilon_pos", "must be > 0");
        train.validate();
    }
};

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = {{"dataset", c.dataset_path},
         {"targets", c.target_columns},
         {"train_fraction", c.train_fraction},
         {"epsilon_pos", c.epsilon_pos},
         {"minmax_scale", c.minmax_scale},
         {"seed", c.train.seed},
         {"epochs", c.train.epochs},
         {"learning_rate", c.train.learning_rate},
         {"k_init", c.train.k_init},
         {"k_max", c.train.k_max},
         {"grow_interval", c.train.grow_interval},
         {"lambda_sym", c.train.lambda_sym},
         {"lambda_l1", c.train.lambda_l1},
         {"lambda_l2", c.train.lambda_l2},
         {"precision", c.train.precision},
         {"prune_threshold", c.train.prune_threshold},
         {"patience", c.train.patience},
         {"enable_symbolic_loss", c.train.enable_symbolic_loss}};
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "dataset") c.dataset_path = value.get<std::string>();
            else if (key == "targets")
                c.target_columns = value.get<std::vector<std::string>>();
            else if (key == "train_fraction") c.train_fraction = value.get<double>();
            else if (key == "epsilon_pos") c.epsilon_pos = value.get<double>();
            else if (key == "minmax_scale") c.minmax_scale = value.get<bool>();
            else if (key == "seed") c.train.seed = value.get<std::uint64_t>();
            else if (key == "epochs") c.train.epochs = value.get<int>();
            else if (key == "learning_rate") c.train.learning_rate = value.get<double>();
            else if (key == "k_init") c.train.k_init = value.get<std::size_t>();
            else if (key == "k_max") c.train.k_max = value.get<std::size_t>();
            else if (key == "grow_interval") c.train.grow_interval = value.get<int>();
            else if (key == "lambda_sym") c.train.lambda_sym = value.get<double>();
            else if (key == "lambda_l1") c.train.lambda_l1 = value.get<double>();
            else if (key == "lambda_l2") c.train.lambda_l2 = value.get<double>();
            else if (key == "precision") c.train.precision = value.get<double>();
            else if (key == "prune_threshold")
                c.train.prune_threshold = value.get<double>();
            else if (key == "patience") c.train.patience = value.get<int>();
            else if (key == "enable_symbolic_loss")
                c.train.enable_symbolic_loss = value.get<bool>();
            else throw ConfigError(key, "unknown key");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(key, std::string("bad value: ") + e.what());
        }
    }
    c.validate();
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_run_config(j);
}

inline std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifact(path);
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a 64
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

struct PreparedData {
    SplitDataset split;
    ColumnTransform transform;
    std::vector<std::string> feature_names;
    std::string dataset_hash;
};

inline PreparedData prepare_data(const RunConfig& config) {
    const Dataset raw = load_csv(config.dataset_path, config.target_columns);
    const TransformedDataset shifted = config.minmax_scale
                                           ? scale_minmax(raw, config.epsilon_pos)
                                           : ensure_positive(raw, config.epsilon_pos);
    PreparedData out;
    out.split = split(shifted.data, config.train_fraction, config.train.seed);
    out.transform = shifted.transform;
    out.feature_names = raw.feature_names;
    out.dataset_hash = hash_file(config.dataset_path);
    return out;
}

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot open for writing: " + path.string());
    out << text;
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

inline nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact(path.string());
    nlohmann::json j;
    in >> j;
    return j;
}

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace detail

struct RunResult {
    fs::path run_dir;
    TrainReport report;
    std::vector<SymbolicEquation> equations;
    MetricsReport network_train, network_test, equation_train, equation_test;
};

// Executes the dataset -> train pipeline and persists every artifact.
inline RunResult cmd_train(const RunConfig& config, const fs::path& out_dir,
                           bool force = false) {
    config.validate();
    if (fs::exists(out_dir / "manifest.json") && !force)
        throw Error("RunDirExists",
                    "run directory already populated (use --force): " + out_dir.string());
    fs::create_directories(out_dir / "checkpoints");

    const PreparedData data = prepare_data(config);

    std::vector<std::pair<int, fs::path>> checkpoints;
    TrainCallback callback = [&](TrainEvent ev, int epoch, const Model& m) {
        if (ev == TrainEvent::after_growth || ev == TrainEvent::finished) {
            const fs::path p = out_dir / "checkpoints" /
                               ("epoch_" + std::to_string(epoch) + ".json");
            save_model(m, p.string());
            if (checkpoints.empty() || checkpoints.back().first != epoch)
                checkpoints.emplace_back(epoch, p);
        }
    };

    RunResult result;
    result.run_dir = out_dir;
    result.report = train(data.split, config.train, callback);

    // metrics.csv: one row per epoch
    {
        std::string csv = "epoch,task_loss,sym_loss,l1,l2,total,val_loss,K\n";
        for (const auto& e : result.report.history) {
            csv += std::to_string(e.epoch) + ',' + detail::format_double(e.loss.task) +
                   ',' + detail::format_double(e.loss.sym) + ',' +
                   detail::format_double(e.loss.l1) + ',' +
                   detail::format_double(e.loss.l2) + ',' +
                   detail::format_double(e.loss.total) + ',' +
                   detail::format_double(e.val_loss) + ',' + std::to_string(e.k) + '\n';
        }
        detail::write_text(out_dir / "metrics.csv", csv);
    }

    result.equations =
        extract_equations(result.report.final_model, config.train.precision,
                          config.train.prune_threshold, data.feature_names);
    {
        nlohmann::json j = {{"equations", result.equations},
                            {"metadata",
                             {{"precision", config.train.precision},
                              {"prune_threshold", config.train.prune_threshold},
                              {"dataset_hash", data.dataset_hash},
                              {"seed", config.train.seed}}}};
        detail::write_json(out_dir / "equations.json", j);
    }

    const Matrix net_tr = forward_batch(result.report.final_model, data.split.train.features);
    const Matrix net_te = forward_batch(result.report.final_model, data.split.test.features);
    const Matrix eq_tr = evaluate_equation(result.equations, data.split.train.features);
    const Matrix eq_te = evaluate_equation(result.equations, data.split.test.features);
    result.network_train = report(data.split.train.targets, net_tr);
    result.network_test = report(data.split.test.targets, net_te);
    result.equation_train = report(data.split.train.targets, eq_tr);
    result.equation_test = report(data.split.test.targets, eq_te);

    detail::write_json(out_dir / "config.json", nlohmann::json(config));
    {
        nlohmann::json growth = nlohmann::json::array();
        for (const auto& ev : result.report.growth_events)
            growth.push_back({{"epoch", ev.epoch}, {"blocks_added", ev.blocks_added}});
        nlohmann::json j = {
            {"stopping_reason", to_string(result.report.reason)},
            {"epochs_run", result.report.epochs_run},
            {"growth_events", growth},
            {"final_blocks", result.report.final_model.n_blocks()},
            {"final_train_task_loss", result.report.final_train_task_loss},
            {"final_val_task_loss", result.report.final_val_task_loss},
            {"metrics",
             {{"network",
               {{"train", result.network_train}, {"test", result.network_test}}},
              {"equation",
               {{"train", result.equation_train}, {"test", result.equation_test}}}}},
        };
        detail::write_json(out_dir / "report.json", j);
    }
    {
        nlohmann::json artifacts = {{"metrics", "metrics.csv"},
                                    {"equations", "equations.json"},
                                    {"report", "report.json"},
                                    {"config", "config.json"}};
        nlohmann::json ckpts = nlohmann::json::array();
        for (const auto& [epoch, p] : checkpoints)
            ckpts.push_back(fs::relative(p, out_dir).string());
        nlohmann::json j = {{"config", nlohmann::json(config)},
                            {"dataset_path", config.dataset_path},
                            {"dataset_hash", data.dataset_hash},
                            {"column_transforms",
                             {{"scale", data.transform.scale},
                              {"offset", data.transform.offset}}},
                            {"created_at", detail::iso_timestamp()},
                            {"artifacts", artifacts},
                            {"checkpoints", ckpts}};
        detail::write_json(out_dir / "manifest.json", j);
    }
    return result;
}

inline RunResult cmd_train_file(const std::string& config_path, const fs::path& out_dir,
                                bool force = false,
                                std::optional<std::uint64_t> seed_override = {}) {
    RunConfig config = load_run_config(config_path);
    if (seed_override) config.train.seed = *seed_override;
    return cmd_train(config, out_dir, force);
}

inline fs::path latest_checkpoint(const fs::path& run_dir) {
    const fs::path dir = run_dir / "checkpoints";
    if (!fs::exists(dir)) throw MissingArtifact(dir.string());
    fs::path best;
    int best_epoch = -1;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("epoch_", 0) != 0) continue;
        const int epoch = std::atoi(name.c_str() + 6);
        if (epoch > best_epoch) {
            best_epoch = epoch;
            best = entry.path();
        }
    }
    if (best_epoch < 0) throw MissingArtifact((dir / "epoch_*.json").string());
    return best;
}

inline ColumnTransform load_transform(const fs::path& run_dir) {
    const nlohmann::json manifest = detail::read_json(run_dir / "manifest.json");
    ColumnTransform t;
    t.scale = manifest.at("column_transforms").at("scale").get<std::vector<double>>();
    t.offset = manifest.at("column_transforms").at("offset").get<std::vector<double>>();
    return t;
}

struct EvalResult {
    MetricsReport network_train, network_test, equation_train, equation_test;
    fs::path csv_path;
    fs::path json_path;
};

// Re-derives the run's split, then reports network (forward pass) and
// equation (rounded symbolic form) metrics side by side.
inline EvalResult cmd_eval(const fs::path& run_dir,
                           const std::string& dataset_path_override = "") {
    const RunConfig config = parse_run_config(detail::read_json(run_dir / "config.json"));
    const fs::path eq_path = run_dir / "equations.json";
    if (!fs::exists(eq_path)) throw MissingArtifact(eq_path.string());
    const Model model = load_model(latest_checkpoint(run_dir).string());
    const std::vector<SymbolicEquation> equations =
        detail::read_json(eq_path).at("equations").get<std::vector<SymbolicEquation>>();

    const std::string data_path =
        dataset_path_override.empty() ? config.dataset_path : dataset_path_override;
    const Dataset raw = load_csv(data_path, config.target_columns);
    const Dataset shifted = apply_transform(raw, load_transform(run_dir));
    const SplitDataset parts = split(shifted, config.train_fraction, config.train.seed);

    EvalResult out;
    out.network_train =
        report(parts.train.targets, forward_batch(model, parts.train.features));
    out.network_test =
        report(parts.test.targets, forward_batch(model, parts.test.features));
    out.equation_train =
        report(parts.train.targets, evaluate_equation(equations, parts.train.features));
    out.equation_test =
        report(parts.test.targets, evaluate_equation(equations, parts.test.features));

    const std::size_t m = config.target_columns.size();
    std::string csv = metrics_csv_header(m) + "\n";
    csv += metrics_csv_row("network_train", out.network_train) + "\n";
    csv += metrics_csv_row("network_test", out.network_test) + "\n";
    csv += metrics_csv_row("equation_train", out.equation_train) + "\n";
    csv += metrics_csv_row("equation_test", out.equation_test) + "\n";
    out.csv_path = run_dir / "eval_report.csv";
    detail::write_text(out.csv_path, csv);

    nlohmann::json j = {{"dataset", data_path},
                        {"network", {{"train", out.network_train}, {"test", out.network_test}}},
                        {"equation",
                         {{"train", out.equation_train}, {"test", out.equation_test}}}};
    out.json_path = run_dir / "eval_report.json";
    detail::write_json(out.json_path, j);
    return out;
}

// Correlation sweep: vary one feature over its training range, hold the
// rest at training medians, evaluate the symbolic equation for one target.
// The x column is reported in original units (positivity shift inverted).
inline fs::path cmd_sweep_input(const fs::path& run_dir, std::size_t target_index,
                                std::size_t grid_size = 100) {
    if (grid_size < 2) throw ConfigError("grid_size", "must be >= 2");
    const RunConfig config = parse_run_config(detail::read_json(run_dir / "config.json"));
    const fs::path eq_path = run_dir / "equations.json";
    if (!fs::exists(eq_path)) throw MissingArtifact(eq_path.string());
    const std::vector<SymbolicEquation> equations =
        detail::read_json(eq_path).at("equations").get<std::vector<SymbolicEquation>>();
    if (target_index >= equations.size())
        throw ConfigError("target_index", "beyond the number of targets");
    const ColumnTransform transform = load_transform(run_dir);

    const Dataset raw = load_csv(config.dataset_path, config.target_columns);
    const Dataset shifted = apply_transform(raw, transform);
    const SplitDataset parts = split(shifted, config.train_fraction, config.train.seed);
    const Dataset& train_ds = parts.train;

    const std::size_t d = train_ds.n_features();
    std::vector<double> lo(d), hi(d), med(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> col = train_ds.features.col(j);
        std::sort(col.begin(), col.end());
        lo[j] = col.front();
        hi[j] = col.back();
        const std::size_t n = col.size();
        med[j] = (n % 2 == 1) ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
    }

    std::string csv = "feature,x_original_units,y\n";
    Matrix probe(1, d);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t g = 0; g < grid_size; ++g) {
            const double frac =
                static_cast<double>(g) / static_cast<double>(grid_size - 1);
            const double xj = lo[j] + frac * (hi[j] - lo[j]);
            for (std::size_t jj = 0; jj < d; ++jj) probe(0, jj) = med[jj];
            probe(0, j) = xj;
            const double y = evaluate_equation_row(equations[target_index], probe)[0];
            csv += train_ds.feature_names[j] + ',' +
                   detail::format_double(transform.invert(j, xj)) + ',' +
                   detail::format_double(y) + '\n';
        }
    }
    const fs::path out =
        run_dir / ("sweep_input_y" + std::to_string(target_index + 1) + ".csv");
    detail::write_text(out, csv);
    return out;
}

struct SweepCell {
    std::size_t k_init = 0, k_max = 0;
    MetricsReport network_test, equation_test;
};

// Train/eval grid over (k_init, k_max) pairs. Duplicate pairs are
// deduplicated with a warning. Runs execute in parallel worker threads,
// each owning a private run directory.
inline std::vector<SweepCell> cmd_sweep_pabs(const RunConfig& base,
                                             const fs::path& out_root,
                                             std::vector<std::size_t> k_init_list,
                                             std::vector<std::size_t> k_max_list,
                                             unsigned jobs = 1, bool force = false) {
    if (k_init_list.empty() || k_max_list.empty())
        throw ConfigError("k_init/k_max", "lists must be non-empty");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t ki : k_init_list)
        for (std::size_t km : k_max_list) {
            if (ki > km) throw ConfigError("k_init", "k_init must be <= k_max");
            const auto pair = std::make_pair(ki, km);
            if (std::find(pairs.begin(), pairs.end(), pair) != pairs.end()) {
                std::cerr << "warning: duplicate pair (k_init=" << ki
                          << ", k_max=" << km << ") skipped\n";
                continue;
            }
            pairs.push_back(pair);
        }

    std::vector<SweepCell> cells(pairs.size());
    std::vector<std::string> failures;
    std::mutex failure_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pairs.size()) return;
            const auto [ki, km] = pairs[i];
            RunConfig cfg = base;
            cfg.train.k_init = ki;
            cfg.train.k_max = km;
            const fs::path dir = out_root / ("kinit" + std::to_string(ki) + "_kmax" +
                                             std::to_string(km));
            try {
                const RunResult r = cmd_train(cfg, dir, force);
                cells[i] = {ki, km, r.network_test, r.equation_test};
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                failures.push_back(dir.string() + ": " + e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n_workers = std::max(1u, std::min<unsigned>(jobs, pairs.size()));
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (!failures.empty())
        throw Error("SweepFailed", "sweep runs failed: " + failures.front());

    std::string csv =
        "k_init,k_max,net_avg_mae,net_avg_mape,net_avg_rmse,"
        "eq_avg_mae,eq_avg_mape,eq_avg_rmse\n";
    for (const auto& c : cells) {
        csv += std::to_string(c.k_init) + ',' + std::to_string(c.k_max) + ',' +
               detail::format_double(c.network_test.avg_mae) + ',' +
               detail::format_double(c.network_test.avg_mape) + ',' +
               detail::format_double(c.network_test.avg_rmse) + ',' +
               detail::format_double(c.equation_test.avg_mae) + ',' +
               detail::format_double(c.equation_test.avg_mape) + ',' +
               detail::format_double(c.equation_test.avg_rmse) + '\n';
    }
    fs::create_directories(out_root);
    detail::write_text(out_root / "sweep_pabs_summary.csv", csv);
    return cells;
}

struct AblateResult {
    RunResult with_sl;
    RunResult without_sl;
    fs::path summary_csv;
    fs::path summary_json;
};

// Two runs with identical seeds, symbolic loss on/off, reported
// side by side in the same table layout as eval.
inline AblateResult cmd_ablate(const RunConfig& base, const fs::path& out_root,
                               bool force = false) {
    AblateResult out;
    RunConfig with = base;
    with.train.enable_symbolic_loss = true;
    RunConfig without = base;
    without.train.enable_symbolic_loss = false;
    out.with_sl = cmd_train(with, out_root / "with_sl", force);
    out.without_sl = cmd_train(without, out_root / "without_sl", force);

    const std::size_t m = base.target_columns.size();
    std::string csv = metrics_csv_header(m) + "\n";
    csv += metrics_csv_row("network_with_sl", out.with_sl.network_test) + "\n";
    csv += metrics_csv_row("network_without_sl", out.without_sl.network_test) + "\n";
    csv += metrics_csv_row("equation_with_sl", out.with_sl.equation_test) + "\n";
    csv += metrics_csv_row("equation_without_sl", out.without_sl.equation_test) + "\n";
    out.summary_csv = out_root / "ablate_summary.csv";
    detail::write_text(out.summary_csv, csv);

    nlohmann::json j = {
        {"network",
         {{"with_sl", out.with_sl.network_test},
          {"without_sl", out.without_sl.network_test}}},
        {"equation",
         {{"with_sl", out.with_sl.equation_test},
          {"without_sl", out.without_sl.equation_test}}}};
    out.summary_json = out_root / "ablate_summary.json";
    detail::write_json(out.summary_json, j);
    return out;
}

}  // namespace ginnlp
