#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ginnlp/ginnlp.hpp"

namespace {

void print_error_json(const std::string& kind, const std::string& message,
                      const std::string& key = "") {
    nlohmann::json j = {{"error", kind}, {"message", message}};
    if (!key.empty()) j["key"] = key;
    std::cerr << j.dump() << "\n";
}

std::vector<std::size_t> parse_size_list(const std::string& csv) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t pos = csv.find(',', start);
        const std::string tok = csv.substr(start, pos == std::string::npos
                                                      ? std::string::npos
                                                      : pos - start);
        if (!tok.empty()) out.push_back(std::stoul(tok));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

void print_report_line(const std::string& label, const ginnlp::MetricsReport& r) {
    std::cout << label << ": avg MAE " << r.avg_mae << ", avg MAPE " << r.avg_mape
              << "%, avg RMSE " << r.avg_rmse << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ginnlp: growing Laurent-polynomial networks for multi-target "
                 "symbolic regression"};
    app.require_subcommand(1);

    std::string config_path, out_dir, run_dir, data_path;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    bool force = false;
    bool laurent = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_flag("--force", force, "overwrite an existing run directory");
    };

    auto* train_cmd = app.add_subcommand("train", "train a model from a config file");
    train_cmd->add_option("--config", config_path, "run config JSON")->required();
    train_cmd->add_option("--out", out_dir, "run output directory")->required();
    train_cmd->add_flag("--laurent", laurent,
                        "integer exponents (rounding precision 1.0)");
    add_common(train_cmd);

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a finished run");
    eval_cmd->add_option("--run", run_dir, "run directory")->required();
    eval_cmd->add_option("--data", data_path, "dataset CSV (defaults to the run's)");

    auto* sweep_in_cmd =
        app.add_subcommand("sweep-input", "per-feature correlation sweep table");
    std::size_t target_index = 0, grid_size = 100;
    sweep_in_cmd->add_option("--run", run_dir, "run directory")->required();
    sweep_in_cmd->add_option("--target", target_index, "target index (0-based)");
    sweep_in_cmd->add_option("--grid", grid_size, "grid points per feature");

    auto* sweep_pabs_cmd =
        app.add_subcommand("sweep-pabs", "train/eval grid over block counts");
    std::string k_max_csv = "2,4,6,8,10", k_init_csv = "1";
    sweep_pabs_cmd->add_option("--config", config_path, "run config JSON")->required();
    sweep_pabs_cmd->add_option("--out", out_dir, "sweep output root")->required();
    sweep_pabs_cmd->add_option("--kmax", k_max_csv, "comma list of maximum block counts");
    sweep_pabs_cmd->add_option("--kinit", k_init_csv, "comma list of initial block counts");
    sweep_pabs_cmd->add_option("--jobs", jobs, "parallel workers");
    add_common(sweep_pabs_cmd);

    auto* ablate_cmd =
        app.add_subcommand("ablate", "paired runs with and without the symbolic loss");
    ablate_cmd->add_option("--config", config_path, "run config JSON")->required();
    ablate_cmd->add_option("--out", out_dir, "output root")->required();
    ablate_cmd->add_flag("--laurent", laurent,
                         "integer exponents (rounding precision 1.0)");
    add_common(ablate_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*train_cmd) {
            ginnlp::RunConfig config = ginnlp::load_run_config(config_path);
            if (seed) config.train.seed = *seed;
            if (laurent) config.train.precision = 1.0;
            const ginnlp::RunResult r = ginnlp::cmd_train(config, out_dir, force);
            std::cout << "run directory: " << r.run_dir.string() << "\n"
                      << "stopping: " << ginnlp::to_string(r.report.reason) << " after "
                      << r.report.epochs_run << " epochs, K="
                      << r.report.final_model.n_blocks() << "\n";
            print_report_line("network (test)", r.network_test);
            print_report_line("equation (test)", r.equation_test);
            for (const auto& eq : r.equations)
                std::cout << ginnlp::render_equation(eq, "text") << "\n";
        } else if (*eval_cmd) {
            const ginnlp::EvalResult r = ginnlp::cmd_eval(run_dir, data_path);
            print_report_line("network_train", r.network_train);
            print_report_line("network_test", r.network_test);
            print_report_line("equation_train", r.equation_train);
            print_report_line("equation_test", r.equation_test);
            std::cout << "wrote " << r.csv_path.string() << " and "
                      << r.json_path.string() << "\n";
        } else if (*sweep_in_cmd) {
            const auto path = ginnlp::cmd_sweep_input(run_dir, target_index, grid_size);
            std::cout << "wrote " << path.string() << "\n";
        } else if (*sweep_pabs_cmd) {
            ginnlp::RunConfig config = ginnlp::load_run_config(config_path);
            if (seed) config.train.seed = *seed;
            const auto cells = ginnlp::cmd_sweep_pabs(config, out_dir,
                                                      parse_size_list(k_init_csv),
                                                      parse_size_list(k_max_csv),
                                                      jobs, force);
            for (const auto& c : cells)
                std::cout << "k_init=" << c.k_init << " k_max=" << c.k_max
                          << ": net avg MAE " << c.network_test.avg_mae
                          << ", eq avg MAE " << c.equation_test.avg_mae << "\n";
            std::cout << "wrote " << (out_dir + "/sweep_pabs_summary.csv") << "\n";
        } else if (*ablate_cmd) {
            ginnlp::RunConfig config = ginnlp::load_run_config(config_path);
            if (seed) config.train.seed = *seed;
            if (laurent) config.train.precision = 1.0;
            const ginnlp::AblateResult r = ginnlp::cmd_ablate(config, out_dir, force);
            print_report_line("network_with_sl", r.with_sl.network_test);
            print_report_line("network_without_sl", r.without_sl.network_test);
            print_report_line("equation_with_sl", r.with_sl.equation_test);
            print_report_line("equation_without_sl", r.without_sl.equation_test);
            std::cout << "wrote " << r.summary_csv.string() << "\n";
        }
    } catch (const ginnlp::ConfigError& e) {
        print_error_json(e.kind(), e.what(), e.key);
        return 2;
    } catch (const ginnlp::Error& e) {
        print_error_json(e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error_json("RuntimeError", e.what());
        return 1;
    }
    return 0;
}
