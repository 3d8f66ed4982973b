#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ginnlp/errors.hpp"
#include "ginnlp/format.hpp"
#include "ginnlp/matrix.hpp"

namespace ginnlp {

inline double mae(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) throw LengthMismatch(y.size(), yhat.size());
    if (y.empty()) throw EmptyInput();
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

// Percent MAPE over rows with |y| > zero_tol; excluded rows are counted,
// never silently dropped.
inline std::pair<double, std::size_t> mape(std::span<const double> y,
                                           std::span<const double> yhat,
                                           double zero_tol = 1e-8) {
    if (y.size() != yhat.size()) throw LengthMismatch(y.size(), yhat.size());
    if (y.empty()) throw EmptyInput();
    double s = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (std::abs(y[i]) <= zero_tol) continue;
        s += std::abs((y[i] - yhat[i]) / y[i]);
        ++used;
    }
    if (used == 0) throw AllExcluded();
    return {100.0 * s / static_cast<double>(used), y.size() - used};
}

inline double rmse(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) throw LengthMismatch(y.size(), yhat.size());
    if (y.empty()) throw EmptyInput();
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - yhat[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(y.size()));
}

struct MetricsReport {
    std::vector<double> mae_per_target;
    std::vector<double> mape_per_target;  // percent
    std::vector<double> rmse_per_target;
    double avg_mae = 0.0;
    double avg_mape = 0.0;
    double avg_rmse = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_mape_excluded = 0;
};

inline MetricsReport report(const Matrix& Y, const Matrix& Yhat, double zero_tol = 1e-8) {
    if (Y.rows() != Yhat.rows() || Y.cols() != Yhat.cols())
        throw ShapeMismatch("metric matrices differ in shape");
    MetricsReport r;
    r.n_samples = Y.rows();
    for (std::size_t t = 0; t < Y.cols(); ++t) {
        const std::vector<double> y = Y.col(t);
        const std::vector<double> yh = Yhat.col(t);
        r.mae_per_target.push_back(mae(y, yh));
        auto [mp, excluded] = mape(y, yh, zero_tol);
        r.mape_per_target.push_back(mp);
        r.n_mape_excluded += excluded;
        r.rmse_per_target.push_back(rmse(y, yh));
    }
    const double m = static_cast<double>(Y.cols());
    for (std::size_t t = 0; t < Y.cols(); ++t) {
        r.avg_mae += r.mae_per_target[t] / m;
        r.avg_mape += r.mape_per_target[t] / m;
        r.avg_rmse += r.rmse_per_target[t] / m;
    }
    return r;
}

inline void to_json(nlohmann::json& j, const MetricsReport& r) {
    j = {{"mae", r.mae_per_target},     {"mape", r.mape_per_target},
         {"rmse", r.rmse_per_target},   {"avg_mae", r.avg_mae},
         {"avg_mape", r.avg_mape},      {"avg_rmse", r.avg_rmse},
         {"n_samples", r.n_samples},    {"n_mape_excluded", r.n_mape_excluded}};
}

inline void from_json(const nlohmann::json& j, MetricsReport& r) {
    r.mae_per_target = j.at("mae").get<std::vector<double>>();
    r.mape_per_target = j.at("mape").get<std::vector<double>>();
    r.rmse_per_target = j.at("rmse").get<std::vector<double>>();
    r.avg_mae = j.at("avg_mae").get<double>();
    r.avg_mape = j.at("avg_mape").get<double>();
    r.avg_rmse = j.at("avg_rmse").get<double>();
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.n_mape_excluded = j.at("n_mape_excluded").get<std::size_t>();
}

// Header/row pair in the table layout used throughout the reports:
// MAE per target, Avg. MAE, MAPE per target, Avg. MAPE, RMSE..., Avg. RMSE.
inline std::string metrics_csv_header(std::size_t n_targets) {
    std::string s = "label";
    auto add = [&](const std::string& name) {
        for (std::size_t t = 1; t <= n_targets; ++t)
            s += "," + name + "_y" + std::to_string(t);
        s += ",avg_" + name;
    };
    add("mae");
    add("mape");
    add("rmse");
    return s;
}

inline std::string metrics_csv_row(const std::string& label, const MetricsReport& r) {
    std::string s = label;
    auto add = [&](const std::vector<double>& v, double avg) {
        for (double x : v) s += "," + detail::format_double(x);
        s += "," + detail::format_double(avg);
    };
    add(r.mae_per_target, r.avg_mae);
    add(r.mape_per_target, r.avg_mape);
    add(r.rmse_per_target, r.avg_rmse);
    return s;
}

}  // namespace ginnlp
