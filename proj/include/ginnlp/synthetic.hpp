#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ginnlp/dataset.hpp"
#include "ginnlp/matrix.hpp"
#include "ginnlp/rng.hpp"

namespace ginnlp::synthetic {

// Building-energy benchmark surrogate: a parametric grid of 12 building
// forms x 4 orientations x 4 glazing levels x 4 glazing distributions
// (768 rows, 8 features, 2 targets). Geometry-derived columns are
// normalized to unit-ish scale; the targets mix two power-law terms of
// comparable size plus small texture factors and Gaussian noise.
inline Dataset building_energy(std::uint64_t seed = 20240801, double noise = 0.15) {
    constexpr double volume = 771.75;
    struct Form {
        double rc, sn, wn, rn, hn;
    };
    std::vector<Form> forms;
    for (double h : {7.0, 3.5}) {
        for (double aspect : {1.0, 1.5, 2.0, 3.0, 5.0, 8.0}) {
            const double footprint = volume / h;
            const double w = std::sqrt(footprint / aspect);
            const double l = aspect * w;
            const double wall = 2.0 * (w + l) * h;
            const double surface = wall + 2.0 * footprint;
            forms.push_back({6.0 * std::pow(volume, 2.0 / 3.0) / surface,
                             surface / 600.0, wall / 300.0, footprint / 150.0,
                             h / 3.5});
        }
    }

    Rng rng(seed);
    std::vector<std::vector<double>> xrows, yrows;
    for (const Form& f : forms) {
        for (int orient = 2; orient <= 5; ++orient) {
            for (double gz : {0.5, 0.8, 1.2, 1.6}) {
                for (int dist = 0; dist <= 3; ++dist) {
                    const double m1 = f.wn * f.hn * gz / (f.rc * f.rc);
                    double y1 = 10.0 * m1 - 4.5 * m1 * gz * f.rc;
                    const double m2 = f.sn * f.hn * gz * gz / f.rc;
                    double y2 = 11.0 * m2 - 5.5 * m2 * f.wn / f.hn;
                    y1 *= (1.0 + 0.004 * dist) * (1.0 + 0.002 * orient);
                    y2 *= (1.0 + 0.003 * dist) * (1.0 + 0.003 * orient);
                    y1 += noise * rng.normal();
                    y2 += noise * rng.normal();
                    xrows.push_back({f.rc, f.sn, f.wn, f.rn, f.hn,
                                     static_cast<double>(orient), gz,
                                     static_cast<double>(dist)});
                    yrows.push_back({y1, y2});
                }
            }
        }
    }

    Dataset ds;
    ds.features = Matrix::from_rows(xrows);
    ds.targets = Matrix::from_rows(yrows);
    ds.feature_names = {"relative_compactness", "surface_area", "wall_area",
                        "roof_area",            "overall_height", "orientation",
                        "glazing_area",         "glazing_distribution"};
    ds.target_names = {"heating_load", "cooling_load"};
    return ds;
}

// Agriculture-style surrogate: 2,501 rows, 15 features, 2 targets
// (sustainability score, consumer trend index). Only a handful of features
// drive the targets; the rest are distractors, as in typical tabular data.
inline Dataset agriculture(std::uint64_t seed = 20240802, double noise = 0.12) {
    Rng rng(seed);
    const std::size_t n = 2501, d = 15;
    std::vector<std::vector<double>> xrows, yrows;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j) x[j] = rng.uniform(0.4, 2.2);
        const double y1 =
            3.2 * x[9] * x[12] / x[11] + 1.1 * x[13] * x[13] + noise * rng.normal();
        const double y2 =
            4.0 * x[11] * std::sqrt(x[13]) + 0.8 * x[9] / x[5] + noise * rng.normal();
        xrows.push_back(std::move(x));
        yrows.push_back({y1, y2});
    }
    Dataset ds;
    ds.features = Matrix::from_rows(xrows);
    ds.targets = Matrix::from_rows(yrows);
    ds.feature_names = {"soil_quality",    "rainfall_index",   "temperature_index",
                        "humidity_index",  "fertilizer_rate",  "pesticide_rate",
                        "irrigation_rate", "organic_fraction", "labor_index",
                        "water_efficiency", "machinery_index", "market_demand",
                        "crop_diversity",  "practice_score",   "region_index"};
    ds.target_names = {"sustainability_score", "consumer_trend_index"};
    return ds;
}

// Noiseless two-target Laurent system used by the recovery tests:
//   y1 = 2 x1^2 / x2 + 3,   y2 = x1 x2,   x ~ U(0.5, 2)^2.
inline Dataset laurent_recovery(std::size_t n = 500, std::uint64_t seed = 123) {
    Rng rng(seed);
    std::vector<std::vector<double>> xrows, yrows;
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = rng.uniform(0.5, 2.0);
        const double x2 = rng.uniform(0.5, 2.0);
        xrows.push_back({x1, x2});
        yrows.push_back({2.0 * x1 * x1 / x2 + 3.0, x1 * x2});
    }
    Dataset ds;
    ds.features = Matrix::from_rows(xrows);
    ds.targets = Matrix::from_rows(yrows);
    ds.feature_names = {"x1", "x2"};
    ds.target_names = {"y1", "y2"};
    return ds;
}

}  // namespace ginnlp::synthetic
