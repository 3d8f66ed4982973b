#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ginnlp/errors.hpp"
#include "ginnlp/format.hpp"
#include "ginnlp/matrix.hpp"
#include "ginnlp/rng.hpp"

namespace ginnlp {

struct Dataset {
    Matrix features;                         // N x d
    Matrix targets;                          // N x M
    std::vector<std::string> feature_names;  // d
    std::vector<std::string> target_names;   // M

    std::size_t n_rows() const { return features.rows(); }
    std::size_t n_features() const { return features.cols(); }
    std::size_t n_targets() const { return targets.cols(); }

    void validate() const {
        if (features.rows() < 1 || features.cols() < 1 || targets.cols() < 1)
            throw ShapeMismatch("dataset needs N >= 1, d >= 1, M >= 1");
        if (features.rows() != targets.rows())
            throw ShapeMismatch("feature/target row count mismatch");
        for (std::size_t i = 0; i < features.rows(); ++i) {
            for (std::size_t j = 0; j < features.cols(); ++j)
                if (!std::isfinite(features(i, j)))
                    throw ShapeMismatch("non-finite feature entry");
            for (std::size_t j = 0; j < targets.cols(); ++j)
                if (!std::isfinite(targets(i, j)))
                    throw ShapeMismatch("non-finite target entry");
        }
    }
};

struct SplitDataset {
    Dataset train;
    Dataset test;
    std::uint64_t split_seed = 0;
    double train_fraction = 0.8;
};

// Per-column affine map x' = scale * x + offset. Identity columns keep
// scale 1, offset 0, so the inverse is always well defined.
struct ColumnTransform {
    std::vector<double> scale;
    std::vector<double> offset;

    static ColumnTransform identity(std::size_t d) {
        return {std::vector<double>(d, 1.0), std::vector<double>(d, 0.0)};
    }
    double apply(std::size_t j, double x) const { return scale[j] * x + offset[j]; }
    double invert(std::size_t j, double x) const { return (x - offset[j]) / scale[j]; }
};

struct TransformedDataset {
    Dataset data;
    ColumnTransform transform;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(const std::string& token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !token.empty();
}

}  // namespace detail

inline Dataset load_csv(const std::string& path,
                        const std::vector<std::string>& target_columns) {
    std::ifstream in(path);
    if (!in) throw EmptyFile(path);

    std::string line;
    if (!std::getline(in, line)) throw EmptyFile(path);
    const std::vector<std::string> header = detail::split_line(line);

    std::vector<std::size_t> target_idx;
    for (const auto& name : target_columns) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw MissingColumn(name);
        target_idx.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    std::vector<std::size_t> feature_idx;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (std::find(target_idx.begin(), target_idx.end(), j) == target_idx.end())
            feature_idx.push_back(j);
    if (feature_idx.empty()) throw ShapeMismatch("no feature columns left");

    std::vector<std::vector<double>> xrows, yrows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        const std::vector<std::string> cells = detail::split_line(line);
        if (cells.size() != header.size())
            throw ParseError(row, cells.size() + 1, "<missing cell>");
        std::vector<double> x(feature_idx.size()), y(target_idx.size());
        for (std::size_t j = 0; j < feature_idx.size(); ++j)
            if (!detail::parse_double(cells[feature_idx[j]], x[j]))
                throw ParseError(row, feature_idx[j] + 1, cells[feature_idx[j]]);
        for (std::size_t j = 0; j < target_idx.size(); ++j)
            if (!detail::parse_double(cells[target_idx[j]], y[j]))
                throw ParseError(row, target_idx[j] + 1, cells[target_idx[j]]);
        xrows.push_back(std::move(x));
        yrows.push_back(std::move(y));
    }
    if (xrows.empty()) throw EmptyFile(path);

    Dataset ds;
    ds.features = Matrix::from_rows(xrows);
    ds.targets = Matrix::from_rows(yrows);
    for (std::size_t j : feature_idx) ds.feature_names.push_back(header[j]);
    for (std::size_t j : target_idx) ds.target_names.push_back(header[j]);
    ds.validate();
    return ds;
}

inline void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot open for writing: " + path);
    for (std::size_t j = 0; j < ds.feature_names.size(); ++j)
        out << (j ? "," : "") << ds.feature_names[j];
    for (const auto& name : ds.target_names) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        for (std::size_t j = 0; j < ds.n_features(); ++j)
            out << (j ? "," : "") << detail::format_double(ds.features(i, j));
        for (std::size_t j = 0; j < ds.n_targets(); ++j)
            out << ',' << detail::format_double(ds.targets(i, j));
        out << '\n';
    }
}

// Column-wise shift into strictly positive territory. A column whose minimum
// is <= 0 is shifted by (-min + epsilon_pos); positive columns are untouched,
// which also makes the operation idempotent.
inline TransformedDataset ensure_positive(const Dataset& ds, double epsilon_pos = 1e-6) {
    ds.validate();
    TransformedDataset out{ds, ColumnTransform::identity(ds.n_features())};
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
        double mn = ds.features(0, j);
        for (std::size_t i = 1; i < ds.n_rows(); ++i) mn = std::min(mn, ds.features(i, j));
        if (mn <= 0.0) {
            const double shift = -mn + epsilon_pos;
            out.transform.offset[j] = shift;
            for (std::size_t i = 0; i < ds.n_rows(); ++i) out.data.features(i, j) += shift;
        }
    }
    return out;
}

// Optional mode: map every column onto [epsilon_pos, 1 + epsilon_pos].
// Constant columns map to epsilon_pos.
inline TransformedDataset scale_minmax(const Dataset& ds, double epsilon_pos = 1e-6) {
    ds.validate();
    TransformedDataset out{ds, ColumnTransform::identity(ds.n_features())};
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
        double mn = ds.features(0, j), mx = ds.features(0, j);
        for (std::size_t i = 1; i < ds.n_rows(); ++i) {
            mn = std::min(mn, ds.features(i, j));
            mx = std::max(mx, ds.features(i, j));
        }
        const double scale = (mx > mn) ? 1.0 / (mx - mn) : 0.0;
        const double offset = epsilon_pos - mn * scale;
        out.transform.scale[j] = scale;
        out.transform.offset[j] = offset;
        for (std::size_t i = 0; i < ds.n_rows(); ++i)
            out.data.features(i, j) = out.transform.apply(j, ds.features(i, j));
    }
    return out;
}

inline Dataset apply_transform(const Dataset& ds, const ColumnTransform& t) {
    if (t.scale.size() != ds.n_features())
        throw ShapeMismatch("transform dimension does not match dataset");
    Dataset out = ds;
    for (std::size_t i = 0; i < ds.n_rows(); ++i)
        for (std::size_t j = 0; j < ds.n_features(); ++j)
            out.features(i, j) = t.apply(j, ds.features(i, j));
    return out;
}

inline SplitDataset split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    ds.validate();
    const std::size_t n = ds.n_rows();
    if (n < 2) throw TooFewRows(n);
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train_fraction", "must be in (0, 1)");

    std::size_t n_train = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * train_fraction));
    n_train = std::max<std::size_t>(1, std::min(n_train, n - 1));

    Rng rng(seed);
    const std::vector<std::size_t> perm = rng.permutation(n);

    auto take = [&](std::size_t from, std::size_t count) {
        Dataset part;
        part.feature_names = ds.feature_names;
        part.target_names = ds.target_names;
        part.features = Matrix(count, ds.n_features());
        part.targets = Matrix(count, ds.n_targets());
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t src = perm[from + i];
            for (std::size_t j = 0; j < ds.n_features(); ++j)
                part.features(i, j) = ds.features(src, j);
            for (std::size_t j = 0; j < ds.n_targets(); ++j)
                part.targets(i, j) = ds.targets(src, j);
        }
        return part;
    };

    SplitDataset out;
    out.train = take(0, n_train);
    out.test = take(n_train, n - n_train);
    out.split_seed = seed;
    out.train_fraction = train_fraction;
    return out;
}

}  // namespace ginnlp
