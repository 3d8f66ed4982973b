#pragma once

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ginnlp/errors.hpp"
#include "ginnlp/matrix.hpp"
#include "ginnlp/model.hpp"

namespace ginnlp {

// Monomial features m_k(x) for one input row, built from rounded exponents.
struct MonomialVector {
    std::vector<double> values;
};

struct EquationTerm {
    double coefficient = 0.0;
    std::vector<double> exponents;  // exact multiples of the rounding precision
};

// Printable per-task equation: y = bias + sum coefficient * prod x_i^e_i.
struct SymbolicEquation {
    std::size_t task = 0;
    double bias = 0.0;
    std::vector<EquationTerm> terms;
    std::vector<std::string> feature_names;
};

// Ties round half away from zero on every platform (std::round semantics).
inline double round_to_precision(double w, double precision) {
    return precision * std::round(w / precision);
}

inline Model round_exponents(const Model& model, double precision) {
    if (!(precision > 0.0)) throw ConfigError("precision", "must be > 0");
    Model out = model;
    for (auto& block : out.blocks)
        for (auto& w : block.exponents) w = round_to_precision(w, precision);
    return out;
}

// Direct power evaluation (not the log path): this is the symbolic
// semantics used by the consistency loss and the printed equations.
inline MonomialVector monomial_features(const Model& model, std::span<const double> x,
                                        double precision) {
    detail::check_positive_input(x, model.input_dim);
    if (!(precision > 0.0)) throw ConfigError("precision", "must be > 0");
    MonomialVector mv;
    mv.values.reserve(model.n_blocks());
    for (const auto& block : model.blocks) {
        double m = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            m *= std::pow(x[i], round_to_precision(block.exponents[i], precision));
        mv.values.push_back(m);
    }
    return mv;
}

inline std::vector<double> symbolic_predict(const Model& model, std::span<const double> x,
                                            double precision) {
    const MonomialVector mv = monomial_features(model, x, precision);
    std::vector<double> out(model.n_tasks());
    for (std::size_t t = 0; t < model.n_tasks(); ++t) {
        double y = model.heads[t].bias;
        for (std::size_t k = 0; k < model.n_blocks(); ++k)
            y += model.heads[t].coefficients[k] * mv.values[k];
        out[t] = y;
    }
    return out;
}

// prune_threshold is relative to the largest |coefficient| in the same head,
// so equation readability does not depend on target scale.
inline std::vector<SymbolicEquation> extract_equations(
    const Model& model, double precision, double prune_threshold,
    const std::vector<std::string>& feature_names) {
    model.validate();
    if (prune_threshold < 0.0) throw ConfigError("prune_threshold", "must be >= 0");
    if (!feature_names.empty() && feature_names.size() != model.input_dim)
        throw ShapeMismatch("feature name count != input_dim");

    std::vector<std::string> names = feature_names;
    if (names.empty())
        for (std::size_t i = 0; i < model.input_dim; ++i)
            names.push_back("x" + std::to_string(i + 1));

    const Model rounded = round_exponents(model, precision);
    std::vector<SymbolicEquation> out;
    for (std::size_t t = 0; t < model.n_tasks(); ++t) {
        SymbolicEquation eq;
        eq.task = t;
        eq.bias = model.heads[t].bias;
        eq.feature_names = names;
        double max_abs = 0.0;
        for (double c : model.heads[t].coefficients)
            max_abs = std::max(max_abs, std::abs(c));
        const double cutoff = prune_threshold * max_abs;
        for (std::size_t k = 0; k < model.n_blocks(); ++k) {
            const double c = model.heads[t].coefficients[k];
            if (std::abs(c) < cutoff) continue;
            eq.terms.push_back({c, rounded.blocks[k].exponents});
        }
        out.push_back(std::move(eq));
    }
    return out;
}

namespace detail {

inline std::string format_sig4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// exponents are precision multiples; print them without trailing zeros
inline std::string format_exponent(double e) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", e);
    return buf;
}

inline std::string render_term_text(const EquationTerm& term,
                                    const std::vector<std::string>& names, bool latex) {
    std::string s = format_sig4(std::abs(term.coefficient));
    for (std::size_t i = 0; i < term.exponents.size(); ++i) {
        const double e = term.exponents[i];
        if (e == 0.0) continue;
        s += latex ? " " : "·";
        if (latex) {
            s += names[i];
            if (e != 1.0) s += "^{" + format_exponent(e) + "}";
        } else {
            s += names[i];
            if (e != 1.0) s += "^" + format_exponent(e);
        }
    }
    return s;
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const EquationTerm& t) {
    j = {{"coefficient", t.coefficient}, {"exponents", t.exponents}};
}

inline void from_json(const nlohmann::json& j, EquationTerm& t) {
    t.coefficient = j.at("coefficient").get<double>();
    t.exponents = j.at("exponents").get<std::vector<double>>();
}

inline void to_json(nlohmann::json& j, const SymbolicEquation& eq) {
    j = {{"task", eq.task},
         {"bias", eq.bias},
         {"terms", eq.terms},
         {"feature_names", eq.feature_names}};
}

inline void from_json(const nlohmann::json& j, SymbolicEquation& eq) {
    eq.task = j.at("task").get<std::size_t>();
    eq.bias = j.at("bias").get<double>();
    eq.terms = j.at("terms").get<std::vector<EquationTerm>>();
    eq.feature_names = j.at("feature_names").get<std::vector<std::string>>();
}

inline std::string render_equation(const SymbolicEquation& eq, const std::string& format) {
    if (format == "json") return nlohmann::json(eq).dump();
    if (format != "text" && format != "latex") throw UnknownFormat(format);
    const bool latex = format == "latex";

    std::string lhs = latex ? ("y_{" + std::to_string(eq.task + 1) + "}")
                            : ("y" + std::to_string(eq.task + 1));
    std::string s = lhs + " = " + detail::format_sig4(eq.bias);
    for (const auto& term : eq.terms) {
        s += term.coefficient < 0 ? " - " : " + ";
        s += detail::render_term_text(term, eq.feature_names, latex);
    }
    return s;
}

inline std::vector<double> evaluate_equation_row(const SymbolicEquation& eq,
                                                 const Matrix& X) {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        std::span<const double> x(X.row_ptr(i), X.cols());
        if (!eq.terms.empty() && X.cols() != eq.terms.front().exponents.size())
            throw ShapeMismatch("equation arity != dataset width");
        for (std::size_t j = 0; j < x.size(); ++j)
            if (!(x[j] > 0.0)) throw NonPositiveInput(j, x[j]);
        double y = eq.bias;
        for (const auto& term : eq.terms) {
            double m = 1.0;
            for (std::size_t j = 0; j < term.exponents.size(); ++j)
                m *= std::pow(x[j], term.exponents[j]);
            y += term.coefficient * m;
        }
        out[i] = y;
    }
    return out;
}

// Every "(Eq.)" style metric row comes through here.
inline Matrix evaluate_equation(const std::vector<SymbolicEquation>& eqs, const Matrix& X) {
    Matrix out(X.rows(), eqs.size());
    for (std::size_t t = 0; t < eqs.size(); ++t) {
        const std::vector<double> col = evaluate_equation_row(eqs[t], X);
        for (std::size_t i = 0; i < X.rows(); ++i) out(i, t) = col[i];
    }
    return out;
}

}  // namespace ginnlp
