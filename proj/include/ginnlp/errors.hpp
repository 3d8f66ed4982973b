#pragma once

#include <stdexcept>
#include <string>

namespace ginnlp {

// Base for all library errors. `kind()` is a stable machine-readable tag
// used by the CLI when emitting error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct MissingColumn : Error {
    explicit MissingColumn(const std::string& name)
        : Error("MissingColumn", "column not found: " + name), column(name) {}
    std::string column;
};

struct ParseError : Error {
    ParseError(std::size_t row, std::size_t col, const std::string& token)
        : Error("ParseError",
                "cannot parse value '" + token + "' at row " + std::to_string(row) +
                    ", column " + std::to_string(col)),
          row(row), col(col) {}
    std::size_t row;  // 1-based data row (header excluded)
    std::size_t col;  // 1-based column
};

struct EmptyFile : Error {
    explicit EmptyFile(const std::string& path)
        : Error("EmptyFile", "empty or headerless CSV file: " + path) {}
};

struct TooFewRows : Error {
    explicit TooFewRows(std::size_t n)
        : Error("TooFewRows", "need at least 2 rows to split, got " + std::to_string(n)) {}
};

struct NonPositiveInput : Error {
    NonPositiveInput(std::size_t index, double value)
        : Error("NonPositiveInput",
                "feature " + std::to_string(index) + " is non-positive (" +
                    std::to_string(value) + "); run ensure_positive upstream") {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& message) : Error("ShapeMismatch", message) {}
};

struct LengthMismatch : Error {
    LengthMismatch(std::size_t a, std::size_t b)
        : Error("LengthMismatch",
                "length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct EmptyInput : Error {
    EmptyInput() : Error("EmptyInput", "empty input vector") {}
};

struct AllExcluded : Error {
    AllExcluded() : Error("AllExcluded", "all rows excluded by the MAPE zero guard") {}
};

struct SingularSystem : Error {
    SingularSystem() : Error("SingularSystem", "normal equations are numerically singular") {}
};

struct UnknownFormat : Error {
    explicit UnknownFormat(const std::string& fmt)
        : Error("UnknownFormat", "unknown render format: " + fmt) {}
};

struct NoGrowthWindow : Error {
    NoGrowthWindow()
        : Error("NoGrowthWindow",
                "k_max > k_init but no growth event fits before the last epoch") {}
};

struct DivergenceDetected : Error {
    explicit DivergenceDetected(int epoch)
        : Error("DivergenceDetected",
                "total loss non-finite for 10 consecutive epochs (at epoch " +
                    std::to_string(epoch) + ")") {}
};

struct MissingArtifact : Error {
    explicit MissingArtifact(const std::string& path)
        : Error("MissingArtifact", "missing run artifact: " + path) {}
};

struct ConfigError : Error {
    ConfigError(const std::string& key, const std::string& message)
        : Error("ConfigError", "config key '" + key + "': " + message), key(key) {}
    std::string key;
};

}  // namespace ginnlp
