#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lbtail {

// Base class for all typed failures. code() is a stable machine-readable
// identifier; the CLI prints it as the one-line error prefix.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Duplicate x value in an observed sample. The estimators assume a
// continuous law, so ties are rejected rather than silently broken.
class TieError : public Error {
public:
    explicit TieError(double value)
        : Error("tie", "duplicate x value " + std::to_string(value) +
                           " in observed sample"),
          value_(value) {}

    double value() const noexcept { return value_; }

private:
    double value_;
};

// The product-limit estimator collapses to zero at the queried point:
// some data point above it has a covering count of exactly one. Carries
// the degenerate mass point T = max{x_i : n C_n(x_i) = 1}.
class DegenerateMassError : public Error {
public:
    DegenerateMassError(std::string code, const std::string& what,
                        double degenerate_point)
        : Error(std::move(code), what), degenerate_point_(degenerate_point) {}

    double degenerate_point() const noexcept { return degenerate_point_; }

private:
    double degenerate_point_;
};

// The two Hill parts of the ratio estimator coincide, so the combination
// has a zero denominator and the estimate is undefined.
class DegenerateCombinationError : public Error {
public:
    DegenerateCombinationError(double gamma1_star, double gamma2)
        : Error("degenerate-combination",
                "hill estimates coincide (" + std::to_string(gamma1_star) +
                    "); combined estimate undefined") {
        (void)gamma2;
    }
};

// Requested quantile order is not beyond the tail threshold.
class ExtrapolationError : public Error {
public:
    ExtrapolationError(double p_n, double fbar_t)
        : Error("extrapolation-order",
                "quantile order p_n=" + std::to_string(p_n) +
                    " is not below the tail mass at the threshold (" +
                    std::to_string(fbar_t) + ")") {}
};

// Rejection sampling made no usable progress within its draw budget.
class GenerationStallError : public Error {
public:
    GenerationStallError(std::uint64_t attempts, std::size_t accepted)
        : Error("generation-stall",
                "rejection sampling stalled after " +
                    std::to_string(attempts) + " draws (" +
                    std::to_string(accepted) + " accepted)") {}
};

// Malformed CSV input; line numbers are 1-based and count the header.
class CsvError : public Error {
public:
    CsvError(std::size_t line, const std::string& what)
        : Error("csv", "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace lbtail
