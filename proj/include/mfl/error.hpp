#pragma once

#include <stdexcept>
#include <string>

namespace mfl {

enum class Errc {
    GridMismatch,
    DegenerateDensity,
    InvalidTime,
    InvalidGrid,
    DimensionUnsupported,
    NotEven,
    InvalidSigma,
    InvalidTau,
    NoConvergence,
    CflViolation,
    NegativeDensity,
    SandwichViolation,
    DriftBoundViolation,
    DomainMismatch,
    HypothesisViolated,
    InvalidRegime,
    InsufficientData,
    NonPositiveGap,
    ConfigError,
    AssertionFailure,
    IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, double detail = 0.0)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what),
          code_(code), detail_(detail) {}

    Errc code() const noexcept { return code_; }
    // residual for NoConvergence, offending value otherwise
    double detail() const noexcept { return detail_; }

private:
    Errc code_;
    double detail_;
};

} // namespace mfl
