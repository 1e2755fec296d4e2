#include "mfl/error.hpp"

namespace mfl {

const char* errc_name(Errc c)
{
    switch (c) {
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::DegenerateDensity: return "DegenerateDensity";
    case Errc::InvalidTime: return "InvalidTime";
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::DimensionUnsupported: return "DimensionUnsupported";
    case Errc::NotEven: return "NotEven";
    case Errc::InvalidSigma: return "InvalidSigma";
    case Errc::InvalidTau: return "InvalidTau";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::CflViolation: return "CflViolation";
    case Errc::NegativeDensity: return "NegativeDensity";
    case Errc::SandwichViolation: return "SandwichViolation";
    case Errc::DriftBoundViolation: return "DriftBoundViolation";
    case Errc::DomainMismatch: return "DomainMismatch";
    case Errc::HypothesisViolated: return "HypothesisViolated";
    case Errc::InvalidRegime: return "InvalidRegime";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::NonPositiveGap: return "NonPositiveGap";
    case Errc::ConfigError: return "ConfigError";
    case Errc::AssertionFailure: return "AssertionFailure";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace mfl
