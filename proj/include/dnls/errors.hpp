#ifndef DNLS_ERRORS_HPP
#define DNLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dnls {

// Domain-specific failures. Everything derives from std::runtime_error so
// callers can catch broadly; the CLI maps these onto exit codes.

struct EdgeDecayViolation : std::runtime_error {
    explicit EdgeDecayViolation(const std::string& what) : std::runtime_error(what) {}
};

struct NegativeHomogeneousOnMeanful : std::runtime_error {
    explicit NegativeHomogeneousOnMeanful(const std::string& what) : std::runtime_error(what) {}
};

struct ResolutionTooCoarse : std::runtime_error {
    explicit ResolutionTooCoarse(const std::string& what) : std::runtime_error(what) {}
};

struct BandAboveNyquist : std::runtime_error {
    explicit BandAboveNyquist(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroBand : std::runtime_error {
    explicit ZeroBand(const std::string& what) : std::runtime_error(what) {}
};

struct KBelowFour : std::runtime_error {
    explicit KBelowFour(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewTimeLevels : std::runtime_error {
    explicit TooFewTimeLevels(const std::string& what) : std::runtime_error(what) {}
};

struct BlowupDetected : std::runtime_error {
    explicit BlowupDetected(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteValue : std::runtime_error {
    explicit NonFiniteValue(const std::string& what) : std::runtime_error(what) {}
};

struct TargetGridUnresolved : std::runtime_error {
    explicit TargetGridUnresolved(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroRhs : std::runtime_error {
    explicit ZeroRhs(const std::string& what) : std::runtime_error(what) {}
};

struct ExponentMismatch : std::runtime_error {
    explicit ExponentMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureBudgetExceeded : std::runtime_error {
    explicit QuadratureBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct HypothesisViolated : std::runtime_error {
    explicit HypothesisViolated(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigInvalid : std::runtime_error {
    explicit ConfigInvalid(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dnls

#endif
