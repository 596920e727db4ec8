#ifndef SECDET_ERRORS_HPP
#define SECDET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace secdet {

// A measurement value a discrete model cannot score.
struct OutOfSupport : std::domain_error {
    explicit OutOfSupport(const std::string& what) : std::domain_error(what) {}
};

// The two hypothesis measures are numerically indistinguishable.
struct DegeneratePair : std::invalid_argument {
    explicit DegeneratePair(const std::string& what) : std::invalid_argument(what) {}
};

// Argument outside the domain of a curve / branch.
struct RangeError : std::domain_error {
    explicit RangeError(const std::string& what) : std::domain_error(what) {}
};

// Operation requires a measurement model the pair does not provide
// (e.g. counting rules need binary support).
struct UnsupportedPair : std::invalid_argument {
    explicit UnsupportedPair(const std::string& what) : std::invalid_argument(what) {}
};

// Invalid or inconsistent scenario configuration.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Not enough usable points to fit an exponent.
struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace secdet

#endif
