#pragma once

#include <stdexcept>
#include <string>

namespace gcm {

/// Arguments violate an operation's preconditions (bad shapes, empty pools,
/// out-of-range values, degenerate inputs).
class invalid_input_error : public std::runtime_error {
public:
    explicit invalid_input_error(const std::string& what) : std::runtime_error(what) {}
};

/// A pipeline stage is wired up wrong: missing models, contradictory or
/// incomplete configuration.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem-level failure; the message names the offending path.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerically unusable input (indefinite covariance, non-finite values)
/// detected beyond the documented tolerances.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gcm
