#pragma once

#include <stdexcept>
#include <string>

namespace mimfrac {

/// Input that violates a documented bound or format (bad parameters, bad config,
/// off-grid observation point, misaligned time stamps).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure produced a non-finite value, failed to converge, or hit
/// a singular system.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reading or writing an artifact failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mimfrac
