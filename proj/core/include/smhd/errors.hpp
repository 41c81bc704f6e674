#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace smhd {

// Bad argument to an operation (non-positive cutoff, mismatched bases, ...).
class InvalidParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A noise model that does not satisfy the standing hypotheses (e.g. L >= 1).
class HypothesisViolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configuration combination the harness does not support
// (e.g. stability mode with state-dependent noise).
class UnsupportedConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite state encountered during time integration.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double time, std::uint32_t path, const std::string& what)
        : std::runtime_error(what), time_(time), path_(path) {}
    double time() const { return time_; }
    std::uint32_t path_index() const { return path_; }

private:
    double time_;
    std::uint32_t path_;
};

class ConfigParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace smhd
