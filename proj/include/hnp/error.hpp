#pragma once

#include <stdexcept>
#include <string>

namespace hnp {

/// Raised when an input violates a documented precondition (bad spec, bad
/// config value, unknown action). The CLI maps it to exit status 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation cannot proceed on valid-looking inputs, e.g. a
/// non-finite q-value or a transition that breaks local linearity.
class ComputeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail_validation(const std::string& what) { throw ValidationError(what); }

[[noreturn]] inline void fail_compute(const std::string& what) { throw ComputeError(what); }

} // namespace detail

} // namespace hnp
