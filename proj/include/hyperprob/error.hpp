#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperprob {

enum class ErrorKind {
    Parse,
    RowSum,
    NoEnabledAction,
    DanglingReference,
    IncompatibleScheduler,
    ArityZero,
    Syntax,
    UnknownProposition,
    UnboundStateVariable,
    UnboundSchedulerVariable,
    QuantifierOrderViolation,
    DuplicateVariable,
    CapExceeded,
    IllFormed,
    MixedSchedulerBlock,
    Bound,
    SingularSystem,
    IncompleteModel,
    Io,
    InvalidParameter,
    Solver,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every recoverable failure in the library. The kind is
/// machine readable; what() carries the human readable context (file, line).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace hyperprob
