#include "hyperprob/error.hpp"

namespace hyperprob {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::RowSum: return "RowSumError";
        case ErrorKind::NoEnabledAction: return "NoEnabledAction";
        case ErrorKind::DanglingReference: return "DanglingReference";
        case ErrorKind::IncompatibleScheduler: return "IncompatibleScheduler";
        case ErrorKind::ArityZero: return "ArityZero";
        case ErrorKind::Syntax: return "SyntaxError";
        case ErrorKind::UnknownProposition: return "UnknownProposition";
        case ErrorKind::UnboundStateVariable: return "UnboundStateVariable";
        case ErrorKind::UnboundSchedulerVariable: return "UnboundSchedulerVariable";
        case ErrorKind::QuantifierOrderViolation: return "QuantifierOrderViolation";
        case ErrorKind::DuplicateVariable: return "DuplicateVariable";
        case ErrorKind::CapExceeded: return "CapExceeded";
        case ErrorKind::IllFormed: return "IllFormed";
        case ErrorKind::MixedSchedulerBlock: return "MixedSchedulerBlock";
        case ErrorKind::Bound: return "BoundError";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::IncompleteModel: return "IncompleteModel";
        case ErrorKind::Io: return "IoError";
        case ErrorKind::InvalidParameter: return "InvalidParameter";
        case ErrorKind::Solver: return "SolverError";
    }
    return "Error";
}

}  // namespace hyperprob
