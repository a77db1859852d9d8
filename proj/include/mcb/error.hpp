#pragma once

#include <stdexcept>
#include <string>

namespace mcb {

// Machine-parsable error codes. The CLI prints code_name(code) on exit,
// so names here are part of the external interface.
enum class ErrorCode {
    NotSquare,
    NegativeEntry,
    ColumnNotStochastic,
    NotIrreducible,
    NotErgodic,
    NoConvergence,
    SingularSystem,
    Overflow,
    OutOfRange,
    WrongSide,
    SupportMismatch,
    ConsistencyFailure,
    HiddenChain,
    DegenerateGenerator,
    BudgetExceeded,
    BadInput,
};

inline const char* code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NotSquare: return "NotSquare";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::ColumnNotStochastic: return "ColumnNotStochastic";
        case ErrorCode::NotIrreducible: return "NotIrreducible";
        case ErrorCode::NotErgodic: return "NotErgodic";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::WrongSide: return "WrongSide";
        case ErrorCode::SupportMismatch: return "SupportMismatch";
        case ErrorCode::ConsistencyFailure: return "ConsistencyFailure";
        case ErrorCode::HiddenChain: return "HiddenChain";
        case ErrorCode::DegenerateGenerator: return "DegenerateGenerator";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::BadInput: return "BadInput";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace mcb
