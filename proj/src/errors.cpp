#include "fl/errors.hpp"

namespace fl {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::UnknownSymbol: return "UnknownSymbol";
        case ErrorCode::SortMismatch: return "SortMismatch";
        case ErrorCode::IllegalMutation: return "IllegalMutation";
        case ErrorCode::UniverseMismatch: return "UniverseMismatch";
        case ErrorCode::BoundsTooLarge: return "BoundsTooLarge";
        case ErrorCode::DomainOverflow: return "DomainOverflow";
        case ErrorCode::FixpointDiverged: return "FixpointDiverged";
        case ErrorCode::UnboundVariable: return "UnboundVariable";
        case ErrorCode::UntranslatableSpPosition: return "UntranslatableSpPosition";
        case ErrorCode::RequiresInvariant: return "RequiresInvariant";
        case ErrorCode::FuelExhausted: return "FuelExhausted";
        case ErrorCode::NoMinimum: return "NoMinimum";
        case ErrorCode::DuplicateDefinition: return "DuplicateDefinition";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Error";
}

std::string SourceSpan::str() const {
    std::string s = file.empty() ? "<input>" : file;
    return s + ":" + std::to_string(line) + ":" + std::to_string(column);
}

static std::string parse_message(const SourceSpan& span, const std::string& msg,
                                  const std::vector<std::string>& expected) {
    std::string m = span.str() + ": " + msg;
    if (!expected.empty()) {
        m += " (expected ";
        for (size_t i = 0; i < expected.size(); ++i) {
            if (i) m += ", ";
            m += expected[i];
        }
        m += ")";
    }
    return m;
}

ParseError::ParseError(SourceSpan span, const std::string& msg, std::vector<std::string> expected)
    : Error(ErrorCode::ParseError, parse_message(span, msg, expected)),
      span_(std::move(span)),
      expected_(std::move(expected)) {}

}  // namespace fl
