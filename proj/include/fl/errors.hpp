#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fl {

enum class ErrorCode {
    UnknownSymbol,
    SortMismatch,
    IllegalMutation,
    UniverseMismatch,
    BoundsTooLarge,
    DomainOverflow,
    FixpointDiverged,
    UnboundVariable,
    UntranslatableSpPosition,
    RequiresInvariant,
    FuelExhausted,
    NoMinimum,
    DuplicateDefinition,
    InvalidInput,
    ParseError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct SourceSpan {
    std::string file;
    int line = 0;
    int column = 0;
    int length = 0;
    std::string str() const;
};

class ParseError : public Error {
public:
    ParseError(SourceSpan span, const std::string& msg, std::vector<std::string> expected = {});
    const SourceSpan& span() const { return span_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    SourceSpan span_;
    std::vector<std::string> expected_;
};

}  // namespace fl
