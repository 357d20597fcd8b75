#pragma once

#include <string>
#include <vector>

#include "fl/ast.hpp"

namespace fl {

struct Violation {
    std::string rule;
    std::string path;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    bool has(const std::string& rule) const;
    std::string str() const;
};

// Throws UnknownSymbol for undeclared functions, relations or constants.
ValidationReport validate(const Signature& sig, const DefinitionSet& defs, const NodePtr& formula);
ValidationReport validate_defs(const Signature& sig, const DefinitionSet& defs);

// assigns strata so that negative uses outside Sp point to strictly lower strata
void stratify(DefinitionSet& defs);

// formula free of inductive relations and set-sorted terms (U excepted)
bool is_guard(const DefinitionSet& defs, const NodePtr& formula);

}  // namespace fl
