#pragma once

#include <map>
#include <set>
#include <string>

#include "fl/ast.hpp"

namespace fl {

using VarSorts = std::map<std::string, Sort>;

VarSorts free_variables(const NodePtr& n);
// every variable name occurring anywhere, bound or free
std::set<std::string> all_variable_names(const NodePtr& n);

// simultaneous substitution of free occurrences; binders that would capture are renamed
NodePtr substitute(const NodePtr& n, const std::map<std::string, NodePtr>& m);
NodePtr substitute(const NodePtr& n, const std::string& x, const NodePtr& t);

NodePtr alpha_normalize(const NodePtr& n);

// Or, Implies, False and Forall rewritten into And/Not/Exists/True
NodePtr desugar(const NodePtr& n);

// name of the form base#k not in avoid
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// every function/relation symbol applied anywhere below n
void collect_symbols(const NodePtr& n, std::set<std::string>& functions, std::set<std::string>& relations);

}  // namespace fl
