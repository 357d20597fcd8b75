#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fl/ast.hpp"
#include "fl/model.hpp"
#include "fl/psl.hpp"
#include "fl/whilelang.hpp"

namespace fl {

// Reference interpretation of inductive relations and supports, computed by full-table sweeps.
struct NaiveFixpoint {
    std::vector<std::vector<uint8_t>> truth;   // per definition, indexed like PreModel::tuple_index
    std::vector<std::vector<LocSet>> support;  // same layout
    int sweeps = 0;
};

NaiveFixpoint naive_fixpoint(const PreModel& pre, const DefinitionSet& defs);

bool naive_eval(const PreModel& pre, const DefinitionSet& defs, const NaiveFixpoint& fp, const NodePtr& f,
                const Assignment& a);
Value naive_term(const PreModel& pre, const DefinitionSet& defs, const NaiveFixpoint& fp, const NodePtr& t,
                 const Assignment& a);
LocSet naive_support(const PreModel& pre, const DefinitionSet& defs, const NaiveFixpoint& fp, const NodePtr& n,
                     const Assignment& a);

// nodes reachable from start along the given unary fields, nil excluded
LocSet reachable(const PreModel& pre, int start, const std::vector<std::string>& fields);

struct ConfigBounds {
    int fg_size = 3;
    IntRange ints{-2, 2};
    ModelFilter filter;
    bool vary_unallocated = true;  // false: U is always empty
};

// Calls visit on every valid configuration over the given store variables; stops when visit returns false.
// Configurations never have nil in H.
void enumerate_configs(std::shared_ptr<const Signature> sig, const std::vector<Binder>& vars,
                       const ConfigBounds& bounds, const std::function<bool(const Configuration&)>& visit);

// every assignment of the given variables over the model's domains
void enumerate_assignments(const PreModel& m, const std::vector<Binder>& vars,
                           const std::function<bool(const Assignment&)>& visit);

}  // namespace fl
