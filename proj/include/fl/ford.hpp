#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fl/ast.hpp"
#include "fl/model.hpp"
#include "fl/semantics.hpp"

namespace fl {

// A first-order program with recursive definitions: no Sp terms, no set-sorted positions.
struct FordProgram {
    DefinitionSet defs;      // translated inductive definitions and generated support relations
    NodePtr formula;         // translated main formula
    std::string root;        // support relation of the input formula
    std::vector<Binder> root_params;  // leading parameters of root; the last one is the location
};

// Generated support relations for n (and everything it reaches) are appended to out.defs.
// Returns the relation name for n, or "" when Sp(n) is empty in every model.
class SupportRelations {
public:
    SupportRelations(const Signature& sig, const DefinitionSet& defs, DefinitionSet& out);
    // always: generate a relation even when its body is trivially false
    std::string relation(const NodePtr& n, bool always = false);
    // the atom Sp_n(fv(n), z), or false
    NodePtr call(const NodePtr& n, const NodePtr& z);
    // membership of z in a set-sorted term
    NodePtr member(const NodePtr& set, const NodePtr& z);
    NodePtr translate(const NodePtr& n);

private:
    NodePtr body(const NodePtr& n, const NodePtr& z);
    NodePtr call_def(const std::string& def, std::vector<NodePtr> args, const NodePtr& z);
    bool trivial(const NodePtr& n) const;
    std::string next_name();

    const Signature& sig_;
    const DefinitionSet& defs_;
    DefinitionSet& out_;
    std::map<const Node*, std::string> memo_;
    std::map<std::string, std::string> def_memo_;
    std::vector<NodePtr> keep_;
    int counter_ = 0;
};

FordProgram generate_support_relations(const Signature& sig, const DefinitionSet& defs, const NodePtr& formula);
FordProgram translate_formula(const Signature& sig, const DefinitionSet& defs, const NodePtr& formula);

// least-fixpoint evaluation of the translated program
bool eval_ford(const PreModel& pre, const Assignment& a, const FordProgram& p);

// reusable evaluator for one pre-model
class FordModel {
public:
    FordModel(std::shared_ptr<const PreModel> pre, const FordProgram& p);
    bool eval(const Assignment& a) const;
    // locations u with root(a, u)
    LocSet support(const Assignment& a) const;

private:
    const FordProgram& p_;
    FrameModel fm_;
};

// declarations, definitions and the goal, in the input file syntax
std::string print(const FordProgram& p, const Signature& sig);

}  // namespace fl
