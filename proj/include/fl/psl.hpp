#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fl/ast.hpp"
#include "fl/model.hpp"
#include "fl/validate.hpp"

namespace fl {

// Not and Or are outside the fragment; they exist so that validate_psl can reject them.
enum class SLKind { Stack, Emp, PointsTo, Ite, And, Star, Pred, ExistsPointsTo, Not, Or };

struct SLNode;
using SLPtr = std::shared_ptr<const SLNode>;

struct SLNode {
    SLKind kind = SLKind::Emp;
    NodePtr sf;          // Stack, Ite condition
    NodePtr x, y;        // PointsTo / ExistsPointsTo source and target (variables or nil)
    std::string field;   // PointsTo / ExistsPointsTo
    std::string name;    // Pred name, ExistsPointsTo bound variable
    std::vector<SLPtr> kids;
    Span span;
};

namespace sl {
SLPtr stack(NodePtr sf);
SLPtr emp();
SLPtr points_to(NodePtr x, const std::string& f, NodePtr y);
SLPtr ite(NodePtr sf, SLPtr a, SLPtr b);
SLPtr and_(SLPtr a, SLPtr b);
SLPtr star(SLPtr a, SLPtr b);
SLPtr pred(const std::string& name, NodePtr arg);
// exists y. (x |-f-> y) * body
SLPtr exists_points_to(const std::string& y, NodePtr x, const std::string& f, SLPtr body);
SLPtr not_(SLPtr a);
SLPtr or_(SLPtr a, SLPtr b);
}  // namespace sl

bool structurally_equal(const SLPtr& a, const SLPtr& b);

struct SLDefinition {
    std::string name;
    std::string param;
    SLPtr body;
    Span span;
};

class SLDefinitionSet {
public:
    void add(SLDefinition d);
    const SLDefinition* find(std::string_view name) const;
    const std::vector<SLDefinition>& all() const { return defs_; }
    bool empty() const { return defs_.empty(); }

private:
    std::vector<SLDefinition> defs_;
};


// A heaplet: the cells in dom with field values read from model. Cells outside dom are ignored.
struct Heaplet {
    LocSet dom = 0;
    std::shared_ptr<const PreModel> model;
};

// graph inclusion: a's cells are b's cells with the same field values
bool heaplet_included(const Heaplet& a, const Heaplet& b);
bool heaplet_equal(const Heaplet& a, const Heaplet& b);
std::string format_heaplet(const Heaplet& h);

enum class Completion { Nil, Self };
// the total model M_{s,h}: fields agree with h on dom, cells outside dom map to nil (or to themselves)
PreModel complete_heaplet(const Heaplet& h, Completion mode = Completion::Nil);

ValidationReport validate_psl(const Signature& sig, const SLDefinitionSet& defs, const SLPtr& phi);
ValidationReport validate_psl_defs(const Signature& sig, const SLDefinitionSet& defs);

// s, h |= phi. Predicates are interpreted by least fixpoint.
class SLEvaluator {
public:
    SLEvaluator(std::shared_ptr<const PreModel> model, const SLDefinitionSet& defs);
    bool eval(const SLPtr& phi, const Assignment& store, LocSet dom) const;
    bool pred(const std::string& name, int arg, LocSet dom) const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

bool eval_sl(const Assignment& store, const Heaplet& h, const SLPtr& phi, const SLDefinitionSet& defs = {});

// P(phi) as a stack formula. With simplify, true/false operands are folded away.
NodePtr precision(const SLPtr& phi, bool simplify = true);

struct PslTranslation {
    NodePtr formula;
    DefinitionSet defs;
};
// T(phi); each predicate I becomes an FL definition with body T(rho_I)
PslTranslation translate_psl(const SLPtr& phi, const SLDefinitionSet& defs);
DefinitionSet translate_psl_defs(const SLDefinitionSet& defs);

// all heaplets over the mutable unary fields of sig at this size, with cells outside dom mapped to nil
std::vector<Heaplet> enumerate_heaplets(std::shared_ptr<const Signature> sig, int fg_size, IntRange ints,
                                        const PreModel* store_model = nullptr);

// the least satisfying heaplet over all heaplets, nullopt if none; NoMinimum if satisfying heaplets have no least one
std::optional<Heaplet> minimum_heap(const Assignment& store, const SLPtr& phi, const SLDefinitionSet& defs,
                                    const std::vector<Heaplet>& all_heaplets);
// the least satisfying sub-heaplet of h
std::optional<Heaplet> minimum_subheap(const Assignment& store, const Heaplet& h, const SLPtr& phi,
                                       const SLDefinitionSet& defs);

// For every total model and parameter value, at most one sub-heaplet satisfies I.
// With literal, any two satisfying heaplets (not only sub-heaplets of one model) must coincide.
ValidationReport check_unique_heaplets(std::shared_ptr<const Signature> sig, const SLDefinitionSet& defs,
                                       int fg_size, IntRange ints, bool literal = false);

}  // namespace fl
