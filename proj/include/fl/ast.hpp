#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fl/errors.hpp"
#include "fl/symbol.hpp"

namespace fl {

enum class Sort : uint8_t { Foreground, SetOfForeground, Int, Bool };

const char* sort_name(Sort s);
std::optional<Sort> parse_sort_name(std::string_view s);

enum class Kind : uint8_t {
    // terms
    Const,
    Var,
    IntLit,
    BoolLit,
    App,
    IteTerm,
    SpFormula,
    SpTerm,
    // formulas
    True,
    False,
    Eq,
    Rel,
    And,
    Or,
    Not,
    Implies,
    Ite,
    Exists,
    Forall,
};

bool is_term_kind(Kind k);

struct Binder {
    Symbol var;
    Sort sort = Sort::Foreground;
    bool operator==(const Binder& o) const { return var == o.var && sort == o.sort; }
};

struct Span {
    int line = 0;
    int column = 0;
    int length = 0;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// One node type for terms and formulas. Terms carry their sort; formulas have sort Bool.
// Built-in set and arithmetic operators are App/Rel nodes with reserved names:
//   App: cup cap compl + -     Const: nil emptyset     Rel: in subseteq < <= > >=
// The variable U (set sort) denotes the allocatable set of a configuration.
struct Node {
    Kind kind;
    Sort sort = Sort::Bool;
    Symbol sym;
    int64_t ival = 0;
    std::vector<NodePtr> kids;
    std::vector<Binder> binders;
    Span span;

    bool is_term() const { return is_term_kind(kind); }
    const std::string& name() const { return sym.str(); }
};

bool structurally_equal(const Node& a, const Node& b);
bool structurally_equal(const NodePtr& a, const NodePtr& b);

bool is_builtin_function(std::string_view name);
bool is_builtin_relation(std::string_view name);
inline const char* kUniverseVar = "U";

namespace mk {
NodePtr cnst(std::string_view name, Sort s = Sort::Foreground);
NodePtr nil();
NodePtr empty();
NodePtr var(std::string_view name, Sort s = Sort::Foreground);
NodePtr var(Symbol name, Sort s);
NodePtr int_lit(int64_t v);
NodePtr bool_lit(bool v);
NodePtr app(std::string_view f, std::vector<NodePtr> args, Sort result);
NodePtr ite_term(NodePtr g, NodePtr a, NodePtr b);
NodePtr sp(NodePtr formula_or_term);
NodePtr cup(NodePtr a, NodePtr b);
NodePtr cap(NodePtr a, NodePtr b);
NodePtr compl_(NodePtr a);
NodePtr plus(NodePtr a, NodePtr b);
NodePtr minus(NodePtr a, NodePtr b);

NodePtr tru();
NodePtr fls();
NodePtr eq(NodePtr a, NodePtr b);
NodePtr neq(NodePtr a, NodePtr b);
NodePtr rel(std::string_view r, std::vector<NodePtr> args);
NodePtr in(NodePtr t, NodePtr set);
NodePtr notin(NodePtr t, NodePtr set);
NodePtr subseteq(NodePtr a, NodePtr b);
NodePtr and_(NodePtr a, NodePtr b);
NodePtr and_(std::vector<NodePtr> parts);
NodePtr or_(NodePtr a, NodePtr b);
NodePtr not_(NodePtr a);
NodePtr implies(NodePtr a, NodePtr b);
NodePtr ite(NodePtr g, NodePtr a, NodePtr b);
NodePtr exists(std::vector<Binder> bs, NodePtr guard, NodePtr body);
NodePtr forall(std::vector<Binder> bs, NodePtr guard, NodePtr body);
// Star(a, b) = a && b && Sp(a) cap Sp(b) = emptyset
NodePtr star(NodePtr a, NodePtr b);

NodePtr with_kids(const Node& n, std::vector<NodePtr> kids);
}  // namespace mk

struct FunctionDecl {
    std::string name;
    std::vector<Sort> args;
    Sort result = Sort::Foreground;
    bool is_mutable = false;
};

struct RelationDecl {
    std::string name;
    std::vector<Sort> args;
};

struct ConstantDecl {
    std::string name;
    Sort sort = Sort::Foreground;
};

class Signature {
public:
    Signature();

    void add_constant(const std::string& name, Sort s);
    void add_function(const FunctionDecl& f);
    void add_relation(const RelationDecl& r);
    void add_variable(const std::string& name, Sort s);

    const ConstantDecl* constant(std::string_view name) const;
    const FunctionDecl* function(std::string_view name) const;
    const RelationDecl* relation(std::string_view name) const;
    std::optional<Sort> variable(std::string_view name) const;

    int function_index(std::string_view name) const;
    int constant_index(std::string_view name) const;
    int relation_index(std::string_view name) const;

    const std::vector<ConstantDecl>& constants() const { return constants_; }
    const std::vector<FunctionDecl>& functions() const { return functions_; }
    const std::vector<RelationDecl>& relations() const { return relations_; }
    const std::vector<std::pair<std::string, Sort>>& variables() const { return variables_; }

    // lexicographically first mutable unary function
    const FunctionDecl* first_mutable_unary() const;

private:
    std::vector<ConstantDecl> constants_;
    std::vector<FunctionDecl> functions_;
    std::vector<RelationDecl> relations_;
    std::vector<std::pair<std::string, Sort>> variables_;
};

struct Definition {
    std::string name;
    std::vector<Binder> params;
    NodePtr body;
    int stratum = 0;
    Span span;
};

class DefinitionSet {
public:
    void add(Definition d);
    const Definition* find(std::string_view name) const;
    int index(std::string_view name) const;
    const std::vector<Definition>& all() const { return defs_; }
    size_t size() const { return defs_.size(); }
    bool empty() const { return defs_.empty(); }
    // adds every definition of other not already present
    void merge(const DefinitionSet& other);
    void set_stratum(size_t i, int s) { defs_[i].stratum = s; }

private:
    std::vector<Definition> defs_;
    std::map<std::string, int, std::less<>> index_;
};

}  // namespace fl
