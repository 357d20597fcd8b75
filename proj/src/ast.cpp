#include "fl/ast.hpp"

#include <algorithm>

namespace fl {

const char* sort_name(Sort s) {
    switch (s) {
        case Sort::Foreground: return "loc";
        case Sort::SetOfForeground: return "set";
        case Sort::Int: return "int";
        case Sort::Bool: return "bool";
    }
    return "?";
}

std::optional<Sort> parse_sort_name(std::string_view s) {
    if (s == "loc") return Sort::Foreground;
    if (s == "set") return Sort::SetOfForeground;
    if (s == "int") return Sort::Int;
    if (s == "bool") return Sort::Bool;
    return std::nullopt;
}

bool is_term_kind(Kind k) {
    switch (k) {
        case Kind::Const:
        case Kind::Var:
        case Kind::IntLit:
        case Kind::BoolLit:
        case Kind::App:
        case Kind::IteTerm:
        case Kind::SpFormula:
        case Kind::SpTerm:
            return true;
        default:
            return false;
    }
}

bool structurally_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.sort != b.sort || a.sym != b.sym || a.ival != b.ival) return false;
    if (a.kids.size() != b.kids.size() || a.binders != b.binders) return false;
    for (size_t i = 0; i < a.kids.size(); ++i)
        if (!structurally_equal(*a.kids[i], *b.kids[i])) return false;
    return true;
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (!a || !b) return a == b;
    return a == b || structurally_equal(*a, *b);
}

bool is_builtin_function(std::string_view name) {
    return name == "cup" || name == "cap" || name == "compl" || name == "+" || name == "-";
}

bool is_builtin_relation(std::string_view name) {
    return name == "in" || name == "subseteq" || name == "<" || name == "<=" || name == ">" ||
           name == ">=";
}

namespace mk {

static NodePtr make(Kind k, Sort s, Symbol sym, std::vector<NodePtr> kids = {}) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->sort = s;
    n->sym = sym;
    n->kids = std::move(kids);
    return n;
}

NodePtr cnst(std::string_view name, Sort s) { return make(Kind::Const, s, Symbol(name)); }
NodePtr nil() { return cnst("nil"); }
NodePtr empty() { return cnst("emptyset", Sort::SetOfForeground); }
NodePtr var(std::string_view name, Sort s) { return make(Kind::Var, s, Symbol(name)); }
NodePtr var(Symbol name, Sort s) { return make(Kind::Var, s, name); }

NodePtr int_lit(int64_t v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::IntLit;
    n->sort = Sort::Int;
    n->ival = v;
    return n;
}

NodePtr bool_lit(bool v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::BoolLit;
    n->sort = Sort::Bool;
    n->ival = v ? 1 : 0;
    return n;
}

NodePtr app(std::string_view f, std::vector<NodePtr> args, Sort result) {
    return make(Kind::App, result, Symbol(f), std::move(args));
}

NodePtr ite_term(NodePtr g, NodePtr a, NodePtr b) {
    Sort s = a->sort;
    return make(Kind::IteTerm, s, Symbol(), {std::move(g), std::move(a), std::move(b)});
}

NodePtr sp(NodePtr x) {
    Kind k = x->is_term() ? Kind::SpTerm : Kind::SpFormula;
    return make(k, Sort::SetOfForeground, Symbol(), {std::move(x)});
}

NodePtr cup(NodePtr a, NodePtr b) { return app("cup", {std::move(a), std::move(b)}, Sort::SetOfForeground); }
NodePtr cap(NodePtr a, NodePtr b) { return app("cap", {std::move(a), std::move(b)}, Sort::SetOfForeground); }
NodePtr compl_(NodePtr a) { return app("compl", {std::move(a)}, Sort::SetOfForeground); }
NodePtr plus(NodePtr a, NodePtr b) { return app("+", {std::move(a), std::move(b)}, Sort::Int); }
NodePtr minus(NodePtr a, NodePtr b) { return app("-", {std::move(a), std::move(b)}, Sort::Int); }

NodePtr tru() { return make(Kind::True, Sort::Bool, Symbol()); }
NodePtr fls() { return make(Kind::False, Sort::Bool, Symbol()); }
NodePtr eq(NodePtr a, NodePtr b) { return make(Kind::Eq, Sort::Bool, Symbol(), {std::move(a), std::move(b)}); }
NodePtr neq(NodePtr a, NodePtr b) { return not_(eq(std::move(a), std::move(b))); }
NodePtr rel(std::string_view r, std::vector<NodePtr> args) {
    return make(Kind::Rel, Sort::Bool, Symbol(r), std::move(args));
}
NodePtr in(NodePtr t, NodePtr set) { return rel("in", {std::move(t), std::move(set)}); }
NodePtr notin(NodePtr t, NodePtr set) { return not_(in(std::move(t), std::move(set))); }
NodePtr subseteq(NodePtr a, NodePtr b) { return rel("subseteq", {std::move(a), std::move(b)}); }
NodePtr and_(NodePtr a, NodePtr b) { return make(Kind::And, Sort::Bool, Symbol(), {std::move(a), std::move(b)}); }

NodePtr and_(std::vector<NodePtr> parts) {
    if (parts.empty()) return tru();
    NodePtr acc = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) acc = and_(acc, parts[i]);
    return acc;
}

NodePtr or_(NodePtr a, NodePtr b) { return make(Kind::Or, Sort::Bool, Symbol(), {std::move(a), std::move(b)}); }
NodePtr not_(NodePtr a) { return make(Kind::Not, Sort::Bool, Symbol(), {std::move(a)}); }
NodePtr implies(NodePtr a, NodePtr b) {
    return make(Kind::Implies, Sort::Bool, Symbol(), {std::move(a), std::move(b)});
}
NodePtr ite(NodePtr g, NodePtr a, NodePtr b) {
    return make(Kind::Ite, Sort::Bool, Symbol(), {std::move(g), std::move(a), std::move(b)});
}

NodePtr exists(std::vector<Binder> bs, NodePtr guard, NodePtr body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Exists;
    n->binders = std::move(bs);
    n->kids = {std::move(guard), std::move(body)};
    return n;
}

NodePtr forall(std::vector<Binder> bs, NodePtr guard, NodePtr body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Forall;
    n->binders = std::move(bs);
    n->kids = {std::move(guard), std::move(body)};
    return n;
}

NodePtr star(NodePtr a, NodePtr b) {
    auto disjoint = eq(cap(sp(a), sp(b)), empty());
    return and_(and_(a, b), disjoint);
}

NodePtr with_kids(const Node& n, std::vector<NodePtr> kids) {
    auto c = std::make_shared<Node>(n);
    c->kids = std::move(kids);
    return c;
}

}  // namespace mk

Signature::Signature() { constants_.push_back({"nil", Sort::Foreground}); }

void Signature::add_constant(const std::string& name, Sort s) {
    if (constant(name) || function(name) || relation(name))
        throw Error(ErrorCode::InvalidInput, "duplicate symbol " + name);
    if (s == Sort::SetOfForeground)
        throw Error(ErrorCode::SortMismatch, "constant " + name + " may not have set sort");
    constants_.push_back({name, s});
}

void Signature::add_function(const FunctionDecl& f) {
    if (constant(f.name) || function(f.name) || relation(f.name) || is_builtin_function(f.name))
        throw Error(ErrorCode::InvalidInput, "duplicate symbol " + f.name);
    if (f.args.empty()) throw Error(ErrorCode::InvalidInput, "function " + f.name + " needs arguments");
    bool has_fg = false;
    for (Sort s : f.args) {
        if (s == Sort::SetOfForeground)
            throw Error(ErrorCode::SortMismatch, "function " + f.name + " involves the set sort");
        has_fg |= s == Sort::Foreground;
    }
    if (f.result == Sort::SetOfForeground)
        throw Error(ErrorCode::SortMismatch, "function " + f.name + " involves the set sort");
    if (f.is_mutable && !has_fg)
        throw Error(ErrorCode::InvalidInput, "mutable function " + f.name + " needs a loc argument");
    functions_.push_back(f);
}

void Signature::add_relation(const RelationDecl& r) {
    if (constant(r.name) || function(r.name) || relation(r.name) || is_builtin_relation(r.name))
        throw Error(ErrorCode::InvalidInput, "duplicate symbol " + r.name);
    for (Sort s : r.args)
        if (s == Sort::SetOfForeground)
            throw Error(ErrorCode::SortMismatch, "relation " + r.name + " involves the set sort");
    relations_.push_back(r);
}

void Signature::add_variable(const std::string& name, Sort s) {
    for (auto& [n, so] : variables_)
        if (n == name) {
            so = s;
            return;
        }
    variables_.emplace_back(name, s);
}

const ConstantDecl* Signature::constant(std::string_view name) const {
    for (auto& c : constants_)
        if (c.name == name) return &c;
    return nullptr;
}

const FunctionDecl* Signature::function(std::string_view name) const {
    for (auto& f : functions_)
        if (f.name == name) return &f;
    return nullptr;
}

const RelationDecl* Signature::relation(std::string_view name) const {
    for (auto& r : relations_)
        if (r.name == name) return &r;
    return nullptr;
}

std::optional<Sort> Signature::variable(std::string_view name) const {
    if (name == kUniverseVar) return Sort::SetOfForeground;
    for (auto& [n, s] : variables_)
        if (n == name) return s;
    return std::nullopt;
}

int Signature::function_index(std::string_view name) const {
    for (size_t i = 0; i < functions_.size(); ++i)
        if (functions_[i].name == name) return static_cast<int>(i);
    return -1;
}

int Signature::constant_index(std::string_view name) const {
    for (size_t i = 0; i < constants_.size(); ++i)
        if (constants_[i].name == name) return static_cast<int>(i);
    return -1;
}

int Signature::relation_index(std::string_view name) const {
    for (size_t i = 0; i < relations_.size(); ++i)
        if (relations_[i].name == name) return static_cast<int>(i);
    return -1;
}

const FunctionDecl* Signature::first_mutable_unary() const {
    const FunctionDecl* best = nullptr;
    for (auto& f : functions_)
        if (f.is_mutable && f.args.size() == 1 && (!best || f.name < best->name)) best = &f;
    return best;
}

void DefinitionSet::add(Definition d) {
    if (index_.count(d.name))
        throw Error(ErrorCode::DuplicateDefinition, "definition " + d.name + " given twice");
    index_[d.name] = static_cast<int>(defs_.size());
    defs_.push_back(std::move(d));
}

const Definition* DefinitionSet::find(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &defs_[it->second];
}

int DefinitionSet::index(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

void DefinitionSet::merge(const DefinitionSet& other) {
    for (auto& d : other.defs_)
        if (!find(d.name)) add(d);
}

}  // namespace fl
