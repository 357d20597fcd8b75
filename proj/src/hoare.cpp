#include "fl/hoare.hpp"

#include <json.hpp>

#include "fl/rewrite.hpp"
#include "fl/semantics.hpp"
#include "fl/textio.hpp"
#include "fl/validate.hpp"

namespace fl {

namespace {

NodePtr any_of(const std::vector<NodePtr>& parts) {
    NodePtr out;
    for (auto& p : parts) {
        if (p->kind == Kind::False) continue;
        if (p->kind == Kind::True) return p;
        out = out ? mk::or_(out, p) : p;
    }
    return out ? out : mk::fls();
}

NodePtr iff(const NodePtr& a, const NodePtr& b) {
    return mk::or_(mk::and_(a, b), mk::and_(mk::not_(a), mk::not_(b)));
}

[[noreturn]] void untranslatable(const NodePtr& n, const std::string& why) {
    throw Error(ErrorCode::UntranslatableSpPosition, why + ": " + print(n));
}

NodePtr default_value(Sort s) {
    switch (s) {
        case Sort::Int: return mk::int_lit(0);
        case Sort::Bool: return mk::bool_lit(false);
        case Sort::SetOfForeground: return mk::empty();
        default: return mk::nil();
    }
}

bool is_sp(const NodePtr& n) { return n->kind == Kind::SpFormula || n->kind == Kind::SpTerm; }

NodePtr rebuild(const NodePtr& n, const std::function<NodePtr(const NodePtr&)>& f) {
    if (n->kids.empty()) return n;
    std::vector<NodePtr> kids;
    bool changed = false;
    for (auto& k : n->kids) {
        kids.push_back(f(k));
        changed |= kids.back() != k;
    }
    return changed ? mk::with_kids(*n, std::move(kids)) : n;
}

std::vector<Binder> free_binders(const NodePtr& n, bool allow_sets = false) {
    std::vector<Binder> out;
    for (auto& [name, s] : free_variables(n)) {
        if (s == Sort::SetOfForeground && !allow_sets) untranslatable(n, "set-sorted variable " + name);
        out.push_back({Symbol(name), s});
    }
    return out;
}

}  // namespace

ProgramLogic::ProgramLogic(std::shared_ptr<const Signature> sig, DefinitionSet defs)
    : sig_(std::move(sig)), defs_(std::move(defs)) {
    for (auto& c : sig_->constants()) used_.insert(c.name);
    for (auto& f : sig_->functions()) used_.insert(f.name);
    for (auto& r : sig_->relations()) used_.insert(r.name);
    for (auto& [v, s] : sig_->variables()) used_.insert(v);
    for (auto& d : defs_.all()) {
        used_.insert(d.name);
        for (auto& p : d.params) used_.insert(p.var.str());
        auto names = all_variable_names(d.body);
        used_.insert(names.begin(), names.end());
    }
    used_.insert(kUniverseVar);
}

std::shared_ptr<const DefinitionSet> ProgramLogic::defs() const {
    auto d = std::make_shared<DefinitionSet>(defs_);
    stratify(*d);
    return d;
}

std::string ProgramLogic::fresh(const std::string& base, const NodePtr& around) {
    if (around) {
        auto names = all_variable_names(around);
        used_.insert(names.begin(), names.end());
    }
    std::string n = fresh_name(base, used_);
    used_.insert(n);
    return n;
}

void ProgramLogic::put(const Definition& d) {
    if (!defs_.find(d.name)) {
        defs_.add(d);
        return;
    }
    DefinitionSet rebuilt;
    for (auto& e : defs_.all()) rebuilt.add(e.name == d.name ? d : e);
    defs_ = std::move(rebuilt);
}

bool ProgramLogic::trivial(const NodePtr& n) const {
    if (n->kind == Kind::App) {
        auto* f = sig_->function(n->name());
        if (f && f->is_mutable) return false;
    }
    if (n->kind == Kind::Rel && defs_.find(n->name())) return false;
    for (auto& k : n->kids)
        if (!trivial(k)) return false;
    return true;
}

// ---- mutation ----

struct ProgramLogic::MwCtx {
    std::string f;
    NodePtr x;
    NodePtr rhs;
};

NodePtr ProgramLogic::mw(MwCtx& c, const NodePtr& n) {
    if (n->kind == Kind::App && n->name() == c.f) {
        NodePtr t = mw(c, n->kids[0]);
        Sort rs = n->sort;
        NodePtr fx = mk::app(c.f, {c.x}, rs);
        return mk::ite_term(mk::eq(t, c.x), mk::ite_term(mk::eq(fx, fx), c.rhs, c.rhs), mk::app(c.f, {t}, rs));
    }
    if (n->kind == Kind::Rel && defs_.find(n->name())) {
        std::vector<NodePtr> args;
        for (auto& k : n->kids) args.push_back(mw(c, k));
        args.push_back(c.x);
        args.push_back(c.rhs);
        return mk::rel(mw_def(n->name(), c.f, c.rhs->sort), std::move(args));
    }
    return rebuild(n, [&](const NodePtr& k) { return mw(c, k); });
}

std::string ProgramLogic::mw_def(const std::string& def, const std::string& f, Sort rhs_sort) {
    std::string key = def + "#mw_" + f;
    auto it = derived_.find(key);
    if (it != derived_.end()) return it->second;
    std::string name = used_.count(key) ? fresh(key) : key;
    used_.insert(name);
    derived_[key] = name;
    const Definition d = *defs_.find(def);
    auto names = all_variable_names(d.body);
    for (auto& p : d.params) names.insert(p.var.str());
    std::string xp = fresh_name("x", names);
    names.insert(xp);
    std::string yp = fresh_name("y", names);
    auto params = d.params;
    params.push_back({Symbol(xp), Sort::Foreground});
    params.push_back({Symbol(yp), rhs_sort});
    put(Definition{name, params, mk::fls(), 0, {}});
    MwCtx c{f, mk::var(xp), mk::var(yp, rhs_sort)};
    put(Definition{name, params, mw(c, d.body), 0, {}});
    return name;
}

namespace {

// renames quantified variables that appear in names
NodePtr rename_bound(const NodePtr& n, const std::set<std::string>& names, ProgramLogic& logic) {
    if (n->kind == Kind::Exists || n->kind == Kind::Forall) {
        std::map<std::string, NodePtr> m;
        auto bs = n->binders;
        for (auto& b : bs)
            if (names.count(b.var.str())) {
                auto nn = logic.fresh(b.var.str());
                m[b.var.str()] = mk::var(nn, b.sort);
                b.var = Symbol(nn);
            }
        std::vector<NodePtr> kids;
        for (auto& k : n->kids) kids.push_back(rename_bound(m.empty() ? k : substitute(k, m), names, logic));
        auto c = std::make_shared<Node>(*n);
        c->binders = bs;
        c->kids = std::move(kids);
        return c;
    }
    return rebuild(n, [&](const NodePtr& k) { return rename_bound(k, names, logic); });
}

}  // namespace

NodePtr ProgramLogic::mw_mutation(const std::string& x, const std::string& f, const NodePtr& rhs,
                                  const NodePtr& beta) {
    auto* fd = sig_->function(f);
    if (!fd || !fd->is_mutable || fd->args.size() != 1 || fd->args[0] != Sort::Foreground)
        throw Error(ErrorCode::IllegalMutation, f + " is not a mutable field");
    std::set<std::string> clash{x};
    for (auto& [v, s] : free_variables(rhs)) clash.insert(v);
    MwCtx c{f, mk::var(x), rhs};
    return mw(c, rename_bound(beta, clash, *this));
}

// ---- allocation ----

struct ProgramLogic::AllocCtx {
    NodePtr v;
};

NodePtr ProgramLogic::alloc_rw(AllocCtx& c, const NodePtr& n) {
    auto rw = [&](const NodePtr& k) { return alloc_rw(c, k); };
    switch (n->kind) {
        case Kind::SpFormula:
        case Kind::SpTerm:
            untranslatable(n, "support term outside a set atom");
        case Kind::Var:
            if (n->sort == Sort::SetOfForeground) untranslatable(n, "set-sorted variable outside a membership");
            return n;
        case Kind::App: {
            auto* f = sig_->function(n->name());
            NodePtr r = rebuild(n, rw);
            if (f && f->is_mutable && !f->args.empty() && f->args[0] == Sort::Foreground)
                return mk::ite_term(mk::eq(r->kids[0], c.v), default_value(f->result), r);
            return r;
        }
        case Kind::Eq:
            if (n->kids[0]->sort == Sort::SetOfForeground) {
                auto z = mk::var(fresh("z"));
                auto a = n->kids[0], b = n->kids[1];
                return mk::forall({{z->sym, Sort::Foreground}}, mk::tru(),
                                  iff(alloc_member(c, a, z), alloc_member(c, b, z)));
            }
            break;
        case Kind::Rel:
            if (n->name() == "in") return alloc_member(c, n->kids[1], rw(n->kids[0]));
            if (n->name() == "subseteq") {
                auto z = mk::var(fresh("z"));
                return mk::forall({{z->sym, Sort::Foreground}}, mk::tru(),
                                  mk::or_(mk::not_(alloc_member(c, n->kids[0], z)), alloc_member(c, n->kids[1], z)));
            }
            if (defs_.find(n->name())) {
                std::vector<NodePtr> args;
                for (auto& k : n->kids) args.push_back(rw(k));
                args.push_back(c.v);
                return mk::rel(alloc_def(n->name()), std::move(args));
            }
            break;
        default: break;
    }
    if (n->is_term() && n->sort == Sort::SetOfForeground) untranslatable(n, "set term");
    return rebuild(n, rw);
}

NodePtr ProgramLogic::alloc_member(AllocCtx& c, const NodePtr& s, const NodePtr& z) {
    switch (s->kind) {
        case Kind::SpFormula:
        case Kind::SpTerm:
            return halloc_call(c, s->kids[0], z);
        case Kind::Var:
            if (s->name() == kUniverseVar) return mk::and_(mk::in(z, s), mk::neq(z, c.v));
            untranslatable(s, "set-sorted variable");
        case Kind::Const:
            if (s->name() == "emptyset") return mk::fls();
            untranslatable(s, "set constant");
        case Kind::App:
            if (s->name() == "cup") return mk::or_(alloc_member(c, s->kids[0], z), alloc_member(c, s->kids[1], z));
            if (s->name() == "cap") return mk::and_(alloc_member(c, s->kids[0], z), alloc_member(c, s->kids[1], z));
            if (s->name() == "compl") return mk::not_(alloc_member(c, s->kids[0], z));
            untranslatable(s, "set-valued function");
        case Kind::IteTerm:
            return mk::ite(alloc_rw(c, s->kids[0]), alloc_member(c, s->kids[1], z), alloc_member(c, s->kids[2], z));
        default:
            untranslatable(s, "set term");
    }
}

NodePtr ProgramLogic::halloc_call(AllocCtx& c, const NodePtr& n, const NodePtr& z) {
    if (is_sp(n)) return halloc_call(c, n->kids[0], z);
    if (trivial(n)) return mk::fls();
    auto params = free_binders(n);
    std::string name;
    auto it = halloc_nodes_.find(n.get());
    if (it != halloc_nodes_.end()) {
        name = it->second;
    } else {
        while (true) {
            name = "halloc#" + std::to_string(++halloc_counter_);
            if (!used_.count(name)) break;
        }
        used_.insert(name);
        halloc_nodes_[n.get()] = name;
        keep_.push_back(n);
        auto names = all_variable_names(n);
        std::string vp = fresh_name("v", names);
        names.insert(vp);
        std::string zp = fresh_name("z", names);
        auto ps = params;
        ps.push_back({Symbol(vp), Sort::Foreground});
        ps.push_back({Symbol(zp), Sort::Foreground});
        put(Definition{name, ps, mk::fls(), 0, {}});
        AllocCtx inner{mk::var(vp)};
        put(Definition{name, ps, halloc_body(inner, n, mk::var(zp)), 0, {}});
    }
    std::vector<NodePtr> args;
    for (auto& b : params) args.push_back(mk::var(b.var, b.sort));
    args.push_back(c.v);
    args.push_back(z);
    return mk::rel(name, std::move(args));
}

NodePtr ProgramLogic::halloc_body(AllocCtx& c, const NodePtr& n, const NodePtr& z) {
    std::vector<NodePtr> parts;
    auto H = [&](const NodePtr& k) { return halloc_call(c, k, z); };
    switch (n->kind) {
        case Kind::Const:
        case Kind::Var:
        case Kind::IntLit:
        case Kind::BoolLit:
        case Kind::True:
        case Kind::False:
            return mk::fls();
        case Kind::SpFormula:
        case Kind::SpTerm:
            return H(n->kids[0]);
        case Kind::App: {
            auto* f = sig_->function(n->name());
            for (auto& k : n->kids) parts.push_back(H(k));
            if (f && f->is_mutable) {
                for (size_t i = 0; i < n->kids.size(); ++i)
                    if (f->args[i] == Sort::Foreground) parts.push_back(mk::eq(z, alloc_rw(c, n->kids[i])));
                NodePtr r = alloc_rw(c, n);
                return mk::and_(any_of(parts), mk::eq(r, r));
            }
            return any_of(parts);
        }
        case Kind::Rel:
            if (defs_.find(n->name())) {
                std::vector<NodePtr> args;
                for (auto& k : n->kids) args.push_back(alloc_rw(c, k));
                args.push_back(c.v);
                args.push_back(z);
                parts.push_back(mk::rel(halloc_def(n->name()), std::move(args)));
            }
            for (auto& k : n->kids) parts.push_back(H(k));
            return any_of(parts);
        case Kind::Ite:
        case Kind::IteTerm: {
            NodePtr a = H(n->kids[1]), b = H(n->kids[2]);
            NodePtr branch = (a->kind == Kind::False && b->kind == Kind::False)
                                 ? mk::fls()
                                 : mk::ite(alloc_rw(c, n->kids[0]), a, b);
            return any_of({H(n->kids[0]), branch});
        }
        case Kind::Exists:
        case Kind::Forall: {
            for (auto& b : n->binders)
                if (b.sort == Sort::SetOfForeground) untranslatable(n, "set-sorted quantifier");
            NodePtr g = H(n->kids[0]);
            NodePtr body = H(n->kids[1]);
            if (g->kind != Kind::False) parts.push_back(mk::exists(n->binders, mk::tru(), g));
            if (body->kind != Kind::False) parts.push_back(mk::exists(n->binders, alloc_rw(c, n->kids[0]), body));
            return any_of(parts);
        }
        default:
            for (auto& k : n->kids) parts.push_back(H(k));
            return any_of(parts);
    }
}

std::string ProgramLogic::alloc_def(const std::string& def) {
    std::string key = def + "#alloc";
    auto it = derived_.find(key);
    if (it != derived_.end()) return it->second;
    std::string name = used_.count(key) ? fresh(key) : key;
    used_.insert(name);
    derived_[key] = name;
    const Definition d = *defs_.find(def);
    auto names = all_variable_names(d.body);
    for (auto& p : d.params) names.insert(p.var.str());
    std::string vp = fresh_name("v", names);
    auto params = d.params;
    params.push_back({Symbol(vp), Sort::Foreground});
    put(Definition{name, params, mk::fls(), 0, {}});
    AllocCtx c{mk::var(vp)};
    put(Definition{name, params, alloc_rw(c, d.body), 0, {}});
    return name;
}

std::string ProgramLogic::halloc_def(const std::string& def) {
    std::string key = def + "#halloc";
    auto it = derived_.find(key);
    if (it != derived_.end()) return it->second;
    std::string name = used_.count(key) ? fresh(key) : key;
    used_.insert(name);
    derived_[key] = name;
    const Definition d = *defs_.find(def);
    auto names = all_variable_names(d.body);
    for (auto& p : d.params) names.insert(p.var.str());
    std::string vp = fresh_name("v", names);
    names.insert(vp);
    std::string zp = fresh_name("z", names);
    auto params = d.params;
    params.push_back({Symbol(vp), Sort::Foreground});
    params.push_back({Symbol(zp), Sort::Foreground});
    put(Definition{name, params, mk::fls(), 0, {}});
    AllocCtx c{mk::var(vp)};
    put(Definition{name, params, halloc_body(c, d.body, mk::var(zp)), 0, {}});
    return name;
}

NodePtr ProgramLogic::mw_alloc(const std::string& x, const std::string& v, const NodePtr& beta) {
    AllocCtx c{mk::var(v)};
    return alloc_rw(c, substitute(beta, x, mk::var(v)));
}

// ---- weakest tightest preconditions ----

NodePtr ProgramLogic::wtp(const Stmt& s, const NodePtr& beta) {
    auto var = [&](const std::string& n) { return mk::var(n, sig_->variable(n).value_or(Sort::Foreground)); };
    switch (s.kind) {
        case StmtKind::Skip: return beta;
        case StmtKind::AssignConst:
        case StmtKind::AssignVar:
        case StmtKind::AssignExpr: return substitute(beta, s.x, s.expr);
        case StmtKind::Lookup: {
            std::string xp = fresh(s.x, beta);
            NodePtr b = substitute(beta, s.x, mk::var(xp));
            auto* f = sig_->function(s.field);
            if (!f) throw Error(ErrorCode::UnknownSymbol, "unknown field " + s.field);
            NodePtr y = var(s.y);
            return mk::exists({{Symbol(xp), f->result}}, mk::eq(mk::var(xp, f->result), mk::app(s.field, {y}, f->result)),
                              mk::and_(b, mk::in(y, mk::sp(b))));
        }
        case StmtKind::Mutate: {
            NodePtr x = var(s.x);
            return mw_mutation(s.x, s.field, s.expr, mk::and_(beta, mk::in(x, mk::sp(beta))));
        }
        case StmtKind::Alloc: {
            std::string v = fresh("v", beta);
            NodePtr x = var(s.x);
            NodePtr body = mw_alloc(s.x, v, mk::and_(beta, mk::in(x, mk::sp(beta))));
            NodePtr vv = mk::var(v);
            return mk::forall({{Symbol(v), Sort::Foreground}}, mk::in(vv, mk::var(kUniverseVar, Sort::SetOfForeground)),
                              mk::implies(mk::neq(vv, mk::nil()), body));
        }
        case StmtKind::Free: {
            auto* f = sig_->first_mutable_unary();
            if (!f) throw Error(ErrorCode::IllegalMutation, "free needs a mutable unary field");
            NodePtr x = var(s.x);
            NodePtr fx = mk::app(f->name, {x}, f->result);
            return mk::and_({beta, mk::notin(x, mk::sp(beta)), mk::eq(fx, fx)});
        }
        case StmtKind::If: return mk::ite(s.expr, wtp(*s.body[0], beta), wtp(*s.body[1], beta));
        case StmtKind::Seq: {
            NodePtr b = beta;
            for (auto it = s.body.rbegin(); it != s.body.rend(); ++it) b = wtp(**it, b);
            return b;
        }
        case StmtKind::While:
            throw Error(ErrorCode::RequiresInvariant, "wtp is defined for loop-free programs; use vc_gen");
    }
    return beta;
}

// ---- verification conditions ----

const char* obligation_kind_name(ObligationKind k) {
    switch (k) {
        case ObligationKind::Implication: return "implication";
        case ObligationKind::SupportEq: return "support-eq";
        case ObligationKind::SupportDisjoint: return "support-disjoint";
        case ObligationKind::FrameSideCondition: return "frame-side-condition";
    }
    return "?";
}

std::string Obligation::text() const {
    return print(lhs) + " => " + print(rhs) + " and Sp(lhs) = Sp(rhs)";
}

namespace {

std::string at(const Stmt& s) {
    if (s.span.line == 0) return "";
    return " at " + std::to_string(s.span.line) + ":" + std::to_string(s.span.column);
}

struct VcGen {
    ProgramLogic& logic;
    std::vector<Obligation> loops;

    void add(std::vector<Obligation>& out, NodePtr lhs, NodePtr rhs, std::string prov) {
        Obligation o;
        o.lhs = std::move(lhs);
        o.rhs = std::move(rhs);
        o.provenance = std::move(prov);
        out.push_back(std::move(o));
    }

    NodePtr pre(const Stmt& s, const NodePtr& post) {
        switch (s.kind) {
            case StmtKind::Seq: {
                NodePtr b = post;
                for (auto it = s.body.rbegin(); it != s.body.rend(); ++it) b = pre(**it, b);
                return b;
            }
            case StmtKind::If: return mk::ite(s.expr, pre(*s.body[0], post), pre(*s.body[1], post));
            case StmtKind::While: {
                if (!s.invariant) throw Error(ErrorCode::RequiresInvariant, "while loop" + at(s) + " has no invariant");
                NodePtr body = pre(*s.body[0], s.invariant);
                add(loops, mk::and_(s.invariant, s.expr), body, "While: preserve" + at(s));
                add(loops, mk::and_(s.invariant, mk::not_(s.expr)), post, "While: exit" + at(s));
                return s.invariant;
            }
            default: return logic.wtp(s, post);
        }
    }
};

}  // namespace

std::vector<Obligation> vc_gen(ProgramLogic& logic, const Triple& t) {
    VcGen g{logic, {}};
    std::vector<Obligation> out;
    const Stmt& p = *t.program;
    const Stmt* first = &p;
    std::vector<StmtPtr> rest;
    if (p.kind == StmtKind::Seq && !p.body.empty()) {
        first = p.body[0].get();
        rest.assign(p.body.begin() + 1, p.body.end());
    }
    if (first->kind == StmtKind::If) {
        NodePtr after = rest.empty() ? t.post : g.pre(*stmt::seq(rest), t.post);
        NodePtr a = g.pre(*first->body[0], after);
        NodePtr b = g.pre(*first->body[1], after);
        g.add(out, mk::and_(t.pre, first->expr), a, "Conditional: then" + at(*first));
        g.add(out, mk::and_(t.pre, mk::not_(first->expr)), b, "Conditional: else" + at(*first));
    } else {
        NodePtr w = g.pre(p, t.post);
        g.add(out, t.pre, w, "Consequence: init");
    }
    out.insert(out.end(), g.loops.begin(), g.loops.end());
    for (size_t i = 0; i < out.size(); ++i) out[i].id = "o" + std::to_string(i + 1);
    return out;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Valid: return "valid";
        case Verdict::Invalid: return "invalid";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::set<std::string> functions_used(const NodePtr& n, const DefinitionSet& defs) {
    std::set<std::string> fs, rs, seen;
    collect_symbols(n, fs, rs);
    std::vector<std::string> todo(rs.begin(), rs.end());
    while (!todo.empty()) {
        auto r = todo.back();
        todo.pop_back();
        auto* d = defs.find(r);
        if (!d || !seen.insert(r).second) continue;
        std::set<std::string> more;
        collect_symbols(d->body, fs, more);
        todo.insert(todo.end(), more.begin(), more.end());
    }
    std::set<std::string> out;
    for (auto& f : fs)
        if (!is_builtin_function(f)) out.insert(f);
    return out;
}

namespace {

struct Space {
    std::vector<Binder> vars;
    ModelFilter filter;
    bool with_u = false;
};

void add_formula(Space& sp, const NodePtr& n, const DefinitionSet& defs) {
    for (auto& [name, s] : free_variables(n)) {
        if (name == kUniverseVar) {
            sp.with_u = true;
            continue;
        }
        bool known = false;
        for (auto& b : sp.vars) known |= b.var.str() == name;
        if (!known) sp.vars.push_back({Symbol(name), s});
    }
    if (!sp.filter.functions) sp.filter.functions.emplace();
    for (auto& f : functions_used(n, defs)) sp.filter.functions->insert(f);
}

void add_program(Space& sp, const Stmt& s, const Signature& sig, const DefinitionSet& defs) {
    for (auto& v : program_variables(s)) {
        bool known = false;
        for (auto& b : sp.vars) known |= b.var.str() == v;
        if (!known) sp.vars.push_back({Symbol(v), sig.variable(v).value_or(Sort::Foreground)});
    }
    if (!sp.filter.functions) sp.filter.functions.emplace();
    if (!s.field.empty()) sp.filter.functions->insert(s.field);
    if (s.expr) add_formula(sp, s.expr, defs);
    if (s.invariant) add_formula(sp, s.invariant, defs);
    if (s.kind == StmtKind::Alloc) sp.with_u = true;
    for (auto& b : s.body) add_program(sp, *b, sig, defs);
}

void sort_vars(Space& sp) {
    std::sort(sp.vars.begin(), sp.vars.end(), [](const Binder& a, const Binder& b) { return a.var.str() < b.var.str(); });
}

// visits configurations (model, store, U); H is left 0 for the caller to fill in
void each_config(std::shared_ptr<const Signature> sigp, const Space& sp, const Bounds& b,
                 const std::function<bool(const std::shared_ptr<const PreModel>&, const Assignment&, LocSet)>& f) {
    if (b.fg_size < 1 || b.fg_size > kForegroundCap) throw Error(ErrorCode::BoundsTooLarge, "foreground size out of range");
    PreModelEnumerator en(sigp, b.fg_size, b.ints, sp.filter);
    PreModel m = en.base();
    LocSet cells = full_set(b.fg_size) & ~LocSet(1);
    while (en.next(m)) {
        auto heap = std::make_shared<const PreModel>(m);
        bool go = true;
        enumerate_assignments(m, sp.vars, [&](const Assignment& a) {
            if (!sp.with_u) return go = f(heap, a, 0);
            for (LocSet U = cells;; U = (U - 1) & cells) {
                if (!(go = f(heap, a, U))) return false;
                if (U == 0) break;
            }
            return true;
        });
        if (!go) return;
    }
}

// frame model of the most recent heap
struct ModelCache {
    std::shared_ptr<const DefinitionSet> defs;
    std::shared_ptr<const PreModel> heap;
    std::optional<FrameModel> fm;
    const FrameModel& get(const std::shared_ptr<const PreModel>& h) {
        if (h != heap) {
            heap = h;
            fm.emplace(h, defs);
        }
        return *fm;
    }
};

// frame models of the post-states reached from one pre-state heap
struct PostCache {
    std::shared_ptr<const DefinitionSet> defs;
    std::shared_ptr<const PreModel> pre;
    std::vector<std::pair<std::shared_ptr<const PreModel>, FrameModel>> entries;
    const FrameModel& get(const std::shared_ptr<const PreModel>& pre_heap, const FrameModel& pre_fm,
                          const std::shared_ptr<const PreModel>& h) {
        if (pre_heap != pre) {
            pre = pre_heap;
            entries.clear();
        }
        if (h == pre_heap || h->same_tables(*pre_heap)) return pre_fm;
        for (auto& [k, fm] : entries)
            if (k == h || k->same_tables(*h)) return fm;
        entries.emplace_back(h, FrameModel(h, defs));
        return entries.back().second;
    }
};

Assignment with_u(const Assignment& a, LocSet U) {
    Assignment r = a;
    r.set(kUniverseVar, Value::set(U));
    return r;
}

}  // namespace

CheckResult check_obligation(const ProgramLogic& logic, const Obligation& o, const Bounds& b) {
    auto defs = logic.defs();
    ModelCache cache{defs, nullptr, {}};
    Space sp;
    add_formula(sp, o.lhs, *defs);
    add_formula(sp, o.rhs, *defs);
    sort_vars(sp);
    CheckResult r;
    each_config(logic.signature_ptr(), sp, b, [&](auto& heap, const Assignment& a, LocSet U) {
        auto& fm = cache.get(heap);
        Assignment au = with_u(a, U);
        if (!fm.eval(o.lhs, au)) return true;
        LocSet H = fm.support(o.lhs, au);
        Configuration c{heap, a, H, U};
        if (!valid_config(c)) return true;
        ++r.cases;
        bool holds = fm.eval(o.rhs, au);
        LocSet H2 = fm.support(o.rhs, au);
        if (holds && H2 == H) return true;
        r.verdict = Verdict::Invalid;
        r.counterexample = c;
        r.detail = holds ? "supports differ: " + format_set(H) + " vs " + format_set(H2) : "right-hand side is false";
        return false;
    });
    return r;
}

CheckResult check_triple(const ProgramLogic& logic, const Triple& t, const Bounds& b) {
    auto defs = logic.defs();
    ModelCache cache{defs, nullptr, {}};
    Space sp;
    add_formula(sp, t.pre, *defs);
    add_formula(sp, t.post, *defs);
    add_program(sp, *t.program, logic.signature(), *defs);
    sort_vars(sp);
    CheckResult r;
    bool fuel_out = false;
    each_config(logic.signature_ptr(), sp, b, [&](auto& heap, const Assignment& a, LocSet U) {
        auto& fm = cache.get(heap);
        Assignment au = with_u(a, U);
        if (!fm.eval(t.pre, au)) return true;
        Configuration c{heap, a, fm.support(t.pre, au), U};
        if (!valid_config(c)) return true;
        ++r.cases;
        std::vector<Outcome> outs;
        try {
            outs = run(c, t.program, RunOptions{b.fuel, nullptr});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::FuelExhausted) throw;
            fuel_out = true;
            return true;
        }
        for (auto& o : outs) {
            if (o.kind == OutcomeKind::Stuck) continue;
            std::string why;
            if (o.kind == OutcomeKind::Abort) {
                why = "execution aborts";
            } else {
                FrameModel post(o.config.heap, defs);
                auto pa = o.config.assignment();
                if (!post.eval(t.post, pa)) why = "postcondition is false after " + o.config.str();
                else if (post.support(t.post, pa) != o.config.H)
                    why = "final heap " + format_set(o.config.H) + " is not the support " +
                          format_set(post.support(t.post, pa));
            }
            if (!why.empty()) {
                r.verdict = Verdict::Invalid;
                r.counterexample = c;
                r.detail = why;
                return false;
            }
        }
        return true;
    });
    if (r.verdict == Verdict::Valid && fuel_out) {
        r.verdict = Verdict::Inconclusive;
        r.detail = "a loop ran out of fuel";
    }
    return r;
}

CheckResult check_wtp_property(ProgramLogic& logic, const Stmt& s, const NodePtr& beta, const Bounds& b) {
    if (!is_basic(s)) throw Error(ErrorCode::InvalidInput, "wtp property is checked for basic commands");
    NodePtr alpha = logic.wtp(s, beta);
    auto defs = logic.defs();
    ModelCache cache{defs, nullptr, {}};
    PostCache posts{defs, nullptr, {}};
    Space sp;
    add_formula(sp, alpha, *defs);
    add_formula(sp, beta, *defs);
    add_program(sp, s, logic.signature(), *defs);
    sp.with_u = true;
    sort_vars(sp);
    CheckResult r;
    LocSet cells = full_set(b.fg_size) & ~LocSet(1);
    each_config(logic.signature_ptr(), sp, b, [&](auto& heap, const Assignment& a, LocSet U) {
        auto& fm = cache.get(heap);
        Assignment au = with_u(a, U);
        bool a_true = fm.eval(alpha, au);
        LocSet a_sp = fm.support(alpha, au);
        LocSet rest = cells & ~U;
        for (LocSet H = rest;; H = (H - 1) & rest) {
            Configuration c{heap, a, H, U};
            if (valid_config(c)) {
                ++r.cases;
                bool left = a_true && a_sp == H;
                bool right = false;
                for (auto& o : step(c, s)) {
                    if (o.kind == OutcomeKind::Stuck) right = right || H == 0;
                    if (o.kind != OutcomeKind::Final || !valid_config(o.config)) continue;
                    auto& post = posts.get(heap, fm, o.config.heap);
                    auto pa = o.config.assignment();
                    if (post.eval(beta, pa) && post.support(beta, pa) == o.config.H) right = true;
                }
                if (left != right) {
                    r.verdict = Verdict::Invalid;
                    r.counterexample = c;
                    r.detail = left ? "satisfies the precondition but is no preconfiguration"
                                    : "preconfiguration that violates the precondition";
                    return false;
                }
            }
            if (H == 0) break;
        }
        return true;
    });
    return r;
}

FrameRuleCheck check_frame_rule(const ProgramLogic& logic, const NodePtr& alpha, const StmtPtr& s,
                                const NodePtr& mu, const Bounds& b) {
    FrameRuleCheck out;
    auto assigned = assigned_variables(*s);
    out.untouched_variables = true;
    for (auto& [v, so] : free_variables(mu))
        if (assigned.count(v)) out.untouched_variables = false;
    auto defs = logic.defs();
    ModelCache cache{defs, nullptr, {}};
    PostCache posts{defs, nullptr, {}};
    Space sp;
    add_formula(sp, alpha, *defs);
    add_formula(sp, mu, *defs);
    sort_vars(sp);
    out.disjoint_supports = true;
    each_config(logic.signature_ptr(), sp, b, [&](auto& heap, const Assignment& a, LocSet U) {
        auto& fm = cache.get(heap);
        Assignment au = with_u(a, U);
        if (!fm.eval(alpha, au) || !fm.eval(mu, au)) return true;
        if (fm.support(alpha, au) & fm.support(mu, au)) return out.disjoint_supports = false;
        return true;
    });
    return out;
}

std::string to_jsonl(const ObligationReport& r) {
    nlohmann::ordered_json j;
    j["id"] = r.obligation.id;
    j["kind"] = obligation_kind_name(r.obligation.kind);
    j["provenance"] = r.obligation.provenance;
    j["formula-text"] = r.obligation.text();
    j["verdict"] = verdict_name(r.result.verdict);
    if (r.result.counterexample) {
        auto& c = *r.result.counterexample;
        nlohmann::ordered_json ce;
        ce["model"] = print(*c.heap);
        ce["store"] = c.store.str();
        ce["H"] = format_set(c.H);
        ce["U"] = format_set(c.U);
        ce["reason"] = r.result.detail;
        j["counterexample"] = ce;
    }
    return j.dump();
}

VerifyResult verify(ProgramLogic& logic, const Triple& t, const Bounds& b) {
    VerifyResult out;
    for (auto& o : vc_gen(logic, t)) {
        ObligationReport rep{o, check_obligation(logic, o, b)};
        if (rep.result.verdict == Verdict::Invalid) out.verdict = Verdict::Invalid;
        else if (rep.result.verdict == Verdict::Inconclusive && out.verdict == Verdict::Valid)
            out.verdict = Verdict::Inconclusive;
        out.reports.push_back(std::move(rep));
    }
    return out;
}

}  // namespace fl
