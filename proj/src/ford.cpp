#include "fl/ford.hpp"

#include <set>

#include "fl/rewrite.hpp"
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

[[noreturn]] void untranslatable(const Node& n, const std::string& why) {
    throw Error(ErrorCode::UntranslatableSpPosition, why + ": " + print(std::make_shared<const Node>(n)));
}

std::vector<Binder> params_of(const NodePtr& n) {
    std::vector<Binder> out;
    for (auto& [name, s] : free_variables(n)) {
        if (s == Sort::SetOfForeground) untranslatable(*n, "set-sorted variable " + name + " in a support");
        out.push_back({Symbol(name), s});
    }
    return out;
}

}  // namespace

SupportRelations::SupportRelations(const Signature& sig, const DefinitionSet& defs, DefinitionSet& out)
    : sig_(sig), defs_(defs), out_(out) {}

std::string SupportRelations::next_name() {
    while (true) {
        std::string nm = "Sp_" + std::to_string(++counter_);
        if (!defs_.find(nm) && !out_.find(nm) && !sig_.relation(nm)) return nm;
    }
}

// support empty in every model: no mutable function and no inductive relation below
bool SupportRelations::trivial(const NodePtr& n) const {
    if (n->kind == Kind::App) {
        auto* f = sig_.function(n->name());
        if (f && f->is_mutable) return false;
    }
    if (n->kind == Kind::Rel && defs_.find(n->name())) return false;
    for (auto& k : n->kids)
        if (!trivial(k)) return false;
    return true;
}

std::string SupportRelations::relation(const NodePtr& n, bool always) {
    if (n->kind == Kind::SpFormula || n->kind == Kind::SpTerm) return relation(n->kids[0], always);
    if (!always && trivial(n)) return "";
    auto it = memo_.find(n.get());
    if (it != memo_.end()) return it->second;
    std::string name = next_name();
    memo_[n.get()] = name;
    keep_.push_back(n);
    auto params = params_of(n);
    std::set<std::string> avoid = all_variable_names(n);
    std::string z = avoid.count("z") ? fresh_name("z", avoid) : "z";
    params.push_back({Symbol(z), Sort::Foreground});
    // placeholder so recursive references resolve; the body is filled in afterwards
    out_.add(Definition{name, params, mk::fls(), 0, {}});
    NodePtr b = body(n, mk::var(z));
    Definition d{name, params, b, 0, {}};
    DefinitionSet rebuilt;
    for (auto& e : out_.all()) rebuilt.add(e.name == name ? d : e);
    out_ = std::move(rebuilt);
    return name;
}

NodePtr SupportRelations::call(const NodePtr& n, const NodePtr& z) {
    std::string name = relation(n);
    if (name.empty()) return mk::fls();
    const NodePtr& key = (n->kind == Kind::SpFormula || n->kind == Kind::SpTerm) ? n->kids[0] : n;
    std::vector<NodePtr> args;
    for (auto& b : params_of(key)) args.push_back(mk::var(b.var, b.sort));
    args.push_back(z);
    return mk::rel(name, std::move(args));
}

NodePtr SupportRelations::call_def(const std::string& def, std::vector<NodePtr> args, const NodePtr& z) {
    const Definition* d = defs_.find(def);
    auto it = def_memo_.find(def);
    std::string name;
    if (it != def_memo_.end()) {
        name = it->second;
    } else {
        name = next_name();
        def_memo_[def] = name;
        auto params = d->params;
        std::set<std::string> avoid = all_variable_names(d->body);
        for (auto& p : params) avoid.insert(p.var.str());
        std::string z0 = avoid.count("z") ? fresh_name("z", avoid) : "z";
        params.push_back({Symbol(z0), Sort::Foreground});
        out_.add(Definition{name, params, mk::fls(), 0, {}});
        NodePtr b = body(d->body, mk::var(z0));
        DefinitionSet rebuilt;
        for (auto& e : out_.all()) rebuilt.add(e.name == name ? Definition{name, params, b, 0, {}} : e);
        out_ = std::move(rebuilt);
    }
    args.push_back(z);
    return mk::rel(name, std::move(args));
}

NodePtr SupportRelations::body(const NodePtr& n, const NodePtr& z) {
    std::vector<NodePtr> parts;
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
            return call(n->kids[0], z);
        case Kind::App: {
            auto* f = sig_.function(n->name());
            if (f && f->is_mutable)
                for (size_t i = 0; i < n->kids.size(); ++i)
                    if (f->args[i] == Sort::Foreground) parts.push_back(mk::eq(z, translate(n->kids[i])));
            for (auto& k : n->kids) parts.push_back(call(k, z));
            return any_of(parts);
        }
        case Kind::Rel: {
            if (defs_.find(n->name())) {
                std::vector<NodePtr> args;
                for (auto& k : n->kids) args.push_back(translate(k));
                parts.push_back(call_def(n->name(), std::move(args), z));
            }
            for (auto& k : n->kids) parts.push_back(call(k, z));
            return any_of(parts);
        }
        case Kind::Ite:
        case Kind::IteTerm: {
            NodePtr g = call(n->kids[0], z);
            NodePtr a = call(n->kids[1], z), b = call(n->kids[2], z);
            NodePtr branch = (a->kind == Kind::False && b->kind == Kind::False)
                                 ? mk::fls()
                                 : mk::ite(translate(n->kids[0]), a, b);
            return any_of({g, branch});
        }
        case Kind::Exists:
        case Kind::Forall: {
            for (auto& b : n->binders)
                if (b.sort == Sort::SetOfForeground) untranslatable(*n, "set-sorted quantifier");
            NodePtr g = call(n->kids[0], z);
            NodePtr inner = call(n->kids[1], z);
            NodePtr guarded = inner->kind == Kind::False ? inner : mk::and_(translate(n->kids[0]), inner);
            NodePtr all = any_of({g, guarded});
            if (all->kind == Kind::False) return all;
            return mk::exists(n->binders, mk::tru(), all);
        }
        default:
            for (auto& k : n->kids) parts.push_back(call(k, z));
            return any_of(parts);
    }
}

NodePtr SupportRelations::member(const NodePtr& s, const NodePtr& z) {
    switch (s->kind) {
        case Kind::SpFormula:
        case Kind::SpTerm:
            return call(s->kids[0], z);
        case Kind::Const:
            if (s->name() == "emptyset") return mk::fls();
            untranslatable(*s, "set constant");
        case Kind::App:
            if (s->name() == "cup") return mk::or_(member(s->kids[0], z), member(s->kids[1], z));
            if (s->name() == "cap") return mk::and_(member(s->kids[0], z), member(s->kids[1], z));
            if (s->name() == "compl") return mk::not_(member(s->kids[0], z));
            untranslatable(*s, "set-valued function");
        case Kind::IteTerm:
            return mk::ite(translate(s->kids[0]), member(s->kids[1], z), member(s->kids[2], z));
        default:
            untranslatable(*s, "set term");
    }
}

NodePtr SupportRelations::translate(const NodePtr& n) {
    auto fresh_z = [&] {
        auto avoid = all_variable_names(n);
        return avoid.count("z") ? fresh_name("z", avoid) : std::string("z");
    };
    switch (n->kind) {
        case Kind::SpFormula:
        case Kind::SpTerm:
            untranslatable(*n, "support term outside a set atom");
        case Kind::Eq:
            if (n->kids[0]->sort == Sort::SetOfForeground) {
                auto z = mk::var(fresh_z());
                auto a = n->kids[0], b = n->kids[1];
                NodePtr body;
                if (b->kind == Kind::Const && b->name() == "emptyset")
                    body = mk::not_(member(a, z));
                else if (a->kind == Kind::Const && a->name() == "emptyset")
                    body = mk::not_(member(b, z));
                else
                    body = iff(member(a, z), member(b, z));
                return mk::forall({{z->sym, Sort::Foreground}}, mk::tru(), body);
            }
            break;
        case Kind::Rel:
            if (n->name() == "in") return member(n->kids[1], translate(n->kids[0]));
            if (n->name() == "subseteq") {
                auto z = mk::var(fresh_z());
                return mk::forall({{z->sym, Sort::Foreground}}, mk::tru(),
                                  mk::or_(mk::not_(member(n->kids[0], z)), member(n->kids[1], z)));
            }
            break;
        case Kind::Var:
            if (n->sort == Sort::SetOfForeground) untranslatable(*n, "set-sorted variable");
            return n;
        case Kind::Const:
            if (n->sort == Sort::SetOfForeground) untranslatable(*n, "set constant");
            return n;
        case Kind::Exists:
        case Kind::Forall:
            for (auto& b : n->binders)
                if (b.sort == Sort::SetOfForeground) untranslatable(*n, "set-sorted quantifier");
            break;
        default: break;
    }
    if (n->is_term() && n->sort == Sort::SetOfForeground) untranslatable(*n, "set term");
    if (n->kids.empty()) return n;
    std::vector<NodePtr> kids;
    bool changed = false;
    for (auto& k : n->kids) {
        kids.push_back(translate(k));
        changed |= kids.back() != k;
    }
    return changed ? mk::with_kids(*n, std::move(kids)) : n;
}

namespace {

// definitions reachable from the formula, in their original order
std::set<std::string> reachable_defs(const DefinitionSet& defs, const NodePtr& f) {
    std::set<std::string> seen;
    std::vector<std::string> todo;
    auto scan = [&](const NodePtr& n) {
        std::set<std::string> fs, rs;
        collect_symbols(n, fs, rs);
        for (auto& r : rs)
            if (defs.find(r) && seen.insert(r).second) todo.push_back(r);
    };
    scan(f);
    while (!todo.empty()) {
        auto r = todo.back();
        todo.pop_back();
        scan(defs.find(r)->body);
    }
    return seen;
}

FordProgram build(const Signature& sig, const DefinitionSet& defs, const NodePtr& formula, bool with_defs) {
    FordProgram p;
    auto used = reachable_defs(defs, formula);
    DefinitionSet gen;
    SupportRelations sr(sig, defs, gen);
    p.root = sr.relation(formula, true);
    if (!p.root.empty()) p.root_params = gen.find(p.root)->params;
    if (with_defs) {
        p.formula = sr.translate(formula);
        for (auto& d : defs.all())
            if (used.count(d.name)) p.defs.add(Definition{d.name, d.params, sr.translate(d.body), 0, d.span});
    }
    for (auto& d : gen.all()) p.defs.add(d);
    stratify(p.defs);
    return p;
}

}  // namespace

FordProgram generate_support_relations(const Signature& sig, const DefinitionSet& defs, const NodePtr& formula) {
    return build(sig, defs, formula, false);
}

FordProgram translate_formula(const Signature& sig, const DefinitionSet& defs, const NodePtr& formula) {
    return build(sig, defs, formula, true);
}

FordModel::FordModel(std::shared_ptr<const PreModel> pre, const FordProgram& p)
    : p_(p), fm_(std::move(pre), std::make_shared<const DefinitionSet>(p.defs)) {}

bool FordModel::eval(const Assignment& a) const { return fm_.eval(p_.formula, a); }

LocSet FordModel::support(const Assignment& a) const {
    std::vector<Value> args;
    for (size_t i = 0; i + 1 < p_.root_params.size(); ++i) {
        const Value* v = a.find(p_.root_params[i].var);
        if (!v) throw Error(ErrorCode::UnboundVariable, "no value for variable " + p_.root_params[i].var.str());
        args.push_back(*v);
    }
    args.push_back(Value::loc(0));
    LocSet out = 0;
    for (int u = 0; u < fm_.pre().fg_size(); ++u) {
        args.back() = Value::loc(u);
        if (fm_.holds(p_.root, args)) out |= bit(u);
    }
    return out;
}

bool eval_ford(const PreModel& pre, const Assignment& a, const FordProgram& p) {
    return FordModel(std::make_shared<const PreModel>(pre), p).eval(a);
}

std::string print(const FordProgram& p, const Signature& sig) {
    ParsedFile f;
    f.sig = std::make_shared<Signature>(sig);
    f.defs = p.defs;
    if (p.formula) f.goals.push_back(p.formula);
    return print(f);
}

}  // namespace fl
