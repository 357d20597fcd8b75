#include "fl/rewrite.hpp"

#include <functional>

namespace fl {

namespace {

void fv_rec(const NodePtr& n, std::set<std::string>& bound, VarSorts& out) {
    switch (n->kind) {
        case Kind::Var:
            if (!bound.count(n->name())) out.emplace(n->name(), n->sort);
            return;
        case Kind::Exists:
        case Kind::Forall: {
            std::vector<std::string> added;
            for (auto& b : n->binders)
                if (bound.insert(b.var.str()).second) added.push_back(b.var.str());
            for (auto& k : n->kids) fv_rec(k, bound, out);
            for (auto& a : added) bound.erase(a);
            return;
        }
        default:
            for (auto& k : n->kids) fv_rec(k, bound, out);
    }
}

void names_rec(const NodePtr& n, std::set<std::string>& out) {
    if (n->kind == Kind::Var) out.insert(n->name());
    for (auto& b : n->binders) out.insert(b.var.str());
    for (auto& k : n->kids) names_rec(k, out);
}

}  // namespace

VarSorts free_variables(const NodePtr& n) {
    VarSorts out;
    std::set<std::string> bound;
    fv_rec(n, bound, out);
    return out;
}

std::set<std::string> all_variable_names(const NodePtr& n) {
    std::set<std::string> out;
    names_rec(n, out);
    return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::string stem = base;
    auto pos = stem.rfind('#');
    if (pos != std::string::npos && pos + 1 < stem.size() &&
        stem.find_first_not_of("0123456789", pos + 1) == std::string::npos)
        stem = stem.substr(0, pos);
    for (int k = 1;; ++k) {
        std::string c = stem + "#" + std::to_string(k);
        if (!avoid.count(c)) return c;
    }
}

namespace {

struct Substituter {
    std::map<std::string, NodePtr> m;
    std::set<std::string> avoid;

    NodePtr go(const NodePtr& n) {
        if (n->kind == Kind::Var) {
            auto it = m.find(n->name());
            if (it == m.end()) return n;
            if (it->second->sort != n->sort)
                throw Error(ErrorCode::SortMismatch, "substituting a " + std::string(sort_name(it->second->sort)) +
                                                         " term for " + n->name() + " of sort " + sort_name(n->sort));
            return it->second;
        }
        if (n->kind == Kind::Exists || n->kind == Kind::Forall) return binder(n);
        if (n->kids.empty()) return n;
        std::vector<NodePtr> kids;
        bool changed = false;
        for (auto& k : n->kids) {
            kids.push_back(go(k));
            changed |= kids.back() != k;
        }
        return changed ? mk::with_kids(*n, std::move(kids)) : n;
    }

    NodePtr binder(const NodePtr& n) {
        auto saved = m;
        std::set<std::string> fv_terms;
        for (auto& b : n->binders) m.erase(b.var.str());
        if (m.empty()) {
            m = saved;
            return n;
        }
        // only substitutions that actually hit the body matter for capture
        auto body_fv = free_variables(n);
        for (auto it = m.begin(); it != m.end();)
            if (!body_fv.count(it->first)) it = m.erase(it); else ++it;
        if (m.empty()) {
            m = saved;
            return n;
        }
        for (auto& [x, t] : m)
            for (auto& [y, s] : free_variables(t)) fv_terms.insert(y);
        auto c = std::make_shared<Node>(*n);
        for (auto& b : c->binders) {
            if (!fv_terms.count(b.var.str())) continue;
            std::set<std::string> av = avoid;
            for (auto& nm : all_variable_names(n)) av.insert(nm);
            av.insert(fv_terms.begin(), fv_terms.end());
            std::string nn = fresh_name(b.var.str(), av);
            avoid.insert(nn);
            m[b.var.str()] = mk::var(nn, b.sort);
            b.var = Symbol(nn);
        }
        std::vector<NodePtr> kids;
        for (auto& k : n->kids) kids.push_back(go(k));
        c->kids = std::move(kids);
        m = saved;
        return c;
    }
};

}  // namespace

NodePtr substitute(const NodePtr& n, const std::map<std::string, NodePtr>& m) {
    if (m.empty()) return n;
    Substituter s;
    s.m = m;
    s.avoid = all_variable_names(n);
    for (auto& [x, t] : m)
        for (auto& nm : all_variable_names(t)) s.avoid.insert(nm);
    return s.go(n);
}

NodePtr substitute(const NodePtr& n, const std::string& x, const NodePtr& t) {
    return substitute(n, std::map<std::string, NodePtr>{{x, t}});
}

namespace {

struct Normalizer {
    std::set<std::string> used;
    std::set<std::string> everything;

    NodePtr go(const NodePtr& n, const std::map<std::string, std::string>& ren) {
        if (n->kind == Kind::Var) {
            auto it = ren.find(n->name());
            if (it == ren.end()) return n;
            return mk::var(it->second, n->sort);
        }
        if (n->kind == Kind::Exists || n->kind == Kind::Forall) {
            auto c = std::make_shared<Node>(*n);
            auto inner = ren;
            for (auto& b : c->binders) {
                std::string nm = b.var.str();
                if (used.count(nm)) {
                    std::set<std::string> av = used;
                    av.insert(everything.begin(), everything.end());
                    std::string nn = fresh_name(nm, av);
                    used.insert(nn);
                    inner[nm] = nn;
                    b.var = Symbol(nn);
                } else {
                    used.insert(nm);
                    inner.erase(nm);
                }
            }
            c->kids.clear();
            for (auto& k : n->kids) c->kids.push_back(go(k, inner));
            return c;
        }
        if (n->kids.empty()) return n;
        std::vector<NodePtr> kids;
        bool changed = false;
        for (auto& k : n->kids) {
            kids.push_back(go(k, ren));
            changed |= kids.back() != k;
        }
        return changed ? mk::with_kids(*n, std::move(kids)) : n;
    }
};

}  // namespace

NodePtr alpha_normalize(const NodePtr& n) {
    Normalizer z;
    for (auto& [x, s] : free_variables(n)) z.used.insert(x);
    z.everything = all_variable_names(n);
    return z.go(n, {});
}

NodePtr desugar(const NodePtr& n) {
    std::vector<NodePtr> kids;
    bool changed = false;
    for (auto& k : n->kids) {
        kids.push_back(desugar(k));
        changed |= kids.back() != k;
    }
    auto rebuilt = [&]() { return changed ? mk::with_kids(*n, kids) : n; };
    switch (n->kind) {
        case Kind::False: return mk::not_(mk::tru());
        case Kind::Or: return mk::not_(mk::and_(mk::not_(kids[0]), mk::not_(kids[1])));
        case Kind::Implies: return mk::not_(mk::and_(kids[0], mk::not_(kids[1])));
        case Kind::Forall: return mk::not_(mk::exists(n->binders, kids[0], mk::not_(kids[1])));
        default: return rebuilt();
    }
}

void collect_symbols(const NodePtr& n, std::set<std::string>& functions, std::set<std::string>& relations) {
    if (n->kind == Kind::App) functions.insert(n->name());
    if (n->kind == Kind::Rel) relations.insert(n->name());
    for (auto& k : n->kids) collect_symbols(k, functions, relations);
}

}  // namespace fl
