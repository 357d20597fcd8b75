#include "fl/validate.hpp"

#include <functional>

namespace fl {

bool ValidationReport::has(const std::string& rule) const {
    for (auto& v : violations)
        if (v.rule == rule) return true;
    return false;
}

std::string ValidationReport::str() const {
    std::string s;
    for (auto& v : violations) s += v.rule + " at " + v.path + ": " + v.message + "\n";
    return s;
}

namespace {

struct Checker {
    const Signature& sig;
    const DefinitionSet& defs;
    ValidationReport& report;
    int stratum = -1;  // -1 when checking a top-level formula

    void add(const std::string& rule, const std::string& path, const std::string& msg) {
        report.violations.push_back({rule, path, msg});
    }

    void expect_sort(const NodePtr& t, Sort s, const std::string& path, const std::string& what) {
        if (t->sort != s)
            add("SortMismatch", path,
                what + " expects " + sort_name(s) + " but got " + sort_name(t->sort));
    }

    // polarity: +1 / -1; in_sp: below a Sp node; in_guard: inside a guard position
    void formula(const NodePtr& n, const std::string& path, int polarity, bool in_sp, bool in_guard) {
        auto kid = [&](size_t i) { return path + "/" + std::to_string(i); };
        switch (n->kind) {
            case Kind::True:
            case Kind::False:
                return;
            case Kind::Eq:
                term(n->kids[0], kid(0), in_sp, in_guard);
                term(n->kids[1], kid(1), in_sp, in_guard);
                if (n->kids[0]->sort != n->kids[1]->sort)
                    add("SortMismatch", path,
                        std::string("equality between ") + sort_name(n->kids[0]->sort) + " and " +
                            sort_name(n->kids[1]->sort));
                return;
            case Kind::Rel:
                relation(n, path, polarity, in_sp, in_guard);
                return;
            case Kind::And:
            case Kind::Or:
                formula(n->kids[0], kid(0), polarity, in_sp, in_guard);
                formula(n->kids[1], kid(1), polarity, in_sp, in_guard);
                return;
            case Kind::Implies:
                formula(n->kids[0], kid(0), -polarity, in_sp, in_guard);
                formula(n->kids[1], kid(1), polarity, in_sp, in_guard);
                return;
            case Kind::Not:
                formula(n->kids[0], kid(0), -polarity, in_sp, in_guard);
                return;
            case Kind::Ite:
                formula(n->kids[0], kid(0), polarity, in_sp, true);
                formula(n->kids[1], kid(1), polarity, in_sp, in_guard);
                formula(n->kids[2], kid(2), polarity, in_sp, in_guard);
                return;
            case Kind::Exists:
            case Kind::Forall:
                for (auto& b : n->binders)
                    if (b.sort == Sort::SetOfForeground)
                        add("GuardUsesSetSort", path, "quantified variable " + b.var.str() + " has set sort");
                formula(n->kids[0], kid(0), polarity, in_sp, true);
                formula(n->kids[1], kid(1), polarity, in_sp, in_guard);
                return;
            default:
                add("SortMismatch", path, "term used as a formula");
        }
    }

    void relation(const NodePtr& n, const std::string& path, int polarity, bool in_sp, bool in_guard) {
        const std::string& r = n->name();
        for (size_t i = 0; i < n->kids.size(); ++i) term(n->kids[i], path + "/" + std::to_string(i), in_sp, in_guard);
        auto arity = [&](size_t k) {
            if (n->kids.size() != k) {
                add("SortMismatch", path, r + " expects " + std::to_string(k) + " arguments");
                return false;
            }
            return true;
        };
        if (r == "in") {
            if (!arity(2)) return;
            expect_sort(n->kids[0], Sort::Foreground, path, "in");
            expect_sort(n->kids[1], Sort::SetOfForeground, path, "in");
            return;
        }
        if (r == "subseteq") {
            if (!arity(2)) return;
            expect_sort(n->kids[0], Sort::SetOfForeground, path, "subseteq");
            expect_sort(n->kids[1], Sort::SetOfForeground, path, "subseteq");
            return;
        }
        if (r == "<" || r == "<=" || r == ">" || r == ">=") {
            if (!arity(2)) return;
            expect_sort(n->kids[0], Sort::Int, path, r);
            expect_sort(n->kids[1], Sort::Int, path, r);
            return;
        }
        if (auto* d = defs.find(r)) {
            if (in_guard) add("GuardUsesInductive", path, "guard uses inductive relation " + r);
            if (!arity(d->params.size())) return;
            for (size_t i = 0; i < d->params.size(); ++i)
                expect_sort(n->kids[i], d->params[i].sort, path, r);
            if (stratum >= 0 && !in_sp) {
                if (d->stratum > stratum)
                    add("StratumViolation", path, r + " belongs to a higher stratum");
                else if (d->stratum == stratum && polarity < 0)
                    add("NegativeInductiveOccurrence", path, r + " occurs under an odd number of negations");
            }
            return;
        }
        if (auto* rd = sig.relation(r)) {
            if (!arity(rd->args.size())) return;
            for (size_t i = 0; i < rd->args.size(); ++i) expect_sort(n->kids[i], rd->args[i], path, r);
            return;
        }
        throw Error(ErrorCode::UnknownSymbol, "unknown relation " + r);
    }

    void term(const NodePtr& n, const std::string& path, bool in_sp, bool in_guard) {
        auto kid = [&](size_t i) { return path + "/" + std::to_string(i); };
        if (in_guard && n->sort == Sort::SetOfForeground &&
            !(n->kind == Kind::Var && n->name() == kUniverseVar)) {
            add("GuardUsesSetSort", path, "guard mentions a set-sorted term");
            return;
        }
        switch (n->kind) {
            case Kind::Const: {
                if (n->name() == "emptyset") {
                    expect_sort(n, Sort::SetOfForeground, path, "emptyset");
                    return;
                }
                auto* c = sig.constant(n->name());
                if (!c) throw Error(ErrorCode::UnknownSymbol, "unknown constant " + n->name());
                expect_sort(n, c->sort, path, n->name());
                return;
            }
            case Kind::Var:
            case Kind::IntLit:
            case Kind::BoolLit:
                return;
            case Kind::App: {
                const std::string& f = n->name();
                for (size_t i = 0; i < n->kids.size(); ++i) term(n->kids[i], kid(i), in_sp, in_guard);
                if (f == "cup" || f == "cap" || f == "compl") {
                    for (auto& k : n->kids) expect_sort(k, Sort::SetOfForeground, path, f);
                    expect_sort(n, Sort::SetOfForeground, path, f);
                    return;
                }
                if (f == "+" || f == "-") {
                    for (auto& k : n->kids) expect_sort(k, Sort::Int, path, f);
                    expect_sort(n, Sort::Int, path, f);
                    return;
                }
                auto* fd = sig.function(f);
                if (!fd) throw Error(ErrorCode::UnknownSymbol, "unknown function " + f);
                if (fd->args.size() != n->kids.size()) {
                    add("SortMismatch", path, f + " expects " + std::to_string(fd->args.size()) + " arguments");
                    return;
                }
                for (size_t i = 0; i < fd->args.size(); ++i) expect_sort(n->kids[i], fd->args[i], path, f);
                expect_sort(n, fd->result, path, f);
                return;
            }
            case Kind::IteTerm:
                formula(n->kids[0], kid(0), 1, in_sp, true);
                term(n->kids[1], kid(1), in_sp, in_guard);
                term(n->kids[2], kid(2), in_sp, in_guard);
                if (n->kids[1]->sort != n->kids[2]->sort || n->kids[1]->sort != n->sort)
                    add("SortMismatch", path, "ite branches differ in sort");
                return;
            case Kind::SpFormula:
                formula(n->kids[0], kid(0), 1, true, false);
                return;
            case Kind::SpTerm:
                term(n->kids[0], kid(0), true, false);
                return;
            default:
                add("SortMismatch", path, "formula used as a term");
        }
    }
};

}  // namespace

ValidationReport validate(const Signature& sig, const DefinitionSet& defs, const NodePtr& formula) {
    ValidationReport rep;
    Checker c{sig, defs, rep};
    c.formula(formula, "root", 1, false, false);
    return rep;
}

ValidationReport validate_defs(const Signature& sig, const DefinitionSet& defs) {
    ValidationReport rep;
    for (auto& d : defs.all()) {
        for (auto& p : d.params)
            if (p.sort == Sort::SetOfForeground)
                rep.violations.push_back({"SetSortInductiveParam", d.name, "parameter " + p.var.str() + " has set sort"});
        Checker c{sig, defs, rep, d.stratum};
        c.formula(d.body, d.name, 1, false, false);
    }
    return rep;
}

bool is_guard(const DefinitionSet& defs, const NodePtr& n) {
    if (n->kind == Kind::Rel && defs.find(n->name())) return false;
    if (n->is_term() && n->sort == Sort::SetOfForeground && !(n->kind == Kind::Var && n->name() == kUniverseVar))
        return false;
    for (auto& k : n->kids)
        if (!is_guard(defs, k)) return false;
    return true;
}

}  // namespace fl

namespace fl {

namespace {

void collect_uses(const NodePtr& n, const DefinitionSet& defs, int polarity, bool in_sp,
                  std::vector<std::pair<int, bool>>& out) {
    switch (n->kind) {
        case Kind::Rel: {
            int d = defs.index(n->name());
            if (d >= 0 && !in_sp) out.emplace_back(d, polarity < 0);
            break;
        }
        case Kind::Not:
            collect_uses(n->kids[0], defs, -polarity, in_sp, out);
            return;
        case Kind::Implies:
            collect_uses(n->kids[0], defs, -polarity, in_sp, out);
            collect_uses(n->kids[1], defs, polarity, in_sp, out);
            return;
        case Kind::SpFormula:
        case Kind::SpTerm:
            collect_uses(n->kids[0], defs, polarity, true, out);
            return;
        default:
            break;
    }
    for (auto& k : n->kids) collect_uses(k, defs, polarity, in_sp, out);
}

}  // namespace

void stratify(DefinitionSet& defs) {
    size_t n = defs.size();
    std::vector<std::vector<std::pair<int, bool>>> uses(n);
    for (size_t i = 0; i < n; ++i) collect_uses(defs.all()[i].body, defs, 1, false, uses[i]);

    // Tarjan SCC
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on(n, false);
    std::vector<int> stack;
    int counter = 0, ncomp = 0;
    std::function<void(int)> dfs = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = true;
        for (auto [w, neg] : uses[v]) {
            if (index[w] < 0) {
                dfs(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on[w] = false;
                comp[w] = ncomp;
            } while (w != v);
            ++ncomp;
        }
    };
    for (size_t i = 0; i < n; ++i)
        if (index[i] < 0) dfs(static_cast<int>(i));

    // components are numbered in reverse topological order: dependencies first
    std::vector<int> cstratum(ncomp, 0);
    for (int c = 0; c < ncomp; ++c)
        for (size_t i = 0; i < n; ++i) {
            if (comp[i] != c) continue;
            for (auto [w, neg] : uses[i]) {
                if (comp[w] == c) continue;
                cstratum[c] = std::max(cstratum[c], cstratum[comp[w]] + (neg ? 1 : 0));
            }
        }
    for (size_t i = 0; i < n; ++i) defs.set_stratum(i, cstratum[comp[i]]);
}

}  // namespace fl
