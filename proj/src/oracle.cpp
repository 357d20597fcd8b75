#include "fl/oracle.hpp"

namespace fl {

namespace {

using Env = std::vector<std::pair<std::string, Value>>;

struct Naive {
    const PreModel& m;
    const DefinitionSet& defs;
    const std::vector<std::vector<uint8_t>>& truth;
    const std::vector<std::vector<LocSet>>& supp;

    const Value& lookup(const Env& env, const std::string& name) const {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == name) return it->second;
        throw Error(ErrorCode::UnboundVariable, "no value for variable " + name);
    }

    std::vector<Value> args(const Node& n, const Env& env) const {
        std::vector<Value> out;
        for (auto& k : n.kids) out.push_back(term(*k, env));
        return out;
    }

    // position of an inductive application in its table, -1 when an argument is out of range
    long slot(const Definition& d, const std::vector<Value>& vals) const {
        std::vector<Sort> sorts;
        for (auto& p : d.params) sorts.push_back(p.sort);
        auto i = m.tuple_index(sorts, vals.data());
        return i ? static_cast<long>(*i) : -1;
    }

    Value term(const Node& n, const Env& env) const {
        const std::string& s = n.name();
        switch (n.kind) {
            case Kind::Const:
                if (s == "nil") return Value::loc(0);
                if (s == "emptyset") return Value::set(0);
                return m.constant(s);
            case Kind::Var: return lookup(env, s);
            case Kind::IntLit: return Value::integer(n.ival);
            case Kind::BoolLit: return Value::boolean(n.ival != 0);
            case Kind::App: {
                auto v = args(n, env);
                if (s == "cup") return Value::set(v[0].mask() | v[1].mask());
                if (s == "cap") return Value::set(v[0].mask() & v[1].mask());
                if (s == "compl") return Value::set(m.universe() & ~v[0].mask());
                if (s == "+") return Value::integer(v[0].v + v[1].v);
                if (s == "-") return Value::integer(v[0].v - v[1].v);
                return m.get(s, v);
            }
            case Kind::IteTerm: return formula(*n.kids[0], env) ? term(*n.kids[1], env) : term(*n.kids[2], env);
            case Kind::SpFormula:
            case Kind::SpTerm: return Value::set(sp(*n.kids[0], env));
            default: throw Error(ErrorCode::SortMismatch, "formula in term position");
        }
    }

    template <class F>
    void each(const std::vector<Binder>& bs, size_t i, Env& env, F&& f) const {
        if (i == bs.size()) {
            f();
            return;
        }
        for (size_t k = 0; k < m.domain_size(bs[i].sort); ++k) {
            env.emplace_back(bs[i].var.str(), m.value_at(bs[i].sort, k));
            each(bs, i + 1, env, f);
            env.pop_back();
        }
    }

    bool formula(const Node& n, const Env& env) const {
        switch (n.kind) {
            case Kind::True: return true;
            case Kind::False: return false;
            case Kind::Eq: return term(*n.kids[0], env) == term(*n.kids[1], env);
            case Kind::Rel: {
                auto v = args(n, env);
                const std::string& r = n.name();
                if (r == "in") return has(v[1].mask(), static_cast<int>(v[0].v));
                if (r == "subseteq") return (v[0].mask() & ~v[1].mask()) == 0;
                if (r == "<") return v[0].v < v[1].v;
                if (r == "<=") return v[0].v <= v[1].v;
                if (r == ">") return v[0].v > v[1].v;
                if (r == ">=") return v[0].v >= v[1].v;
                int d = defs.index(r);
                if (d >= 0) {
                    long i = slot(defs.all()[d], v);
                    return i >= 0 && truth[d][i];
                }
                int ri = m.signature().relation_index(r);
                return m.holds(ri, v.data());
            }
            case Kind::And: return formula(*n.kids[0], env) && formula(*n.kids[1], env);
            case Kind::Or: return formula(*n.kids[0], env) || formula(*n.kids[1], env);
            case Kind::Implies: return !formula(*n.kids[0], env) || formula(*n.kids[1], env);
            case Kind::Not: return !formula(*n.kids[0], env);
            case Kind::Ite: return formula(*n.kids[0], env) ? formula(*n.kids[1], env) : formula(*n.kids[2], env);
            case Kind::Exists:
            case Kind::Forall: {
                bool ex = false, all = true;
                Env e = env;
                each(n.binders, 0, e, [&] {
                    if (!formula(*n.kids[0], e)) return;
                    bool b = formula(*n.kids[1], e);
                    ex = ex || b;
                    all = all && b;
                });
                return n.kind == Kind::Exists ? ex : all;
            }
            default: throw Error(ErrorCode::SortMismatch, "term in formula position");
        }
    }

    LocSet sp(const Node& n, const Env& env) const {
        LocSet s = 0;
        switch (n.kind) {
            case Kind::Const:
            case Kind::Var:
            case Kind::IntLit:
            case Kind::BoolLit:
            case Kind::True:
            case Kind::False:
                return 0;
            case Kind::SpFormula:
            case Kind::SpTerm:
                return sp(*n.kids[0], env);
            case Kind::App: {
                for (auto& k : n.kids) s |= sp(*k, env);
                auto* f = m.signature().function(n.name());
                if (f && f->is_mutable) {
                    auto v = args(n, env);
                    for (size_t i = 0; i < v.size(); ++i)
                        if (f->args[i] == Sort::Foreground) s |= bit(static_cast<int>(v[i].v));
                }
                return s;
            }
            case Kind::Rel: {
                for (auto& k : n.kids) s |= sp(*k, env);
                int d = defs.index(n.name());
                if (d >= 0) {
                    long i = slot(defs.all()[d], args(n, env));
                    if (i >= 0) s |= supp[d][i];
                }
                return s;
            }
            case Kind::Ite:
            case Kind::IteTerm:
                return sp(*n.kids[0], env) | sp(*n.kids[formula(*n.kids[0], env) ? 1 : 2], env);
            case Kind::Exists:
            case Kind::Forall: {
                Env e = env;
                each(n.binders, 0, e, [&] {
                    s |= sp(*n.kids[0], e);
                    if (formula(*n.kids[0], e)) s |= sp(*n.kids[1], e);
                });
                return s;
            }
            default:
                for (auto& k : n.kids) s |= sp(*k, env);
                return s;
        }
    }
};

}  // namespace

NaiveFixpoint naive_fixpoint(const PreModel& pre, const DefinitionSet& defs) {
    NaiveFixpoint fp;
    auto params_env = [&](const Definition& d, size_t i) {
        std::vector<Sort> sorts;
        for (auto& p : d.params) sorts.push_back(p.sort);
        std::vector<Value> v(sorts.size());
        pre.tuple_values(sorts, i, v.data());
        Env env;
        for (size_t k = 0; k < v.size(); ++k) env.emplace_back(d.params[k].var.str(), v[k]);
        return env;
    };
    auto count = [&](const Definition& d) {
        std::vector<Sort> sorts;
        for (auto& p : d.params) sorts.push_back(p.sort);
        return pre.tuple_count(sorts);
    };
    for (auto& d : defs.all()) {
        fp.truth.emplace_back(count(d), 0);
        fp.support.emplace_back(count(d), 0);
    }
    // supports first: guards never read inductive truth values
    while (true) {
        ++fp.sweeps;
        auto next = fp.support;
        Naive nv{pre, defs, fp.truth, fp.support};
        for (size_t d = 0; d < defs.size(); ++d)
            for (size_t i = 0; i < next[d].size(); ++i)
                next[d][i] = nv.sp(*defs.all()[d].body, params_env(defs.all()[d], i));
        if (next == fp.support) break;
        fp.support = std::move(next);
    }
    int top = 0;
    for (auto& d : defs.all()) top = std::max(top, d.stratum);
    for (int s = 0; s <= top; ++s) {
        while (true) {
            ++fp.sweeps;
            auto next = fp.truth;
            Naive nv{pre, defs, fp.truth, fp.support};
            for (size_t d = 0; d < defs.size(); ++d) {
                if (defs.all()[d].stratum != s) continue;
                for (size_t i = 0; i < next[d].size(); ++i)
                    next[d][i] = nv.formula(*defs.all()[d].body, params_env(defs.all()[d], i)) ? 1 : 0;
            }
            if (next == fp.truth) break;
            fp.truth = std::move(next);
        }
    }
    return fp;
}

namespace {
Env env_of(const Assignment& a) {
    Env e;
    for (auto& [s, v] : a.entries()) e.emplace_back(s.str(), v);
    return e;
}
}  // namespace

bool naive_eval(const PreModel& pre, const DefinitionSet& defs, const NaiveFixpoint& fp, const NodePtr& f,
                const Assignment& a) {
    return Naive{pre, defs, fp.truth, fp.support}.formula(*f, env_of(a));
}

Value naive_term(const PreModel& pre, const DefinitionSet& defs, const NaiveFixpoint& fp, const NodePtr& t,
                 const Assignment& a) {
    return Naive{pre, defs, fp.truth, fp.support}.term(*t, env_of(a));
}

LocSet naive_support(const PreModel& pre, const DefinitionSet& defs, const NaiveFixpoint& fp, const NodePtr& n,
                     const Assignment& a) {
    return Naive{pre, defs, fp.truth, fp.support}.sp(*n, env_of(a));
}

LocSet reachable(const PreModel& pre, int start, const std::vector<std::string>& fields) {
    LocSet seen = 0;
    std::vector<int> todo;
    if (start != 0) todo.push_back(start);
    while (!todo.empty()) {
        int c = todo.back();
        todo.pop_back();
        if (has(seen, c)) continue;
        seen |= bit(c);
        for (auto& f : fields) {
            int n = static_cast<int>(pre.get(f, {Value::loc(c)}).v);
            if (n != 0 && !has(seen, n)) todo.push_back(n);
        }
    }
    return seen;
}

void enumerate_assignments(const PreModel& m, const std::vector<Binder>& vars,
                           const std::function<bool(const Assignment&)>& visit) {
    std::vector<size_t> digits(vars.size(), 0);
    while (true) {
        Assignment a;
        for (size_t i = 0; i < vars.size(); ++i) a.set(vars[i].var, m.value_at(vars[i].sort, digits[i]));
        if (!visit(a)) return;
        size_t i = 0;
        while (i < vars.size() && ++digits[i] == m.domain_size(vars[i].sort)) digits[i++] = 0;
        if (i == vars.size()) return;
    }
}

void enumerate_configs(std::shared_ptr<const Signature> sig, const std::vector<Binder>& vars,
                       const ConfigBounds& b, const std::function<bool(const Configuration&)>& visit) {
    if (b.fg_size < 1 || b.fg_size > kForegroundCap)
        throw Error(ErrorCode::BoundsTooLarge, "foreground size out of range");
    PreModelEnumerator en(sig, b.fg_size, b.ints, b.filter);
    PreModel m = en.base();
    LocSet cells = full_set(b.fg_size) & ~LocSet(1);
    bool go = true;
    while (go && en.next(m)) {
        auto heap = std::make_shared<const PreModel>(m);
        enumerate_assignments(m, vars, [&](const Assignment& a) {
            for (LocSet H = cells;; H = (H - 1) & cells) {
                LocSet rest = cells & ~H;
                for (LocSet U = rest;; U = (U - 1) & rest) {
                    if (b.vary_unallocated || U == 0) {
                        Configuration c{heap, a, H, U};
                        if (valid_config(c) && !visit(c)) {
                            go = false;
                            return false;
                        }
                    }
                    if (U == 0) break;
                }
                if (H == 0) break;
            }
            return true;
        });
    }
}

}  // namespace fl
