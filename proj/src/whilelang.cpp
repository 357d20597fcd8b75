#include "fl/whilelang.hpp"

#include <functional>

#include "fl/rewrite.hpp"
#include "fl/semantics.hpp"
#include "fl/textio.hpp"

namespace fl {

namespace stmt {

namespace {
std::shared_ptr<Stmt> make(StmtKind k) {
    auto s = std::make_shared<Stmt>();
    s->kind = k;
    return s;
}
}  // namespace

StmtPtr skip() { return make(StmtKind::Skip); }

StmtPtr assign(const std::string& x, NodePtr rhs) {
    StmtKind k = StmtKind::AssignExpr;
    if (rhs->sort == Sort::Foreground) {
        if (rhs->kind == Kind::Const) k = StmtKind::AssignConst;
        else if (rhs->kind == Kind::Var) k = StmtKind::AssignVar;
    }
    auto s = make(k);
    s->x = x;
    s->expr = std::move(rhs);
    return s;
}

StmtPtr lookup(const std::string& x, const std::string& y, const std::string& f) {
    auto s = make(StmtKind::Lookup);
    s->x = x;
    s->y = y;
    s->field = f;
    return s;
}

StmtPtr mutate(const std::string& x, const std::string& f, NodePtr rhs) {
    auto s = make(StmtKind::Mutate);
    s->x = x;
    s->field = f;
    s->expr = std::move(rhs);
    return s;
}

StmtPtr alloc(const std::string& x) {
    auto s = make(StmtKind::Alloc);
    s->x = x;
    return s;
}

StmtPtr free_(const std::string& x) {
    auto s = make(StmtKind::Free);
    s->x = x;
    return s;
}

StmtPtr if_(NodePtr cond, StmtPtr then_branch, StmtPtr else_branch) {
    auto s = make(StmtKind::If);
    s->expr = std::move(cond);
    s->body = {std::move(then_branch), std::move(else_branch)};
    return s;
}

StmtPtr while_(NodePtr cond, StmtPtr body, NodePtr invariant) {
    auto s = make(StmtKind::While);
    s->expr = std::move(cond);
    s->invariant = std::move(invariant);
    s->body = {std::move(body)};
    return s;
}

StmtPtr seq(std::vector<StmtPtr> parts) {
    std::vector<StmtPtr> flat;
    for (auto& p : parts) {
        if (p->kind == StmtKind::Seq) flat.insert(flat.end(), p->body.begin(), p->body.end());
        else flat.push_back(p);
    }
    if (flat.size() == 1) return flat[0];
    auto s = make(StmtKind::Seq);
    s->body = std::move(flat);
    return s;
}

}  // namespace stmt

bool structurally_equal(const StmtPtr& a, const StmtPtr& b) {
    if (a->kind != b->kind || a->x != b->x || a->y != b->y || a->field != b->field) return false;
    if (!!a->expr != !!b->expr || (a->expr && !structurally_equal(a->expr, b->expr))) return false;
    if (!!a->invariant != !!b->invariant || (a->invariant && !structurally_equal(a->invariant, b->invariant)))
        return false;
    if (a->body.size() != b->body.size()) return false;
    for (size_t i = 0; i < a->body.size(); ++i)
        if (!structurally_equal(a->body[i], b->body[i])) return false;
    return true;
}

bool is_basic(const Stmt& s) {
    return s.kind != StmtKind::If && s.kind != StmtKind::While && s.kind != StmtKind::Seq;
}

bool uses_alloc(const Stmt& s) {
    if (s.kind == StmtKind::Alloc) return true;
    for (auto& b : s.body)
        if (uses_alloc(*b)) return true;
    return false;
}

std::set<std::string> assigned_variables(const Stmt& s) {
    std::set<std::string> out;
    std::function<void(const Stmt&)> go = [&](const Stmt& t) {
        switch (t.kind) {
            case StmtKind::AssignConst:
            case StmtKind::AssignVar:
            case StmtKind::AssignExpr:
            case StmtKind::Lookup:
            case StmtKind::Alloc:
                out.insert(t.x);
                break;
            default:
                break;
        }
        for (auto& b : t.body) go(*b);
    };
    go(s);
    return out;
}

std::set<std::string> program_variables(const Stmt& s) {
    std::set<std::string> out;
    std::function<void(const Stmt&)> go = [&](const Stmt& t) {
        if (!t.x.empty()) out.insert(t.x);
        if (!t.y.empty()) out.insert(t.y);
        if (t.expr)
            for (auto& [n, so] : free_variables(t.expr)) out.insert(n);
        if (t.invariant)
            for (auto& [n, so] : free_variables(t.invariant)) out.insert(n);
        for (auto& b : t.body) go(*b);
    };
    go(s);
    out.erase(kUniverseVar);
    return out;
}

std::vector<std::string> ssa_warnings(const Stmt& s) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::function<void(const Stmt&, bool)> go = [&](const Stmt& t, bool in_loop) {
        switch (t.kind) {
            case StmtKind::AssignConst:
            case StmtKind::AssignVar:
            case StmtKind::AssignExpr:
            case StmtKind::Lookup:
            case StmtKind::Alloc:
                if (!in_loop && !seen.insert(t.x).second)
                    out.push_back("variable " + t.x + " is assigned more than once (line " +
                                  std::to_string(t.span.line) + ")");
                break;
            case StmtKind::If: {
                // both branches may assign the same variable
                auto before = seen;
                go(*t.body[0], in_loop);
                auto after_then = seen;
                seen = before;
                go(*t.body[1], in_loop);
                seen.insert(after_then.begin(), after_then.end());
                return;
            }
            case StmtKind::While:
                go(*t.body[0], true);
                return;
            default:
                break;
        }
        for (auto& b : t.body) go(*b, in_loop);
    };
    go(s, false);
    return out;
}

Assignment Configuration::assignment() const {
    Assignment a = store;
    a.set(kUniverseVar, Value::set(U));
    return a;
}

bool Configuration::same_as(const Configuration& o) const {
    return H == o.H && U == o.U && store == o.store && *heap == *o.heap;
}

std::string Configuration::str() const {
    return "(store: " + store.str() + ", H=" + format_set(H) + ", U=" + format_set(U) + ")";
}

bool valid_config(const Configuration& c) {
    const PreModel& m = *c.heap;
    if (c.H & c.U) return false;
    if (has(c.U, 0)) return false;
    if ((c.H | c.U) & ~m.universe()) return false;
    for (auto& [n, v] : c.store.entries())
        if (v.sort == Sort::Foreground && has(c.U, static_cast<int>(v.v))) return false;
    auto& sig = m.signature();
    std::vector<Value> args;
    for (size_t fi = 0; fi < sig.functions().size(); ++fi) {
        auto& f = sig.functions()[fi];
        if (!f.is_mutable || f.result != Sort::Foreground || f.args.empty() || f.args[0] != Sort::Foreground)
            continue;
        args.resize(f.args.size());
        size_t n = m.tuple_count(f.args);
        for (size_t t = 0; t < n; ++t) {
            m.tuple_values(f.args, t, args.data());
            if (!has(c.H, static_cast<int>(args[0].v))) continue;
            if (has(c.U, static_cast<int>(m.entry(static_cast<int>(fi), t).v))) return false;
        }
    }
    return true;
}

Value field_default(Sort s) {
    switch (s) {
        case Sort::Int: return Value::integer(0);
        case Sort::Bool: return Value::boolean(false);
        case Sort::SetOfForeground: return Value::set(0);
        default: return Value::loc(0);
    }
}

namespace {

const std::shared_ptr<const DefinitionSet>& no_defs() {
    static const auto d = std::make_shared<const DefinitionSet>();
    return d;
}

bool eval_cond(const Configuration& c, const NodePtr& f) {
    FrameModel fm(c.heap, no_defs());
    return fm.eval(f, c.assignment());
}

Value eval_rhs(const Configuration& c, const NodePtr& t) {
    FrameModel fm(c.heap, no_defs());
    return fm.eval_term(t, c.assignment());
}

int mutable_field(const PreModel& m, const std::string& f) {
    int fi = m.signature().function_index(f);
    if (fi < 0) throw Error(ErrorCode::UnknownSymbol, "unknown field " + f);
    auto& d = m.signature().functions()[fi];
    if (!d.is_mutable || d.args.size() != 1 || d.args[0] != Sort::Foreground)
        throw Error(ErrorCode::SortMismatch, f + " is not a unary mutable field");
    return fi;
}

Outcome final_of(Configuration c) { return {OutcomeKind::Final, std::move(c)}; }
Outcome abort_of(const Configuration& c) { return {OutcomeKind::Abort, c}; }

std::vector<Outcome> step_basic(const Configuration& c, const Stmt& s) {
    switch (s.kind) {
        case StmtKind::Skip:
            return {final_of(c)};
        case StmtKind::AssignConst:
        case StmtKind::AssignVar:
        case StmtKind::AssignExpr: {
            Configuration n = c;
            n.store.set(s.x, eval_rhs(c, s.expr));
            return {final_of(std::move(n))};
        }
        case StmtKind::Lookup: {
            int fi = mutable_field(*c.heap, s.field);
            Value y = c.store.get(s.y);
            if (!has(c.H, static_cast<int>(y.v))) return {abort_of(c)};
            Configuration n = c;
            n.store.set(s.x, c.heap->apply(fi, &y));
            return {final_of(std::move(n))};
        }
        case StmtKind::Mutate: {
            int fi = mutable_field(*c.heap, s.field);
            Value x = c.store.get(s.x);
            if (!has(c.H, static_cast<int>(x.v))) return {abort_of(c)};
            Value v = eval_rhs(c, s.expr);
            auto m = std::make_shared<PreModel>(*c.heap);
            m->set_entry(fi, static_cast<size_t>(x.v), v);
            Configuration n = c;
            n.heap = std::move(m);
            return {final_of(std::move(n))};
        }
        case StmtKind::Alloc: {
            if (c.U == 0) return {{OutcomeKind::Stuck, c}};
            std::vector<Outcome> out;
            auto& sig = c.heap->signature();
            std::vector<Value> args;
            for (int a = 1; a < c.heap->fg_size(); ++a) {
                if (!has(c.U, a)) continue;
                auto m = std::make_shared<PreModel>(*c.heap);
                for (size_t fi = 0; fi < sig.functions().size(); ++fi) {
                    auto& f = sig.functions()[fi];
                    if (!f.is_mutable || f.args.empty() || f.args[0] != Sort::Foreground) continue;
                    args.resize(f.args.size());
                    size_t n = m->tuple_count(f.args);
                    for (size_t t = 0; t < n; ++t) {
                        m->tuple_values(f.args, t, args.data());
                        if (args[0].v == a) m->set_entry(static_cast<int>(fi), t, field_default(f.result));
                    }
                }
                Configuration n = c;
                n.heap = std::move(m);
                n.store.set(s.x, Value::loc(a));
                n.H |= bit(a);
                n.U &= ~bit(a);
                out.push_back(final_of(std::move(n)));
            }
            return out;
        }
        case StmtKind::Free: {
            Value x = c.store.get(s.x);
            if (!has(c.H, static_cast<int>(x.v))) return {abort_of(c)};
            Configuration n = c;
            n.H &= ~bit(static_cast<int>(x.v));
            return {final_of(std::move(n))};
        }
        default:
            break;
    }
    throw Error(ErrorCode::InvalidInput, "not a basic statement");
}

std::string one_line(const Stmt& s) {
    switch (s.kind) {
        case StmtKind::If: return "if " + print(s.expr);
        case StmtKind::While: return "while " + print(s.expr);
        default: {
            auto p = std::make_shared<Stmt>(s);
            return print(StmtPtr(p), 0);
        }
    }
}

void trace_line(RunOptions& o, const Stmt& s, const Outcome& r) {
    if (!o.trace) return;
    std::string st;
    switch (r.kind) {
        case OutcomeKind::Abort: st = "abort"; break;
        case OutcomeKind::Stuck: st = "stuck"; break;
        default: st = "(H=" + format_set(r.config.H) + ", U=" + format_set(r.config.U) + ")";
    }
    o.trace->push_back(one_line(s) + " : " + st);
}

struct Path {
    Outcome outcome;
    int fuel;
};

void exec(const Configuration& c, int fuel, const Stmt& s, RunOptions& o, std::vector<Path>& out);

void exec_seq(const Configuration& c, int fuel, const std::vector<StmtPtr>& parts, size_t i, RunOptions& o,
              std::vector<Path>& out) {
    if (i == parts.size()) {
        out.push_back({final_of(c), fuel});
        return;
    }
    std::vector<Path> mid;
    exec(c, fuel, *parts[i], o, mid);
    for (auto& r : mid) {
        if (r.outcome.kind != OutcomeKind::Final) out.push_back(std::move(r));
        else exec_seq(r.outcome.config, r.fuel, parts, i + 1, o, out);
    }
}

void exec(const Configuration& c, int fuel, const Stmt& s, RunOptions& o, std::vector<Path>& out) {
    switch (s.kind) {
        case StmtKind::Seq:
            exec_seq(c, fuel, s.body, 0, o, out);
            return;
        case StmtKind::If: {
            bool b = eval_cond(c, s.expr);
            if (o.trace) o.trace->push_back(one_line(s) + " : " + (b ? "then" : "else"));
            exec(c, fuel, *s.body[b ? 0 : 1], o, out);
            return;
        }
        case StmtKind::While: {
            std::vector<Path> frontier{{final_of(c), fuel}};
            while (!frontier.empty()) {
                std::vector<Path> next;
                for (auto& cur : frontier) {
                    bool b = eval_cond(cur.outcome.config, s.expr);
                    if (o.trace) o.trace->push_back(one_line(s) + " : " + (b ? "enter" : "exit"));
                    if (!b) {
                        out.push_back(std::move(cur));
                        continue;
                    }
                    if (cur.fuel <= 0)
                        throw Error(ErrorCode::FuelExhausted,
                                    "loop fuel exhausted at line " + std::to_string(s.span.line));
                    std::vector<Path> body;
                    exec(cur.outcome.config, cur.fuel - 1, *s.body[0], o, body);
                    for (auto& r : body) {
                        if (r.outcome.kind == OutcomeKind::Final) next.push_back(std::move(r));
                        else out.push_back(std::move(r));
                    }
                }
                frontier = std::move(next);
            }
            return;
        }
        default: {
            for (auto& r : step_basic(c, s)) {
                trace_line(o, s, r);
                out.push_back({std::move(r), fuel});
            }
        }
    }
}

}  // namespace

std::vector<Outcome> step(const Configuration& c, const Stmt& s) {
    if (is_basic(s)) return step_basic(c, s);
    RunOptions o;
    return run(c, std::make_shared<Stmt>(s), o);
}

std::vector<Outcome> run(const Configuration& c, const StmtPtr& program, RunOptions opts) {
    std::vector<Path> paths;
    exec(c, opts.fuel, *program, opts, paths);
    std::vector<Outcome> out;
    out.reserve(paths.size());
    for (auto& p : paths) out.push_back(std::move(p.outcome));
    return out;
}

}  // namespace fl
