#pragma once

// Property suites shared by the unit tests (small bounds) and the acceptance binary (full bounds).

#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fl/ford.hpp"
#include "fl/framecheck.hpp"
#include "fl/hoare.hpp"
#include "fl/oracle.hpp"
#include "fl/psl.hpp"
#include "fl/rewrite.hpp"
#include "fl/semantics.hpp"
#include "fl/textio.hpp"

namespace suites {

using namespace fl;

inline std::string corpus(const std::string& f) { return std::string(FL_CORPUS_DIR) + "/" + f; }

struct Result {
    size_t checked = 0;
    size_t failures = 0;
    size_t skipped = 0;
    std::string first;
    void fail(const std::string& msg) {
        if (!failures++) first = msg;
    }
    bool ok() const { return failures == 0 && checked > 0; }
    void add(const Result& o) {
        checked += o.checked;
        skipped += o.skipped;
        if (o.failures && !failures) first = o.first;
        failures += o.failures;
    }
};

inline const ParsedFile& mixed() {
    static ParsedFile f = load_file(corpus("formulas.fl"));
    return f;
}

inline const ParsedFile& trees() {
    static ParsedFile f = load_file(corpus("tree.fl"));
    return f;
}

// every library definition applied to variables
inline std::vector<NodePtr> applied_defs() {
    std::vector<NodePtr> out;
    for (auto& d : mixed().defs.all()) {
        std::vector<NodePtr> args;
        int locs = 0;
        for (auto& p : d.params)
            args.push_back(p.sort == Sort::Int ? mk::var("n", Sort::Int) : mk::var(locs++ ? "y" : "x"));
        out.push_back(mk::rel(d.name, args));
    }
    return out;
}

inline std::vector<NodePtr> corpus_formulas() {
    auto out = applied_defs();
    for (auto& g : mixed().goals) out.push_back(g);
    return out;
}

inline std::vector<Binder> free_binders(const NodePtr& n) {
    std::vector<Binder> vars;
    for (auto& [name, s] : free_variables(n)) vars.push_back({Symbol(name), s});
    return vars;
}

// definitions reachable from name, with their original order kept
inline DefinitionSet closure(const DefinitionSet& defs, const std::string& name) {
    std::set<std::string> fs, rs{name}, seen;
    std::vector<std::string> todo{name};
    while (!todo.empty()) {
        auto r = todo.back();
        todo.pop_back();
        auto* d = defs.find(r);
        if (!d || !seen.insert(r).second) continue;
        std::set<std::string> more;
        collect_symbols(d->body, fs, more);
        todo.insert(todo.end(), more.begin(), more.end());
    }
    DefinitionSet out;
    for (auto& d : defs.all())
        if (seen.count(d.name)) out.add(d);
    return out;
}

inline void each_model(std::shared_ptr<const Signature> sig, const std::set<std::string>& fields, int max_fg,
                       IntRange ints, const std::function<void(const PreModel&)>& f) {
    ModelFilter filter;
    filter.functions = fields;
    for (int fg = 1; fg <= max_fg; ++fg) {
        PreModelEnumerator en(sig, fg, ints, filter);
        PreModel m = en.base();
        while (en.next(m)) f(m);
    }
}

// stability on the support implies preservation, for every corpus formula
inline Result frame_theorem(int fg, IntRange ints) {
    Result r;
    auto defs = std::make_shared<const DefinitionSet>(mixed().defs);
    for (auto& phi : corpus_formulas()) {
        auto s = frame_sweep(mixed().sig, defs, phi, FrameSweepOptions{fg, ints, 3, 0, 0});
        r.checked += s.applicable;
        if (s.violations) r.fail(print(phi) + ": " + *s.counterexample);
    }
    return r;
}

// worklist engine against the sweeping oracle, in both worklist orders
inline Result oracle_agreement(int fg, IntRange ints) {
    Result r;
    auto& lib = mixed();
    for (auto& d : lib.defs.all()) {
        auto defs = closure(lib.defs, d.name);
        auto dptr = std::make_shared<const DefinitionSet>(defs);
        std::set<std::string> fields;
        for (auto& e : defs.all()) {
            auto u = functions_used(e.body, defs);
            fields.insert(u.begin(), u.end());
        }
        each_model(lib.sig, fields, fg, ints, [&](const PreModel& m) {
            auto pre = std::make_shared<const PreModel>(m);
            FrameModel fwd(pre, dptr), rev(pre, dptr, {WorklistOrder::Reverse});
            auto fp = naive_fixpoint(m, defs);
            for (size_t k = 0; k < defs.size(); ++k) {
                auto& name = defs.all()[k].name;
                ++r.checked;
                if (fwd.truth_table(name) != fp.truth[k] || fwd.support_table(name) != fp.support[k])
                    r.fail(name + " differs from the oracle on\n" + print(m));
                if (rev.truth_table(name) != fp.truth[k] || rev.support_table(name) != fp.support[k])
                    r.fail(name + " depends on worklist order on\n" + print(m));
            }
        });
    }
    return r;
}

// truth and support of the first-order translation agree pointwise
inline Result ford_agreement(int fg, IntRange ints) {
    Result r;
    auto& lib = mixed();
    auto dptr = std::make_shared<const DefinitionSet>(lib.defs);
    for (auto& phi : corpus_formulas()) {
        auto prog = translate_formula(*lib.sig, lib.defs, phi);
        auto vars = free_binders(phi);
        bool bad = false;
        each_model(lib.sig, functions_used(phi, lib.defs), fg, ints, [&](const PreModel& m) {
            if (bad) return;
            auto pre = std::make_shared<const PreModel>(m);
            FrameModel fm(pre, dptr);
            FordModel fo(pre, prog);
            enumerate_assignments(m, vars, [&](const Assignment& a) {
                ++r.checked;
                if (fo.eval(a) != fm.eval(phi, a) || fo.support(a) != fm.support(phi, a)) {
                    r.fail(print(phi) + " disagrees under " + a.str() + " on\n" + print(m));
                    bad = true;
                }
                return !bad;
            });
        });
    }
    return r;
}

struct WtpEnv {
    std::shared_ptr<Signature> sig;
    DefinitionSet defs;
};

inline const WtpEnv& wtp_env() {
    static WtpEnv e = [] {
        auto f = load_file(corpus("library.fl"));
        for (auto v : {"x", "y", "w"}) f.sig->add_variable(v, Sort::Foreground);
        f.sig->add_variable("n", Sort::Int);
        return WtpEnv{f.sig, f.defs};
    }();
    return e;
}

inline std::vector<std::string> wtp_commands() {
    return {"x := y", "x := nil", "x := y.next", "x.next := y", "x.key := n", "n := n + 1", "alloc(x)", "free(x)"};
}

inline std::vector<std::string> wtp_posts() {
    return {"true",
            "x = y",
            "next(x) = y",
            "key(x) = n",
            "list(x)",
            "list(y) && x notin Sp(list(y))",
            "y in Sp(list(x))",
            "lseg(x, y) && next(y) = nil",
            "list(x) && list(y) && Sp(list(x)) cap Sp(list(y)) = emptyset",
            "x != nil && next(next(x)) = y",
            "exists z : z = next(x) . z = y",
            "slist(x) && key(y) <= n"};
}

// the generated precondition describes exactly the preconfigurations
inline Result wtp_exactness(const Bounds& b, const std::vector<std::string>& cmds,
                            const std::vector<std::string>& posts) {
    Result r;
    auto& e = wtp_env();
    for (auto& c : cmds)
        for (auto& p : posts) {
            ProgramLogic lg(e.sig, e.defs);
            auto s = parse_program(c, *e.sig, e.defs);
            auto beta = parse_formula(p, *e.sig, e.defs);
            for (int fg = 1; fg <= b.fg_size; ++fg) {
                auto res = check_wtp_property(lg, *s, beta, Bounds{fg, b.ints, b.fuel});
                r.checked += res.cases;
                if (res.verdict == Verdict::Valid) continue;
                std::string where;
                if (res.counterexample)
                    where = " at " + res.counterexample->str() + "\n" + print(*res.counterexample->heap);
                r.fail(c + " / " + p + ": " + res.detail + where);
            }
        }
    return r;
}

// equal truth and equal support everywhere
inline Result equivalent(const ProgramLogic& lg, const NodePtr& a, const NodePtr& b, int fg, IntRange ints) {
    Result r;
    auto defs = lg.defs();
    auto vars = free_binders(mk::and_(a, b));
    each_model(lg.signature_ptr(), functions_used(mk::and_(a, b), *defs), fg, ints, [&](const PreModel& m) {
        auto fm = frame_model(std::make_shared<const PreModel>(m), defs);
        enumerate_assignments(m, vars, [&](const Assignment& as) {
            ++r.checked;
            if (fm.eval(a, as) != fm.eval(b, as) || fm.support(a, as) != fm.support(b, as)) {
                r.fail(print(a) + " vs " + print(b) + " under " + as.str() + " on\n" + print(m));
                return false;
            }
            return true;
        });
    });
    return r;
}

struct Identity {
    std::string program, post, expected;
};

inline std::vector<Identity> local_identities() {
    return {
        {"x := y", "x = y", "y = y"},
        {"x := nil", "x = nil", "true"},
        {"x := y.next", "x = next(y)", "next(y) = next(y) && y in Sp(next(y) = next(y))"},
        {"x.next := y", "next(x) = y", "next(x) = next(x)"},
        {"x.key := n", "key(x) = n", "key(x) = key(x)"},
        {"alloc(x)", "next(x) = nil", "true"},
        {"alloc(x)", "key(x) = 0", "true"},
        {"free(x)", "true", "key(x) = key(x)"},
    };
}

inline Result local_rules(int fg, IntRange ints) {
    Result r;
    auto& e = wtp_env();
    for (auto& id : local_identities()) {
        ProgramLogic lg(e.sig, e.defs);
        auto w = lg.wtp(parse_program(id.program, *e.sig, e.defs), parse_formula(id.post, *e.sig, e.defs));
        auto res = equivalent(lg, w, parse_formula(id.expected, *e.sig, e.defs), fg, ints);
        r.add(res);
        if (!res.ok() && res.failures == 0) r.fail(id.program + ": nothing checked");
    }
    return r;
}

inline Result reversal(int fg, int fuel) {
    Result r;
    auto f = load_file(corpus("reversal.flp"));
    ProgramLogic lg(f.sig, f.defs);
    auto res = verify(lg, f.triples.at(0), Bounds{fg, {-1, 1}, fuel});
    if (res.reports.size() != 3) r.fail("expected 3 obligations, got " + std::to_string(res.reports.size()));
    std::vector<std::string> want = {"init", "preserve", "exit"};
    for (size_t k = 0; k < res.reports.size() && k < 3; ++k) {
        auto& rep = res.reports[k];
        r.checked += rep.result.cases;
        if (rep.obligation.provenance.find(want[k]) == std::string::npos)
            r.fail("obligation " + rep.obligation.id + " is " + rep.obligation.provenance);
        if (rep.result.verdict != Verdict::Valid) r.fail(to_jsonl(rep));
    }
    if (res.verdict != Verdict::Valid) r.fail("verdict " + std::string(verdict_name(res.verdict)));
    return r;
}

inline const ParsedFile& shapes() {
    static ParsedFile f = load_file(corpus("shapes.slf"));
    return f;
}

// translation soundness in both directions, support = least sub-heaplet, and precision
inline Result psl_suite_at(int fg, IntRange ints) {
    Result r;
    auto& f = shapes();
    auto heaplets = enumerate_heaplets(f.sig, fg, ints);
    std::vector<Binder> vars;
    for (auto& [v, s] : f.sig->variables()) vars.push_back({Symbol(v), s});
    PreModel dom_model(f.sig, fg, ints);
    for (auto& phi : f.sl_goals) {
        auto t = translate_psl(phi, f.sl_defs);
        auto tdefs = std::make_shared<const DefinitionSet>(t.defs);
        auto prec = precision(phi);
        std::string name = print(phi);
        for (auto& h : heaplets) {
            for (auto mode : {Completion::Nil, Completion::Self}) {
                auto M = std::make_shared<const PreModel>(complete_heaplet(h, mode));
                FrameModel fm(M, tdefs);
                SLEvaluator ev(M, f.sl_defs);
                enumerate_assignments(dom_model, vars, [&](const Assignment& s) {
                    ++r.checked;
                    std::string at = " under " + s.str() + " on " + format_heaplet(h);
                    bool sat = ev.eval(phi, s, h.dom);
                    bool tr = fm.eval(t.formula, s);
                    LocSet sp = fm.support(t.formula, s);
                    if (sat && !tr) r.fail(name + ": translation false" + at);
                    // nil is never allocated, so a support containing it names no heaplet
                    if (tr && has(sp, 0)) ++r.skipped;
                    else if (tr && !ev.eval(phi, s, sp)) r.fail(name + ": support heaplet does not satisfy" + at);
                    if (!sat) return true;
                    try {
                        auto least = minimum_subheap(s, h, phi, f.sl_defs);
                        if (!least) r.fail(name + ": no satisfying sub-heaplet" + at);
                        else if (least->dom != sp) r.fail(name + ": support differs from the least heaplet" + at);
                    } catch (const Error& e) {
                        r.fail(name + ": " + e.what() + at);
                    }
                    if (mode == Completion::Nil && fm.eval(prec, s)) {
                        int n = 0;
                        for (LocSet sub = h.dom;; sub = (sub - 1) & h.dom) {
                            if (ev.eval(phi, s, sub)) ++n;
                            if (sub == 0) break;
                        }
                        if (n > 1) r.fail(name + ": precise yet " + std::to_string(n) + " sub-heaplets satisfy" + at);
                    }
                    return true;
                });
            }
        }
    }
    return r;
}

inline Result psl_suite(int max_fg, IntRange ints) {
    Result r;
    for (int fg = 1; fg <= max_fg; ++fg) r.add(psl_suite_at(fg, ints));
    return r;
}

// next/left/right edges out of cells reachable from start, nil excluded
inline bool cycle_from(const PreModel& m, int start, const std::vector<std::string>& fields) {
    std::vector<int> state(m.fg_size(), 0);
    std::function<bool(int)> dfs = [&](int u) {
        if (u == 0) return false;
        if (state[u] == 1) return true;
        if (state[u] == 2) return false;
        state[u] = 1;
        for (auto& f : fields)
            if (dfs(static_cast<int>(m.get(f, {Value::loc(u)}).v))) return true;
        state[u] = 2;
        return false;
    };
    return dfs(start);
}

inline bool acyclic(const PreModel& m, const std::vector<std::string>& fields) {
    for (int u = 1; u < m.fg_size(); ++u)
        if (cycle_from(m, u, fields)) return false;
    return true;
}

inline Result data_structures(int fg) {
    Result r;
    struct Shape {
        const ParsedFile* file;
        std::string formula;
        std::vector<std::string> fields;
    };
    std::vector<Shape> shapes = {{&mixed(), "list(x)", {"next"}}, {&trees(), "tree(x)", {"left", "right"}}};
    for (auto& s : shapes) {
        auto phi = parse_formula(s.formula, *s.file->sig, s.file->defs);
        auto defs = std::make_shared<const DefinitionSet>(s.file->defs);
        std::set<std::string> fs(s.fields.begin(), s.fields.end());
        each_model(s.file->sig, fs, fg, {0, 0}, [&](const PreModel& m) {
            auto fm = frame_model(std::make_shared<const PreModel>(m), defs);
            bool acyc = acyclic(m, s.fields);
            for (int u = 0; u < m.fg_size(); ++u) {
                Assignment a;
                a.set("x", Value::loc(u));
                ++r.checked;
                std::string at = s.formula + " at " + element_name(u) + " on\n" + print(m);
                if (acyc && fm.support(phi, a) != reachable(m, u, s.fields)) r.fail("support is not reachability: " + at);
                if (u != 0 && cycle_from(m, u, s.fields) && fm.eval(phi, a)) r.fail("true on a cycle: " + at);
            }
        });
    }
    return r;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> corpus_files() {
    return {"library.fl", "formulas.fl", "tree.fl", "reversal.flp", "shapes.slf"};
}

// print, parse again and print again: the AST and the text are stable
inline Result round_trip() {
    Result r;
    for (auto& name : corpus_files()) {
        auto f = load_file(corpus(name));
        auto mode = mode_for_path(name);
        auto text = print(f, mode);
        auto g = parse_file(text, name, mode);
        ++r.checked;
        if (print(g, mode) != text) r.fail(name + ": printed text changes on a second round");
        bool same = f.defs.size() == g.defs.size() && f.goals.size() == g.goals.size() &&
                    f.triples.size() == g.triples.size() && f.sl_goals.size() == g.sl_goals.size() &&
                    f.sl_defs.all().size() == g.sl_defs.all().size();
        for (size_t k = 0; same && k < f.defs.size(); ++k)
            same = f.defs.all()[k].name == g.defs.all()[k].name &&
                   structurally_equal(f.defs.all()[k].body, g.defs.all()[k].body);
        for (size_t k = 0; same && k < f.goals.size(); ++k) same = structurally_equal(f.goals[k], g.goals[k]);
        for (size_t k = 0; same && k < f.triples.size(); ++k)
            same = structurally_equal(f.triples[k].pre, g.triples[k].pre) &&
                   structurally_equal(f.triples[k].post, g.triples[k].post) &&
                   structurally_equal(f.triples[k].program, g.triples[k].program);
        for (size_t k = 0; same && k < f.sl_goals.size(); ++k) same = structurally_equal(f.sl_goals[k], g.sl_goals[k]);
        for (size_t k = 0; same && k < f.sl_defs.all().size(); ++k)
            same = structurally_equal(f.sl_defs.all()[k].body, g.sl_defs.all()[k].body);
        if (!same) r.fail(name + ": parse of the printed text differs");
    }
    auto m = parse_model(slurp(corpus("tree3.mdl")), trees().sig);
    ++r.checked;
    if (print(parse_model(print(m), trees().sig)) != print(m)) r.fail("tree3.mdl does not round-trip");
    return r;
}

struct CliRun {
    int status = -1;
    std::string out;
};

inline CliRun cli(const std::string& args) {
    CliRun r;
    std::string cmd = std::string(FL_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

inline std::vector<std::string> cli_invocations() {
    auto c = [](const std::string& f) { return corpus(f); };
    return {
        "eval " + c("tree.fl") + " --model " + c("tree3.mdl") + " --nu x=u1",
        "support " + c("tree.fl") + " --model " + c("tree3.mdl") + " --nu x=u1",
        "frame-check " + c("tree.fl") + " --fg-size 4 --samples 300 --seed 7",
        "frame-check " + c("tree.fl") + " --fg-size 2 --format jsonl",
        "translate-ford " + c("tree.fl"),
        "translate-psl " + c("shapes.slf") + " --formula \"ls(x) * ls(y)\"",
        "min-heap " + c("shapes.slf") + " --formula \"x |-next-> y * y |-next-> nil\" --nu x=u1,y=u2,z=nil --fg-size 3",
        "wtp " + c("reversal.flp") + " --program \"i := i.next\" --formula \"list(i)\"",
        "check-triple " + c("reversal.flp") + " --fg-size 3",
        "verify " + c("reversal.flp") + " --fg-size 4 --format jsonl",
    };
}

// identical flags give identical bytes
inline Result determinism() {
    Result r;
    for (auto& args : cli_invocations()) {
        auto a = cli(args), b = cli(args);
        ++r.checked;
        if (a.status != b.status || a.out != b.out) r.fail("output differs between runs: " + args);
        if (a.status != 0) r.fail("exit " + std::to_string(a.status) + ": " + args + "\n" + a.out);
    }
    return r;
}

}  // namespace suites
