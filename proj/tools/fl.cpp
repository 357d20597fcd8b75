#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fl/ford.hpp"
#include "fl/framecheck.hpp"
#include "fl/hoare.hpp"
#include "fl/psl.hpp"
#include "fl/rewrite.hpp"
#include "fl/semantics.hpp"
#include "fl/textio.hpp"
#include "fl/validate.hpp"

using namespace fl;
using json = nlohmann::ordered_json;

namespace {

enum Exit { Pass = 0, Counterexample = 1, Usage = 2, Inconclusive = 3 };

struct Options {
    std::string input;
    std::string model;
    std::string formula;
    std::string program;
    std::string nu;
    std::string heap;
    std::string unalloc;
    std::string format = "text";
    std::string int_range = "-2..2";
    int fg_size = 3;
    int fuel = 32;
    uint64_t seed = 0;
    size_t samples = 10000;
    bool trace = false;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

IntRange int_range(const std::string& s) {
    auto dots = s.find("..");
    if (dots == std::string::npos) throw UsageError("--int-range expects LO..HI");
    try {
        IntRange r{std::stoll(s.substr(0, dots)), std::stoll(s.substr(dots + 2))};
        if (r.lo > r.hi) throw UsageError("empty --int-range");
        return r;
    } catch (const std::logic_error&) {
        throw UsageError("--int-range expects LO..HI");
    }
}

Bounds bounds(const Options& o) { return Bounds{o.fg_size, int_range(o.int_range), o.fuel}; }

bool jsonl(const Options& o) { return o.format == "jsonl"; }

void emit(const Options& o, const json& j, const std::string& text) {
    if (jsonl(o))
        std::cout << j.dump() << "\n";
    else
        std::cout << text << "\n";
}

Assignment parse_nu(const std::string& s, const Signature& sig) {
    Assignment a;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("--nu expects var=value,...");
        std::string name = item.substr(0, eq), val = item.substr(eq + 1);
        auto sort = sig.variable(name);
        if (!sort) throw UsageError("unknown variable " + name);
        auto v = parse_value(val, *sort);
        if (!v) throw UsageError("bad value " + val + " for " + name);
        a.set(name, *v);
    }
    return a;
}

LocSet parse_locset(const std::string& s) {
    auto v = parse_value(s, Sort::SetOfForeground);
    if (!v) throw UsageError("bad location set " + s);
    return v->mask();
}

std::vector<NodePtr> goals(const Options& o, const ParsedFile& f) {
    if (!o.formula.empty()) return {parse_formula(o.formula, *f.sig, f.defs)};
    if (f.goals.empty()) throw UsageError("no goal in " + o.input + " and no --formula");
    return f.goals;
}

void require_bound(const Assignment& a, const NodePtr& n) {
    for (auto& [name, sort] : free_variables(n))
        if (!a.find(name)) throw Error(ErrorCode::UnboundVariable, name + " needs a value (use --nu)");
}

std::shared_ptr<const PreModel> load_model(const Options& o, const ParsedFile& f, ConfigExtras* extras = nullptr) {
    if (o.model.empty()) throw UsageError("--model is required");
    ConfigExtras ex;
    auto m = parse_model(read_text(o.model), f.sig, extras ? *extras : ex);
    return std::make_shared<const PreModel>(std::move(m));
}

int cmd_eval(const Options& o, bool want_support) {
    auto f = load_file(o.input);
    auto pre = load_model(o, f);
    auto fm = frame_model(pre, std::make_shared<const DefinitionSet>(f.defs));
    auto a = parse_nu(o.nu, *f.sig);
    for (auto& g : goals(o, f)) {
        require_bound(a, g);
        std::string text = print(g);
        if (want_support) {
            auto s = fm.support(g, a);
            emit(o, json{{"formula", text}, {"support", format_set(s)}}, format_set(s));
        } else if (g->is_term()) {
            auto v = fm.eval_term(g, a);
            emit(o, json{{"formula", text}, {"value", format_value(v)}}, text + " : " + format_value(v));
        } else {
            bool v = fm.eval(g, a);
            emit(o, json{{"formula", text}, {"value", v}}, text + " : " + (v ? "true" : "false"));
        }
    }
    return Pass;
}

int cmd_frame_check(const Options& o) {
    auto f = load_file(o.input);
    auto defs = std::make_shared<const DefinitionSet>(f.defs);
    FrameSweepOptions so{o.fg_size, int_range(o.int_range), 3, o.samples, o.seed};
    std::string mode = o.fg_size <= so.exhaustive_limit ? "exhaustive" : "sampled";
    emit(o,
         json{{"threshold", so.exhaustive_limit}, {"mode", mode}, {"fg-size", o.fg_size}, {"seed", o.seed},
              {"samples", o.fg_size <= so.exhaustive_limit ? 0 : o.samples}},
         "frame-check: exhaustive up to fg-size " + std::to_string(so.exhaustive_limit) + ", sampling " +
             std::to_string(o.samples) + " mutations above; fg-size " + std::to_string(o.fg_size) + " " + mode +
             ", seed " + std::to_string(o.seed));
    int rc = Pass;
    for (auto& g : goals(o, f)) {
        auto r = frame_sweep(f.sig, defs, g, so);
        std::string text = print(g);
        json j{{"formula", text},      {"models", r.models},         {"instances", r.instances},
               {"applicable", r.applicable}, {"violations", r.violations}};
        std::string line = text + " : " + std::to_string(r.violations) + " violations in " +
                           std::to_string(r.applicable) + " applicable of " + std::to_string(r.instances) +
                           " instances";
        if (r.counterexample) {
            j["counterexample"] = *r.counterexample;
            line += "\n" + *r.counterexample;
            rc = Counterexample;
        }
        emit(o, j, line);
    }
    return rc;
}

int cmd_translate_ford(const Options& o) {
    auto f = load_file(o.input);
    bool first = true;
    for (auto& g : goals(o, f)) {
        auto p = translate_formula(*f.sig, f.defs, g);
        std::string text = print(p, *f.sig);
        if (jsonl(o)) {
            emit(o, json{{"formula", print(g)}, {"root", p.root}, {"program", text}}, "");
        } else {
            if (!first) std::cout << "\n";
            std::cout << text;
        }
        first = false;
    }
    return Pass;
}

SLPtr sl_goal(const Options& o, const ParsedFile& f) {
    if (!o.formula.empty()) return parse_sl(o.formula, *f.sig, f.sl_defs);
    if (f.sl_goals.empty()) throw UsageError("no goal in " + o.input + " and no --formula");
    return f.sl_goals.front();
}

ParsedFile load_sl(const Options& o) {
    auto f = parse_file(read_text(o.input), o.input, FileMode::Separation);
    auto rep = validate_psl_defs(*f.sig, f.sl_defs);
    if (!rep.ok()) throw Error(ErrorCode::InvalidInput, rep.str());
    return f;
}

int cmd_translate_psl(const Options& o) {
    auto f = load_sl(o);
    auto phi = sl_goal(o, f);
    auto rep = validate_psl(*f.sig, f.sl_defs, phi);
    if (!rep.ok()) throw Error(ErrorCode::InvalidInput, rep.str());
    auto t = translate_psl(phi, f.sl_defs);
    ParsedFile out;
    out.sig = f.sig;
    out.defs = t.defs;
    out.goals = {t.formula};
    if (jsonl(o))
        emit(o, json{{"formula", print(phi)}, {"translation", print(t.formula)}, {"program", print(out)}}, "");
    else
        std::cout << print(out);
    return Pass;
}

int cmd_min_heap(const Options& o) {
    auto f = load_sl(o);
    auto phi = sl_goal(o, f);
    auto rep = validate_psl(*f.sig, f.sl_defs, phi);
    if (!rep.ok()) throw Error(ErrorCode::InvalidInput, rep.str());
    auto store = parse_nu(o.nu, *f.sig);
    std::optional<Heaplet> h;
    if (!o.model.empty()) {
        ConfigExtras ex;
        Heaplet within{0, load_model(o, f, &ex)};
        within.dom = !o.heap.empty() ? parse_locset(o.heap)
                     : ex.has_heap   ? ex.H
                                     : within.model->universe() & ~bit(0);
        h = minimum_subheap(store, within, phi, f.sl_defs);
    } else {
        try {
            h = minimum_heap(store, phi, f.sl_defs, enumerate_heaplets(f.sig, o.fg_size, int_range(o.int_range)));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoMinimum) throw;
            emit(o, json{{"formula", print(phi)}, {"minimum", nullptr}, {"reason", e.what()}},
                 std::string("no minimum: ") + e.what());
            return Counterexample;
        }
    }
    if (!h) {
        emit(o, json{{"formula", print(phi)}, {"minimum", nullptr}}, "unsatisfiable");
        return Counterexample;
    }
    emit(o, json{{"formula", print(phi)}, {"minimum", format_set(h->dom)}, {"heaplet", format_heaplet(*h)}},
         format_heaplet(*h));
    return Pass;
}

Triple first_triple(const Options& o, const ParsedFile& f) {
    if (!o.program.empty()) {
        auto post = o.formula.empty() ? mk::tru() : parse_formula(o.formula, *f.sig, f.defs);
        return Triple{"", mk::tru(), parse_program(o.program, *f.sig, f.defs), post};
    }
    if (f.triples.empty()) throw UsageError("no triple in " + o.input + " and no --program");
    auto t = f.triples.front();
    if (!o.formula.empty()) t.post = parse_formula(o.formula, *f.sig, f.defs);
    return t;
}

const char* outcome_name(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Final: return "final";
        case OutcomeKind::Abort: return "abort";
        case OutcomeKind::Stuck: return "stuck";
    }
    return "";
}

int cmd_run(const Options& o) {
    auto f = load_file(o.input);
    auto t = first_triple(o, f);
    ConfigExtras ex;
    Configuration c;
    c.heap = load_model(o, f, &ex);
    c.store = parse_nu(o.nu, *f.sig);
    c.H = o.heap.empty() ? ex.H : parse_locset(o.heap);
    c.U = o.unalloc.empty() ? ex.U : parse_locset(o.unalloc);
    for (auto& v : program_variables(*t.program))
        if (!c.store.find(v)) throw Error(ErrorCode::UnboundVariable, v + " needs a value (use --nu)");
    if (!valid_config(c)) throw UsageError("initial configuration is not valid");
    std::vector<std::string> trace;
    RunOptions ro{o.fuel, o.trace ? &trace : nullptr};
    auto outs = run(c, t.program, ro);
    for (auto& line : trace) std::cerr << line << "\n";
    int rc = Pass;
    for (auto& out : outs) {
        if (out.kind == OutcomeKind::Abort) rc = Counterexample;
        json j{{"outcome", outcome_name(out.kind)}};
        if (out.kind == OutcomeKind::Final) {
            j["store"] = out.config.store.str();
            j["H"] = format_set(out.config.H);
            j["U"] = format_set(out.config.U);
        }
        std::string text = outcome_name(out.kind);
        if (out.kind == OutcomeKind::Final) text += " " + out.config.str();
        emit(o, j, text);
    }
    return rc;
}

int cmd_wtp(const Options& o) {
    auto f = load_file(o.input);
    auto t = first_triple(o, f);
    ProgramLogic lg(f.sig, f.defs);
    auto w = lg.wtp(t.program, t.post);
    std::string derived;
    auto defs = lg.defs();
    for (auto& d : defs->all())
        if (!f.defs.find(d.name)) derived += print(d) + "\n";
    if (jsonl(o))
        emit(o, json{{"post", print(t.post)}, {"wtp", print(w)}, {"definitions", derived}}, "");
    else
        std::cout << derived << print(w) << "\n";
    return Pass;
}

int exit_for(Verdict v) {
    switch (v) {
        case Verdict::Valid: return Pass;
        case Verdict::Invalid: return Counterexample;
        case Verdict::Inconclusive: return Inconclusive;
    }
    return Usage;
}

int worse(int a, int b) {
    auto rank = [](int x) { return x == Counterexample ? 2 : x == Inconclusive ? 1 : 0; };
    return rank(a) >= rank(b) ? a : b;
}

std::vector<Triple> triples(const Options& o, const ParsedFile& f) {
    if (!o.program.empty() || f.triples.empty()) return {first_triple(o, f)};
    return f.triples;
}

int cmd_check_triple(const Options& o) {
    auto f = load_file(o.input);
    ProgramLogic lg(f.sig, f.defs);
    int rc = Pass;
    size_t k = 0;
    for (auto& t : triples(o, f)) {
        ++k;
        auto r = check_triple(lg, t, bounds(o));
        std::string name = t.name.empty() ? "triple " + std::to_string(k) : t.name;
        json j{{"triple", name}, {"verdict", verdict_name(r.verdict)}, {"cases", r.cases}};
        std::string text = name + " : " + verdict_name(r.verdict) + " (" + std::to_string(r.cases) + " cases)";
        if (!r.detail.empty()) {
            j["reason"] = r.detail;
            text += "\n  " + r.detail;
        }
        if (r.counterexample) {
            j["counterexample"] = r.counterexample->str();
            text += "\n  " + r.counterexample->str();
        }
        emit(o, j, text);
        rc = worse(rc, exit_for(r.verdict));
    }
    return rc;
}

int cmd_verify(const Options& o) {
    auto f = load_file(o.input);
    ProgramLogic lg(f.sig, f.defs);
    int rc = Pass;
    for (auto& t : triples(o, f)) {
        auto res = verify(lg, t, bounds(o));
        for (auto& r : res.reports) {
            if (jsonl(o)) {
                std::cout << to_jsonl(r) << "\n";
                continue;
            }
            std::cout << r.obligation.id << " [" << obligation_kind_name(r.obligation.kind) << "] "
                      << r.obligation.provenance << " : " << verdict_name(r.result.verdict) << " ("
                      << r.result.cases << " cases)\n";
            if (r.result.counterexample) std::cout << "  " << r.result.counterexample->str() << "\n";
            if (!r.result.detail.empty()) std::cout << "  " << r.result.detail << "\n";
        }
        if (!jsonl(o)) std::cout << (t.name.empty() ? "triple" : t.name) << " : " << verdict_name(res.verdict) << "\n";
        rc = worse(rc, exit_for(res.verdict));
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frame logic evaluator and bounded heap-program verifier"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* s) {
        s->add_option("input", o.input, "input file")->required();
        s->add_option("--fg-size", o.fg_size, "foreground universe size, nil included")->check(CLI::Range(1, 6));
        s->add_option("--int-range", o.int_range, "integer domain LO..HI");
        s->add_option("--fuel", o.fuel, "loop iterations per path")->check(CLI::NonNegativeNumber);
        s->add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "jsonl"}));
        s->add_option("--seed", o.seed, "seed for sampled checks");
        s->add_flag("--trace", o.trace, "print transitions to stderr");
        s->add_option("--nu", o.nu, "assignment var=value,...");
        s->add_option("--model", o.model, "model file");
        s->add_option("--formula", o.formula, "formula replacing the file's goals or postcondition");
        return s;
    };
    auto* eval = common(app.add_subcommand("eval", "evaluate goals on a model"));
    auto* support = common(app.add_subcommand("support", "print the support of goals on a model"));
    auto* frame = common(app.add_subcommand("frame-check", "check the frame property for every goal"));
    frame->add_option("--samples", o.samples, "mutations sampled above the exhaustive threshold");
    auto* ford = common(app.add_subcommand("translate-ford", "translate goals to first-order recursive definitions"));
    auto* tpsl = common(app.add_subcommand("translate-psl", "translate a separation logic goal to frame logic"));
    auto* minh = common(app.add_subcommand("min-heap", "least heaplet satisfying a separation logic goal"));
    auto* runc = common(app.add_subcommand("run", "execute a program on a configuration"));
    auto* wtpc = common(app.add_subcommand("wtp", "print the weakest tightest precondition"));
    auto* chk = common(app.add_subcommand("check-triple", "check triples by bounded execution"));
    auto* ver = common(app.add_subcommand("verify", "generate and check verification conditions"));
    for (auto* s : {runc, wtpc, chk, ver}) s->add_option("--program", o.program, "program text replacing the file's");
    for (auto* s : {runc, minh}) s->add_option("--heap", o.heap, "allocated locations, e.g. {u1,u2}");
    runc->add_option("--unalloc", o.unalloc, "unallocated locations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? Pass : Usage;
    }

    try {
        if (eval->parsed()) return cmd_eval(o, false);
        if (support->parsed()) return cmd_eval(o, true);
        if (frame->parsed()) return cmd_frame_check(o);
        if (ford->parsed()) return cmd_translate_ford(o);
        if (tpsl->parsed()) return cmd_translate_psl(o);
        if (minh->parsed()) return cmd_min_heap(o);
        if (runc->parsed()) return cmd_run(o);
        if (wtpc->parsed()) return cmd_wtp(o);
        if (chk->parsed()) return cmd_check_triple(o);
        if (ver->parsed()) return cmd_verify(o);
    } catch (const ParseError& e) {
        std::cerr << e.span().str() << ": " << e.what() << "\n";
        return Usage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::FuelExhausted) return Inconclusive;
        if (e.code() == ErrorCode::RequiresInvariant) return Inconclusive;
        return Usage;
    }
    return Usage;
}
