#include "doctest.h"

#include "fl/hoare.hpp"
#include "fl/rewrite.hpp"
#include "fl/semantics.hpp"
#include "fl/textio.hpp"

using namespace fl;

namespace {

std::string corpus(const std::string& f) { return std::string(FL_CORPUS_DIR) + "/" + f; }

struct Env {
    std::shared_ptr<Signature> sig;
    DefinitionSet defs;
};

const Env& env() {
    static Env e = [] {
        auto f = load_file(corpus("library.fl"));
        for (auto v : {"x", "y", "w"}) f.sig->add_variable(v, Sort::Foreground);
        f.sig->add_variable("n", Sort::Int);
        return Env{f.sig, f.defs};
    }();
    return e;
}

ProgramLogic logic() { return ProgramLogic(env().sig, env().defs); }
NodePtr F(const std::string& s) { return parse_formula(s, *env().sig, env().defs); }
StmtPtr P(const std::string& s) { return parse_program(s, *env().sig, env().defs); }

// semantic equivalence plus equal supports on every model and assignment
void same_meaning(const ProgramLogic& lg, const NodePtr& a, const NodePtr& b, int fg) {
    auto defs = lg.defs();
    std::vector<Binder> vars;
    std::map<std::string, Sort> fv = free_variables(a);
    for (auto& [n, s] : free_variables(b)) fv[n] = s;
    for (auto& [n, s] : fv) vars.push_back({Symbol(n), s});
    ModelFilter filter;
    filter.functions = functions_used(mk::and_(a, b), *defs);
    PreModelEnumerator en(env().sig, fg, {-1, 1}, filter);
    PreModel m = en.base();
    while (en.next(m)) {
        auto fm = frame_model(std::make_shared<const PreModel>(m), defs);
        enumerate_assignments(m, vars, [&](const Assignment& as) {
            REQUIRE_MESSAGE(fm.eval(a, as) == fm.eval(b, as), print(a) << " vs " << print(b) << " at " << as.str());
            REQUIRE(fm.support(a, as) == fm.support(b, as));
            return true;
        });
    }
}

}  // namespace

TEST_CASE("mw mutation shapes") {
    auto lg = logic();
    auto r = lg.mw_mutation("x", "next", mk::var("y"), F("next(x) = y"));
    CHECK(print(r) == "ite(x = x : ite(next(x) = next(x) : y, y), next(x)) = y");
    auto same = F("key(w) = n");
    CHECK(lg.mw_mutation("x", "next", mk::var("y"), same) == same);
    auto nested = lg.mw_mutation("x", "next", mk::var("y"), F("next(next(w)) = y"));
    CHECK(print(nested).find("next(ite(w = x") != std::string::npos);
}

TEST_CASE("mw alloc shapes") {
    auto lg = logic();
    auto r = lg.mw_alloc("x", "v", F("next(x) = nil"));
    CHECK(print(r) == "ite(v = v : nil, next(v)) = nil");
    auto same = F("next(y) = w");
    CHECK(structurally_equal(lg.mw_alloc("x", "v", same), F("ite(y = v : nil, next(y)) = w")));
    auto plain = F("y = w && n > 0");
    CHECK(lg.mw_alloc("x", "v", plain) == plain);
    auto sp = lg.mw_alloc("x", "v", F("y in Sp(list(x))"));
    CHECK(sp->kind == Kind::Rel);
    CHECK(sp->name().rfind("halloc#", 0) == 0);
}

TEST_CASE("wtp rule instances") {
    auto lg = logic();
    CHECK(print(lg.wtp(P("x := y"), F("x = y"))) == "y = y");
    CHECK(print(lg.wtp(P("free(x)"), F("true"))) == "true && x notin Sp(true) && key(x) = key(x)");
    auto lk = lg.wtp(P("x := y.next"), F("x = next(y)"));
    CHECK(lk->kind == Kind::Exists);
    CHECK_THROWS_AS(lg.wtp(P("while x != nil do { x := x.next }"), F("true")), Error);
}

TEST_CASE("local rule identities") {
    auto lg = logic();
    same_meaning(lg, lg.wtp(P("x := y"), F("x = y")), F("y = y"), 3);
    same_meaning(lg, lg.wtp(P("x := y.next"), F("x = next(y)")), F("next(y) = next(y) && y in Sp(next(y) = next(y))"), 3);
    same_meaning(lg, lg.wtp(P("x.next := y"), F("next(x) = y")), F("next(x) = next(x)"), 3);
    same_meaning(lg, lg.wtp(P("x := nil"), F("x = nil")), F("true"), 3);
    same_meaning(lg, lg.wtp(P("free(x)"), F("true")), F("key(x) = key(x)"), 3);
}

TEST_CASE("wtp exactness on small bounds") {
    std::vector<std::string> posts = {"true", "x = y", "next(x) = y", "list(x)", "list(y) && x notin Sp(list(y))",
                                      "y in Sp(list(x))", "next(x) = nil && key(x) = 0"};
    std::vector<std::string> cmds = {"x := y", "x := nil", "x := y.next", "x.next := y", "alloc(x)", "free(x)"};
    Bounds b{2, {-1, 1}, 8};
    for (auto& c : cmds)
        for (auto& p : posts) {
            auto lg = logic();
            auto s = P(c);
            auto r = check_wtp_property(lg, *s, F(p), b);
            CHECK_MESSAGE(r.verdict == Verdict::Valid, c << " / " << p << ": " << r.detail << " "
                                                         << (r.counterexample ? r.counterexample->str() : ""));
        }
}

TEST_CASE("triples") {
    auto lg = logic();
    Bounds b{2, {-1, 1}, 8};
    auto t = [&](const std::string& s) { return parse_triple(s, *env().sig, env().defs); };
    CHECK(check_triple(lg, t("{ true } x := nil { x = nil }"), b).verdict == Verdict::Valid);
    auto bad = check_triple(lg, t("{ true } x := y.next { x = next(y) }"), b);
    CHECK(bad.verdict == Verdict::Invalid);
    CHECK(bad.counterexample.has_value());
    CHECK(check_triple(lg, t("{ next(x) = next(x) } x.next := y { next(x) = y }"), b).verdict == Verdict::Valid);
    auto loop = t("{ true } while x = x do { skip } { true }");
    CHECK(check_triple(lg, loop, b).verdict == Verdict::Inconclusive);
}

TEST_CASE("vc generation for reversal") {
    auto f = load_file(corpus("reversal.flp"));
    REQUIRE(f.triples.size() == 1);
    ProgramLogic lg(f.sig, f.defs);
    auto obs = vc_gen(lg, f.triples[0]);
    REQUIRE(obs.size() == 3);
    CHECK(obs[0].provenance.find("init") != std::string::npos);
    CHECK(obs[1].provenance.find("preserve") != std::string::npos);
    CHECK(obs[2].provenance.find("exit") != std::string::npos);
    auto res = verify(lg, f.triples[0], Bounds{4, {-1, 1}, 32});
    for (auto& r : res.reports) CHECK_MESSAGE(r.result.verdict == Verdict::Valid, to_jsonl(r));
    CHECK(res.verdict == Verdict::Valid);
    CHECK(check_triple(lg, f.triples[0], Bounds{4, {-1, 1}, 32}).verdict == Verdict::Valid);
}

TEST_CASE("conditional splits into two premises") {
    auto lg = logic();
    auto t = parse_triple("{ next(x) = next(x) } if x = y then { x.next := nil } else { x.next := y } { next(x) = y || next(x) = nil }",
                          *env().sig, env().defs);
    auto obs = vc_gen(lg, t);
    REQUIRE(obs.size() == 2);
    CHECK(obs[0].provenance.find("then") != std::string::npos);
}

TEST_CASE("frame rule side conditions") {
    auto lg = logic();
    Bounds b{3, {-1, 1}, 8};
    auto s = P("x.next := nil");
    auto fr = check_frame_rule(lg, F("next(x) = next(x)"), s, F("list(y) && x notin Sp(list(y))"), b);
    CHECK(fr.disjoint_supports);
    CHECK(fr.untouched_variables);
    auto pre = F("next(x) = next(x) && list(y) && x notin Sp(list(y))");
    auto post = F("next(x) = nil && list(y) && x notin Sp(list(y))");
    CHECK(check_triple(lg, Triple{"", pre, s, post}, b).verdict == Verdict::Valid);
    auto bad = check_frame_rule(lg, F("next(x) = next(x)"), P("y := x"), F("list(y)"), b);
    CHECK_FALSE(bad.untouched_variables);
}

TEST_CASE("obligation records") {
    Obligation o{"o1", ObligationKind::Implication, "Consequence: init", F("x = y"), F("y = x")};
    ObligationReport r{o, CheckResult{}};
    auto line = to_jsonl(r);
    CHECK(line.find("\"id\":\"o1\"") != std::string::npos);
    CHECK(line.find("\"formula-text\"") != std::string::npos);
    CHECK(line.find("\"verdict\":\"valid\"") != std::string::npos);
    CHECK(line.find("counterexample") == std::string::npos);
}
