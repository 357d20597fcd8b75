#include "doctest.h"

#include <string>

#include "fl/rewrite.hpp"
#include "fl/textio.hpp"
#include "fl/validate.hpp"

using namespace fl;

namespace {

std::string corpus(const std::string& f) { return std::string(FL_CORPUS_DIR) + "/" + f; }

std::shared_ptr<Signature> heap_sig() {
    auto s = std::make_shared<Signature>();
    s->add_function({"next", {Sort::Foreground}, Sort::Foreground, true});
    s->add_function({"key", {Sort::Foreground}, Sort::Int, true});
    s->add_variable("x", Sort::Foreground);
    s->add_variable("y", Sort::Foreground);
    s->add_variable("n", Sort::Int);
    return s;
}

}  // namespace

TEST_CASE("library parses, validates and round-trips") {
    auto f = load_file(corpus("library.fl"));
    CHECK(f.defs.size() == 12);
    auto rep = validate_defs(*f.sig, f.defs);
    CHECK_MESSAGE(rep.ok(), rep.str());
    std::string once = print(f);
    auto g = parse_file(once, "again");
    CHECK(print(g) == once);
    REQUIRE(g.defs.size() == f.defs.size());
    for (size_t i = 0; i < f.defs.size(); ++i) {
        CHECK(f.defs.all()[i].name == g.defs.all()[i].name);
        CHECK(structurally_equal(f.defs.all()[i].body, g.defs.all()[i].body));
        CHECK(f.defs.all()[i].stratum == g.defs.all()[i].stratum);
    }
}

TEST_CASE("formula printing uses minimal parentheses") {
    auto s = heap_sig();
    auto p = [&](const std::string& t) { return print(parse_formula(t, *s)); };
    CHECK(p("x = nil || y = nil && n > 0") == "x = nil || y = nil && n > 0");
    CHECK(p("(x = nil || y = nil) && n > 0") == "(x = nil || y = nil) && n > 0");
    CHECK(p("x = nil => y = nil => n = 0") == "x = nil => y = nil => n = 0");
    CHECK(p("(x = nil => y = nil) => n = 0") == "(x = nil => y = nil) => n = 0");
    CHECK(p("!(x = y)") == "x != y");
    CHECK(p("!(x in Sp(next(y) = x))") == "x notin Sp(next(y) = x)");
    CHECK(p("x = nil && exists z : z = next(x) . z = y") == "x = nil && (exists z : z = next(x) . z = y)");
    CHECK(p("key(x) - (n - 1) = 0") == "key(x) - (n - 1) = 0");
    CHECK(p("key(x) - n - 1 = 0") == "key(x) - n - 1 = 0");
    CHECK(p("ite(x = nil : n, key(x)) = -2") == "ite(x = nil : n, key(x)) = -2");
    CHECK(p("Sp(next(x)) subseteq ~emptyset cup Sp(x = y)") == "Sp(next(x)) subseteq ~emptyset cup Sp(x = y)");
}

TEST_CASE("parse then print is stable on formulas") {
    auto s = heap_sig();
    for (std::string t : {"true", "x = y && !(y = nil || false)",
                          "forall (k : int) : true . k = k", "exists a, (m : int) : a = next(x) . key(a) < m",
                          "ite(ite(x = y : true, false) : x = y, !(n >= 0))", "Sp(Sp(x = y)) = emptyset",
                          "x in Sp(key(next(x)))"}) {
        auto a = parse_formula(t, *s);
        auto b = parse_formula(print(a), *s);
        CHECK_MESSAGE(structurally_equal(a, b), t);
        CHECK(print(a) == print(b));
    }
}

TEST_CASE("parse errors carry positions and expectations") {
    auto s = heap_sig();
    try {
        parse_formula("x = nil &&\n  y ==", *s);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.span().line == 2);
        CHECK(e.span().column >= 3);
    }
    CHECK_THROWS_AS(parse_formula("x = nxt(y)", *s), ParseError);
    CHECK_THROWS_AS(parse_formula("x = ", *s), ParseError);
    CHECK_THROWS_AS(parse_file("field f : loc -> loc; field f : loc -> loc;"), ParseError);
}

TEST_CASE("programs round-trip") {
    auto s = heap_sig();
    std::string src =
        "y := nil; while x != nil invariant: true do { n := n + 1; x := x.next }; "
        "if x = y then { alloc(x); x.next := y } else { free(y) }";
    auto p = parse_program(src, *s);
    CHECK(p->kind == StmtKind::Seq);
    auto q = parse_program(print(p), *s);
    CHECK(structurally_equal(p, q));
    CHECK(print(q) == print(p));
    auto t = parse_triple("{ x = nil } y := x { y = nil }", *s);
    CHECK(print(t.post) == "y = nil");
    CHECK(t.program->kind == StmtKind::AssignVar);
}

TEST_CASE("model files round-trip bit-exactly") {
    auto s = heap_sig();
    PreModel m(s, 3, {-2, 2});
    m.set("next", {Value::loc(1)}, Value::loc(2));
    m.set("key", {Value::loc(2)}, Value::integer(-2));
    std::string text = print(m);
    auto back = parse_model(text, s);
    CHECK(back == m);
    CHECK(print(back) == text);
    ConfigExtras ex;
    auto withheap = parse_model(text + "heap: {u1, u2}\nfree: {}\n", s, ex);
    CHECK(ex.has_heap);
    CHECK(ex.H == (bit(1) | bit(2)));
    CHECK(ex.U == 0);
    CHECK(withheap == m);
}

TEST_CASE("separation logic syntax") {
    auto s = heap_sig();
    SLDefinitionSet defs;
    auto pf = parse_file("field next : loc -> loc;\n"
                         "ls(x) := ite(x = nil, emp, exists y. (x |-next-> y) * ls(y));\n"
                         "goal x |-next-> nil * ls(y) && [x != y];\n",
                         "t.slf", FileMode::Separation);
    REQUIRE(pf.sl_defs.all().size() == 1);
    REQUIRE(pf.sl_goals.size() == 1);
    std::string text = print(pf, FileMode::Separation);
    auto again = parse_file(text, "u.slf", FileMode::Separation);
    CHECK(print(again, FileMode::Separation) == text);
    CHECK(structurally_equal(pf.sl_defs.all()[0].body, again.sl_defs.all()[0].body));
    CHECK(structurally_equal(pf.sl_goals[0], again.sl_goals[0]));
}
