#include "doctest.h"

#include "fl/oracle.hpp"
#include "fl/textio.hpp"
#include "fl/whilelang.hpp"

using namespace fl;

namespace {

std::string corpus(const std::string& f) { return std::string(FL_CORPUS_DIR) + "/" + f; }

std::shared_ptr<Signature> sig() {
    static auto s = [] {
        auto f = load_file(corpus("library.fl"));
        for (auto v : {"x", "y", "i", "j", "k"}) f.sig->add_variable(v, Sort::Foreground);
        f.sig->add_variable("n", Sort::Int);
        return f.sig;
    }();
    return s;
}

StmtPtr P(const std::string& s) { return parse_program(s, *sig()); }

PreModel blank(int fg) {
    PreModel m(sig(), fg, IntRange{-2, 2});
    for (auto f : {"next", "prev", "left", "right", "tnext"})
        for (int c = 0; c < fg; ++c) m.set(f, {Value::loc(c)}, Value::loc(0));
    for (int c = 0; c < fg; ++c) m.set("key", {Value::loc(c)}, Value::integer(0));
    return m;
}

Configuration config(PreModel m, LocSet H, LocSet U, std::vector<std::pair<std::string, int>> store) {
    Configuration c;
    c.heap = std::make_shared<const PreModel>(std::move(m));
    c.H = H;
    c.U = U;
    for (auto& [v, e] : store) c.store.set(v, Value::loc(e));
    c.store.set("n", Value::integer(0));
    return c;
}

}  // namespace

TEST_CASE("valid configurations") {
    auto m = blank(3);
    CHECK(valid_config(config(m, 0, 0, {{"x", 0}, {"y", 0}})));
    CHECK_FALSE(valid_config(config(m, 0, bit(0), {{"x", 0}})));
    auto into = m;
    into.set("next", {Value::loc(1)}, Value::loc(2));
    CHECK_FALSE(valid_config(config(into, bit(1), bit(2), {{"x", 0}})));
    CHECK_FALSE(valid_config(config(m, 0, bit(1), {{"x", 1}})));
    CHECK_FALSE(valid_config(config(m, bit(1), bit(1), {{"x", 0}})));
}

TEST_CASE("single steps") {
    auto c = config(blank(3), bit(1), bit(2), {{"x", 0}, {"y", 1}});
    auto o = step(c, *P("x := y"));
    REQUIRE(o.size() == 1);
    CHECK(o[0].kind == OutcomeKind::Final);
    CHECK(o[0].config.store.get("x") == Value::loc(1));
    CHECK(o[0].config.H == c.H);
    CHECK(o[0].config.U == c.U);

    auto bad = step(config(blank(3), 0, 0, {{"x", 0}, {"y", 1}}), *P("x := y.next"));
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].kind == OutcomeKind::Abort);

    auto stuck = step(config(blank(3), 0, 0, {{"x", 0}}), *P("alloc(x)"));
    REQUIRE(stuck.size() == 1);
    CHECK(stuck[0].kind == OutcomeKind::Stuck);

    auto al = step(config(blank(4), 0, bit(1) | bit(2) | bit(3), {{"x", 0}, {"y", 0}}), *P("alloc(x)"));
    CHECK(al.size() == 3);
    for (auto& out : al) {
        CHECK(out.kind == OutcomeKind::Final);
        int a = static_cast<int>(out.config.store.get("x").v);
        CHECK(has(out.config.H, a));
        CHECK_FALSE(has(out.config.U, a));
        CHECK(out.config.heap->get("next", {Value::loc(a)}) == Value::loc(0));
        CHECK(valid_config(out.config));
    }

    auto mut = step(config(blank(3), bit(1), 0, {{"x", 1}, {"y", 2}}), *P("x.next := y"));
    REQUIRE(mut.size() == 1);
    CHECK(mut[0].config.heap->get("next", {Value::loc(1)}) == Value::loc(2));
    CHECK(step(config(blank(3), 0, 0, {{"x", 1}, {"y", 2}}), *P("x.next := y"))[0].kind == OutcomeKind::Abort);

    auto fr = step(config(blank(3), bit(1), 0, {{"x", 1}}), *P("free(x)"));
    CHECK(fr[0].config.H == 0);
}

TEST_CASE("free then dereference aborts") {
    auto c = config(blank(3), bit(1), 0, {{"x", 1}, {"y", 0}});
    auto o = run(c, P("free(x); y := x.next"));
    REQUIRE(o.size() == 1);
    CHECK(o[0].kind == OutcomeKind::Abort);
    CHECK(run(c, P("free(x); x.next := y"))[0].kind == OutcomeKind::Abort);
}

TEST_CASE("list reversal on a three-cell list") {
    auto m = blank(4);
    m.set("next", {Value::loc(1)}, Value::loc(2));
    m.set("next", {Value::loc(2)}, Value::loc(3));
    auto c = config(m, bit(1) | bit(2) | bit(3), 0, {{"i", 1}, {"j", 0}, {"k", 0}});
    std::vector<std::string> trace;
    auto o = run(c, P("j := nil; while i != nil do { k := i.next; i.next := j; j := i; i := k }"), {32, &trace});
    REQUIRE(o.size() == 1);
    REQUIRE(o[0].kind == OutcomeKind::Final);
    auto& h = *o[0].config.heap;
    CHECK(o[0].config.store.get("j") == Value::loc(3));
    CHECK(h.get("next", {Value::loc(3)}) == Value::loc(2));
    CHECK(h.get("next", {Value::loc(2)}) == Value::loc(1));
    CHECK(h.get("next", {Value::loc(1)}) == Value::loc(0));
    CHECK_FALSE(trace.empty());
    CHECK(trace.front().find(" : (H=") != std::string::npos);
}

TEST_CASE("fuel") {
    auto c = config(blank(2), 0, 0, {{"x", 0}});
    CHECK_THROWS_AS(run(c, P("while x = nil do { skip }"), {5, nullptr}), Error);
    CHECK(run(c, P("while x != nil do { skip }"), {0, nullptr}).size() == 1);
}

TEST_CASE("preservation and determinism over small configurations") {
    std::vector<std::string> progs = {"x := y",      "x := nil",    "x := y.next", "x.next := y",
                                      "alloc(x)",    "free(x)",     "n := key(y) + 1",
                                      "if x = y then { x := nil } else { x.next := y }"};
    std::vector<Binder> vars = {{Symbol("x"), Sort::Foreground}, {Symbol("y"), Sort::Foreground}};
    ConfigBounds b;
    b.fg_size = 3;
    b.ints = {-1, 1};
    b.filter.functions = std::set<std::string>{"next"};
    for (auto& text : progs) {
        auto p = P(text);
        enumerate_configs(sig(), vars, b, [&](const Configuration& c0) {
            Configuration c = c0;
            c.store.set("n", Value::integer(0));
            auto outs = run(c, p);
            size_t finals = 0;
            for (auto& o : outs) {
                if (o.kind != OutcomeKind::Final) continue;
                ++finals;
                REQUIRE_MESSAGE(valid_config(o.config), text << " from " << c.str());
            }
            if (!uses_alloc(*p)) CHECK(outs.size() == 1);
            if (p->kind == StmtKind::Alloc && c.U) CHECK(finals == static_cast<size_t>(popcount(c.U)));
            return true;
        });
    }
}

TEST_CASE("program utilities") {
    auto p = P("j := nil; while i != nil do { k := i.next; i.next := j; j := i; i := k }");
    CHECK(assigned_variables(*p) == std::set<std::string>{"i", "j", "k"});
    CHECK(program_variables(*p) == std::set<std::string>{"i", "j", "k"});
    CHECK(ssa_warnings(*p).empty());
    CHECK(ssa_warnings(*P("x := nil; x := y")).size() == 1);
    CHECK(is_basic(*P("alloc(x)")));
    CHECK_FALSE(is_basic(*p));
    CHECK(uses_alloc(*P("if x = y then { alloc(x) } else { skip }")));
    CHECK(field_default(Sort::Int) == Value::integer(0));
    CHECK(field_default(Sort::Foreground) == Value::loc(0));
}
