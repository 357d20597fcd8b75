#include "doctest.h"

#include <set>

#include "fl/oracle.hpp"
#include "fl/semantics.hpp"
#include "fl/textio.hpp"

using namespace fl;

namespace {

std::shared_ptr<Signature> next_sig() {
    auto f = parse_file("field next : loc -> loc;\nvar x : loc;\n");
    return f.sig;
}

uint64_t ipow(uint64_t b, int e) {
    uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

TEST_CASE("configuration counts") {
    auto sig = next_sig();
    ConfigBounds b;
    b.ints = {0, 0};
    size_t n = 0;
    b.fg_size = 1;
    enumerate_configs(sig, {}, b, [&](const Configuration& c) {
        CHECK(c.H == 0);
        CHECK(c.U == 0);
        ++n;
        return true;
    });
    CHECK(n == 1);

    n = 0;
    b.fg_size = 2;
    enumerate_configs(sig, {}, b, [&](const Configuration&) { return ++n, true; });
    // 4 models times (H, U) in {(0,0), (u1,0), (0,u1)}
    CHECK(n == 12);

    n = 0;
    b.vary_unallocated = false;
    enumerate_configs(sig, {}, b, [&](const Configuration& c) {
        CHECK(c.U == 0);
        return ++n, true;
    });
    CHECK(n == 8);
}

TEST_CASE("every enumerated configuration is valid and distinct") {
    auto sig = next_sig();
    ConfigBounds b;
    b.fg_size = 3;
    b.ints = {0, 0};
    std::vector<Binder> vars = {{Symbol("x"), Sort::Foreground}};
    std::set<std::string> seen;
    size_t stopped = 0;
    enumerate_configs(sig, vars, b, [&](const Configuration& c) {
        CHECK(valid_config(c));
        CHECK_FALSE(has(c.H, 0));
        CHECK(seen.insert(print(*c.heap) + c.str()).second);
        return true;
    });
    enumerate_configs(sig, vars, b, [&](const Configuration&) { return ++stopped, false; });
    CHECK(stopped == 1);
    CHECK(seen.size() > 0);
}

TEST_CASE("reachability") {
    auto sig = next_sig();
    PreModel m(sig, 3, {0, 0});
    m.set("next", {Value::loc(0)}, Value::loc(0));
    m.set("next", {Value::loc(1)}, Value::loc(2));
    m.set("next", {Value::loc(2)}, Value::loc(1));
    CHECK(reachable(m, 0, {"next"}) == 0);
    CHECK(reachable(m, 1, {"next"}) == (bit(1) | bit(2)));
    m.set("next", {Value::loc(2)}, Value::loc(0));
    CHECK(reachable(m, 2, {"next"}) == bit(2));
}

TEST_CASE("heaplet counts follow (1 + v^f)^n") {
    auto one = next_sig();
    CHECK(enumerate_heaplets(one, 1, {0, 0}).size() == 1);
    CHECK(enumerate_heaplets(one, 2, {0, 0}).size() == 3);
    CHECK(enumerate_heaplets(one, 3, {0, 0}).size() == ipow(1 + 3, 2));
    CHECK(enumerate_heaplets(one, 4, {0, 0}).size() == ipow(1 + 4, 3));
    auto two = parse_file("field next : loc -> loc;\nfield prev : loc -> loc;\n").sig;
    CHECK(enumerate_heaplets(two, 3, {0, 0}).size() == ipow(1 + 9, 2));
    auto hs = enumerate_heaplets(one, 3, {0, 0});
    std::set<std::string> seen;
    for (auto& h : hs) {
        CHECK_FALSE(has(h.dom, 0));
        CHECK(seen.insert(format_heaplet(h)).second);
    }
}

TEST_CASE("naive fixpoint with no definitions") {
    auto sig = next_sig();
    PreModel m(sig, 2, {0, 0});
    auto fp = naive_fixpoint(m, DefinitionSet{});
    CHECK(fp.truth.empty());
    CHECK(fp.support.empty());
    auto f = parse_formula("next(x) = x", *sig);
    Assignment a;
    a.set("x", Value::loc(1));
    auto fm = frame_model(m, DefinitionSet{});
    CHECK(naive_eval(m, DefinitionSet{}, fp, f, a) == fm.eval(f, a));
    CHECK(naive_support(m, DefinitionSet{}, fp, f, a) == bit(1));
}
