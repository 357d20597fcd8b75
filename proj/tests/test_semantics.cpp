#include "doctest.h"

#include "fl/oracle.hpp"
#include "fl/semantics.hpp"
#include "fl/textio.hpp"

using namespace fl;

namespace {

std::string corpus(const std::string& f) { return std::string(FL_CORPUS_DIR) + "/" + f; }

struct Lib {
    std::shared_ptr<const Signature> sig;
    std::shared_ptr<const DefinitionSet> defs;
};

const Lib& lib() {
    static Lib l = [] {
        auto f = load_file(corpus("library.fl"));
        f.sig->add_variable("x", Sort::Foreground);
        f.sig->add_variable("y", Sort::Foreground);
        return Lib{f.sig, std::make_shared<const DefinitionSet>(f.defs)};
    }();
    return l;
}

DefinitionSet only(const std::vector<std::string>& names) {
    DefinitionSet d;
    for (auto& n : names) d.add(*lib().defs->find(n));
    return d;
}

std::shared_ptr<PreModel> chain3() {
    // u1 -> u2 -> nil
    auto m = std::make_shared<PreModel>(lib().sig, 3, IntRange{-2, 2});
    for (int c = 0; c < 3; ++c) m->set("next", {Value::loc(c)}, Value::loc(0));
    m->set("next", {Value::loc(1)}, Value::loc(2));
    return m;
}

std::shared_ptr<PreModel> tree4() {
    // u1 has children u2 (left) and u3 (right)
    auto m = std::make_shared<PreModel>(lib().sig, 4, IntRange{-2, 2});
    for (int c = 0; c < 4; ++c) {
        m->set("left", {Value::loc(c)}, Value::loc(0));
        m->set("right", {Value::loc(c)}, Value::loc(0));
    }
    m->set("left", {Value::loc(1)}, Value::loc(2));
    m->set("right", {Value::loc(1)}, Value::loc(3));
    return m;
}

Assignment nu(int x, int y = 0) {
    Assignment a;
    a.set("x", Value::loc(x));
    a.set("y", Value::loc(y));
    return a;
}

NodePtr F(const std::string& s) { return parse_formula(s, *lib().sig, *lib().defs); }
NodePtr T(const std::string& s) { return parse_term(s, *lib().sig, *lib().defs); }

void check_against_oracle(const PreModel& m, const DefinitionSet& defs) {
    auto fm = frame_model(std::make_shared<const PreModel>(m), std::make_shared<const DefinitionSet>(defs));
    auto rev = frame_model(std::make_shared<const PreModel>(m), std::make_shared<const DefinitionSet>(defs),
                           {WorklistOrder::Reverse});
    auto fp = naive_fixpoint(m, defs);
    for (size_t d = 0; d < defs.size(); ++d) {
        auto& name = defs.all()[d].name;
        REQUIRE(fm.truth_table(name) == fp.truth[d]);
        REQUIRE(fm.support_table(name) == fp.support[d]);
        REQUIRE(rev.truth_table(name) == fp.truth[d]);
        REQUIRE(rev.support_table(name) == fp.support[d]);
    }
    CHECK(fm.is_fixpoint());
}

}  // namespace

TEST_CASE("list on a chain and on a cycle") {
    auto m = chain3();
    auto fm = frame_model(m, lib().defs);
    auto tt = fm.truth_table("list");
    CHECK(std::vector<int>(tt.begin(), tt.end()) == std::vector<int>{1, 1, 1});
    CHECK(fm.inductive_support("list", {Value::loc(1)}) == (bit(1) | bit(2)));
    CHECK(fm.inductive_support("list", {Value::loc(0)}) == 0);

    auto cyc = std::make_shared<PreModel>(*m);
    cyc->set("next", {Value::loc(2)}, Value::loc(1));
    auto fc = frame_model(cyc, lib().defs);
    auto ct = fc.truth_table("list");
    CHECK(std::vector<int>(ct.begin(), ct.end()) == std::vector<int>{1, 0, 0});
    CHECK(fc.inductive_support("list", {Value::loc(1)}) == (bit(1) | bit(2)));
}

TEST_CASE("tree examples") {
    auto m = tree4();
    auto fm = frame_model(m, lib().defs);
    CHECK(fm.eval(F("btree(x)"), nu(1)));
    CHECK(fm.support(F("btree(x)"), nu(1)) == (bit(1) | bit(2) | bit(3)));
    CHECK(fm.support(F("btree(x)"), nu(0)) == 0);
    CHECK(fm.eval(F("ttree(x)"), nu(1)) == false);
    auto shared = std::make_shared<PreModel>(*m);
    shared->set("right", {Value::loc(1)}, Value::loc(2));
    auto fs = frame_model(shared, lib().defs);
    CHECK_FALSE(fs.eval(F("btree(x)"), nu(1)));
    CHECK(fs.support(F("btree(x)"), nu(1)) == (bit(1) | bit(2)));
}

TEST_CASE("support equations on small cases") {
    auto fm = frame_model(chain3(), lib().defs);
    CHECK(fm.support(F("x = y"), nu(1, 2)) == 0);
    CHECK(fm.support(T("next(x)"), nu(1)) == bit(1));
    CHECK(fm.support(T("next(next(x))"), nu(1)) == (bit(1) | bit(2)));
    CHECK(fm.support(F("next(x) = y"), nu(2)) == bit(2));
    CHECK(fm.eval_term(T("Sp(nil)"), nu(1)) == Value::set(0));
    CHECK(fm.eval_term(T("Sp(Sp(next(x) = y))"), nu(1)) == Value::set(bit(1)));
    CHECK(fm.support(F("!(next(x) = y)"), nu(1)) == fm.support(F("next(x) = y"), nu(1)));
    CHECK(fm.eval(F("ite(x = nil : true, false)"), nu(0)));
    CHECK(fm.support(F("ite(x = nil : next(y) = nil, next(x) = nil)"), nu(0, 2)) == bit(2));
    CHECK(fm.support(F("ite(x = nil : next(y) = nil, next(x) = nil)"), nu(1, 2)) == bit(1));
    CHECK(fm.eval_term(T("ite(x = x : x, y)"), nu(1, 2)) == Value::loc(1));
    CHECK(fm.support(F("exists z : z = next(x) . next(z) = nil"), nu(1)) == (bit(1) | bit(2)));
}

TEST_CASE("defs = empty gives syntactic supports only") {
    auto m = chain3();
    auto fm = frame_model(m, std::make_shared<const DefinitionSet>());
    CHECK(fm.support(F("next(x) = next(y)"), nu(1, 2)) == (bit(1) | bit(2)));
    auto fp = naive_fixpoint(*m, DefinitionSet{});
    CHECK(fp.truth.empty());
}

TEST_CASE("frame model agrees with the naive oracle on every small model") {
    struct Case {
        std::vector<std::string> defs;
        std::set<std::string> fields;
        int fg;
    };
    std::vector<Case> cases = {
        {{"list"}, {"next"}, 3},          {{"list", "lseg", "length"}, {"next"}, 4},
        {{"dll"}, {"next", "prev"}, 3},   {{"btree"}, {"left", "right"}, 3},
        {{"height", "bfac", "avl"}, {"left", "right"}, 3},
        {{"ttree", "pttree"}, {"left", "right", "tnext"}, 3},
        {{"slist"}, {"next", "key"}, 3},  {{"bst"}, {"left", "right", "key"}, 3},
    };
    for (auto& c : cases) {
        auto defs = only(c.defs);
        ModelFilter filter;
        filter.functions = c.fields;
        PreModelEnumerator en(lib().sig, c.fg, IntRange{-1, 1}, filter);
        PreModel m = en.base();
        size_t n = 0;
        while (en.next(m)) {
            check_against_oracle(m, defs);
            ++n;
        }
        CHECK(n == en.count());
    }
}

TEST_CASE("reachable") {
    auto m = chain3();
    CHECK(reachable(*m, 0, {"next"}) == 0);
    CHECK(reachable(*m, 1, {"next"}) == (bit(1) | bit(2)));
    m->set("next", {Value::loc(2)}, Value::loc(1));
    CHECK(reachable(*m, 1, {"next"}) == (bit(1) | bit(2)));
    auto t = tree4();
    CHECK(reachable(*t, 1, {"left", "right"}) == (bit(1) | bit(2) | bit(3)));
}

TEST_CASE("frame instances") {
    auto m = chain3();
    auto fm = frame_model(m, lib().defs);
    auto phi = F("list(x)");
    Mutation none;
    CHECK(check_frame_instance(fm, none, nu(1), phi).kind == FrameVerdictKind::Pass);
    Mutation inside;
    inside.override_entry("next", {Value::loc(2)}, Value::loc(1));
    CHECK(check_frame_instance(fm, inside, nu(1), phi).kind == FrameVerdictKind::NotApplicable);
    Mutation outside;
    outside.override_entry("next", {Value::loc(0)}, Value::loc(1));
    auto v = check_frame_instance(fm, outside, nu(1), phi);
    CHECK(v.kind == FrameVerdictKind::Pass);
    CHECK(v.before);
    CHECK(v.after);
}
