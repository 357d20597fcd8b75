#include "doctest.h"

#include "fl/ford.hpp"
#include "fl/oracle.hpp"
#include "fl/rewrite.hpp"
#include "fl/textio.hpp"

using namespace fl;

namespace {

std::string corpus(const std::string& f) { return std::string(FL_CORPUS_DIR) + "/" + f; }

const ParsedFile& mixed() {
    static ParsedFile f = load_file(corpus("formulas.fl"));
    return f;
}

NodePtr F(const std::string& s) { return parse_formula(s, *mixed().sig, mixed().defs); }

// mutable functions the formula can read, directly or through definitions
std::set<std::string> fields_of(const NodePtr& n, const DefinitionSet& defs) {
    std::set<std::string> fs, rs, seen;
    collect_symbols(n, fs, rs);
    std::vector<std::string> todo(rs.begin(), rs.end());
    while (!todo.empty()) {
        auto r = todo.back();
        todo.pop_back();
        auto* d = defs.find(r);
        if (!d || !seen.insert(r).second) continue;
        std::set<std::string> rs2;
        collect_symbols(d->body, fs, rs2);
        todo.insert(todo.end(), rs2.begin(), rs2.end());
    }
    return fs;
}

std::vector<NodePtr> applied_defs() {
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

size_t check_agreement(const NodePtr& phi, int max_fg) {
    auto& defs = mixed().defs;
    auto prog = translate_formula(*mixed().sig, defs, phi);
    auto dptr = std::make_shared<const DefinitionSet>(defs);
    std::vector<Binder> vars;
    for (auto& [name, s] : free_variables(phi)) vars.push_back({Symbol(name), s});
    ModelFilter filter;
    filter.functions = fields_of(phi, defs);
    size_t checked = 0;
    for (int fg = 1; fg <= max_fg; ++fg) {
        PreModelEnumerator en(mixed().sig, fg, IntRange{-1, 1}, filter);
        PreModel m = en.base();
        while (en.next(m)) {
            auto pre = std::make_shared<const PreModel>(m);
            FrameModel fm(pre, dptr);
            FordModel fo(pre, prog);
            enumerate_assignments(m, vars, [&](const Assignment& a) {
                bool t = fm.eval(phi, a);
                LocSet s = fm.support(phi, a);
                if (fo.eval(a) != t || fo.support(a) != s) {
                    FAIL_CHECK(print(phi) << " disagrees on\n" << print(m) << a.str());
                    return false;
                }
                ++checked;
                return true;
            });
        }
    }
    return checked;
}

}  // namespace

TEST_CASE("support relation shapes") {
    auto& sig = *mixed().sig;
    auto p = generate_support_relations(sig, {}, F("x = nil"));
    REQUIRE(p.defs.size() == 1);
    CHECK(p.defs.all()[0].body->kind == Kind::False);

    p = generate_support_relations(sig, {}, F("next(x) = y"));
    REQUIRE(!p.root.empty());
    CHECK(print(p.defs.find(p.root)->body) == "Sp_2(x, z)");
    CHECK(print(p.defs.find("Sp_2")->body) == "z = x");

    // Sp of f(x)=y equals {x} pointwise
    auto pre = std::make_shared<const PreModel>(mixed().sig, 3, IntRange{-1, 1});
    FordModel fo(pre, p);
    for (int u = 0; u < 3; ++u) {
        Assignment a;
        a.set("x", Value::loc(u));
        a.set("y", Value::loc(0));
        CHECK(fo.support(a) == bit(u));
    }

    auto q = generate_support_relations(sig, {}, F("!(next(x) = y)"));
    auto* root = q.defs.find(q.root);
    CHECK(root->body->kind == Kind::Rel);
    CHECK(root->params.size() == 3);
}

TEST_CASE("membership in a support becomes a relation atom") {
    auto p = translate_formula(*mixed().sig, mixed().defs, F("x in Sp(next(y) = n2)"));
    CHECK(p.formula->kind == Kind::Rel);
    CHECK(p.formula->kids.size() == 3);
    CHECK(print(p.formula->kids.back()) == "x");
}

TEST_CASE("untranslatable positions are rejected") {
    auto& sig = *mixed().sig;
    Signature s = sig;
    s.add_variable("U", Sort::SetOfForeground);
    auto phi = parse_formula("Sp(list(x)) = U", s, mixed().defs);
    try {
        translate_formula(s, mixed().defs, phi);
        FAIL("expected a rejection");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UntranslatableSpPosition);
    }
}

TEST_CASE("sp-free formulas are unchanged") {
    auto phi = F("next(x) = y && (exists z : z = next(y) . z != x)");
    auto p = translate_formula(*mixed().sig, mixed().defs, phi);
    CHECK(structurally_equal(p.formula, phi));
}

TEST_CASE("printed programs parse back") {
    for (auto& g : mixed().goals) {
        auto p = translate_formula(*mixed().sig, mixed().defs, g);
        auto text = print(p, *mixed().sig);
        auto back = parse_file(text, "ford.fl");
        CHECK(print(back) == text);
        REQUIRE(back.goals.size() == 1);
        CHECK(structurally_equal(back.goals[0], p.formula));
    }
}

TEST_CASE("translated tree support is reachability") {
    auto phi = F("btree(x)");
    auto p = translate_formula(*mixed().sig, mixed().defs, phi);
    auto m = std::make_shared<PreModel>(mixed().sig, 4, IntRange{-1, 1});
    for (int c = 0; c < 4; ++c) {
        m->set("left", {Value::loc(c)}, Value::loc(0));
        m->set("right", {Value::loc(c)}, Value::loc(0));
    }
    m->set("left", {Value::loc(1)}, Value::loc(2));
    m->set("right", {Value::loc(1)}, Value::loc(3));
    FordModel fo(m, p);
    Assignment a;
    a.set("x", Value::loc(1));
    CHECK(fo.eval(a));
    CHECK(fo.support(a) == reachable(*m, 1, {"left", "right"}));
}

TEST_CASE("pointwise agreement on the corpus up to two cells") {
    size_t total = 0;
    for (auto& phi : applied_defs()) total += check_agreement(phi, 2);
    for (auto& phi : mixed().goals) total += check_agreement(phi, 2);
    MESSAGE("assignments checked: " << total);
    CHECK(total > 0);
}
