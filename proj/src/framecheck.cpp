#include "fl/framecheck.hpp"

#include <random>

#include "fl/hoare.hpp"
#include "fl/oracle.hpp"
#include "fl/rewrite.hpp"
#include "fl/semantics.hpp"
#include "fl/textio.hpp"

namespace fl {

namespace {

struct Sweep {
    std::shared_ptr<const DefinitionSet> defs;
    NodePtr n;
    std::set<std::string> used;
    std::vector<Binder> vars;
    FrameSweepResult r;

    bool same(const FrameModel& a, const FrameModel& b, const Assignment& as, std::string& why) const {
        if (n->is_term()) {
            if (a.eval_term(n, as) != b.eval_term(n, as)) why = "value changed";
        } else if (a.eval(n, as) != b.eval(n, as)) {
            why = "truth changed";
        }
        if (why.empty() && a.support(n, as) != b.support(n, as)) why = "support changed";
        return why.empty();
    }

    void violation(const PreModel& m, const Mutation& mu, const Assignment& as, const std::string& why) {
        ++r.violations;
        if (r.counterexample) return;
        auto& e = mu.entries.front();
        std::string args;
        for (auto& v : e.args) args += (args.empty() ? "" : ",") + format_value(v);
        r.counterexample = why + " under " + as.str() + " after " + e.function + "(" + args + ")=" +
                           format_value(e.value) + " on\n" + print(m);
    }

    void model(const PreModel& m) {
        ++r.models;
        auto pre = std::make_shared<const PreModel>(m);
        FrameModel fm(pre, defs);
        std::vector<Assignment> as;
        std::vector<LocSet> sp;
        enumerate_assignments(m, vars, [&](const Assignment& a) {
            as.push_back(a);
            sp.push_back(fm.support(n, a));
            return true;
        });
        for (auto& mu : single_entry_mutations(m, &used)) {
            auto post = std::make_shared<const PreModel>(apply_mutation(m, mu));
            std::optional<FrameModel> fm2;
            for (size_t i = 0; i < as.size(); ++i) {
                ++r.instances;
                if (!is_stable_on(m, *post, sp[i])) continue;
                ++r.applicable;
                if (!fm2) fm2.emplace(post, defs);
                std::string why;
                if (!same(fm, *fm2, as[i], why)) violation(m, mu, as[i], why);
            }
        }
    }

    void sample(std::shared_ptr<const Signature> sig, const FrameSweepOptions& o) {
        std::mt19937_64 rng(o.seed);
        auto pick = [&](size_t k) { return std::uniform_int_distribution<size_t>(0, k - 1)(rng); };
        std::vector<int> fns;
        for (size_t i = 0; i < sig->functions().size(); ++i)
            if (used.count(sig->functions()[i].name)) fns.push_back(static_cast<int>(i));
        PreModel base(sig, o.fg_size, o.ints);
        for (size_t s = 0; s < o.samples; ++s) {
            PreModel m = base;
            for (int f : fns) {
                auto& d = sig->functions()[f];
                for (size_t t = 0; t < m.tuple_count(d.args); ++t)
                    m.set_entry(f, t, m.value_at(d.result, pick(m.domain_size(d.result))));
            }
            Assignment a;
            for (auto& b : vars) a.set(b.var, m.value_at(b.sort, pick(m.domain_size(b.sort))));
            ++r.models;
            ++r.instances;
            if (fns.empty()) continue;
            int f = fns[pick(fns.size())];
            auto& d = sig->functions()[f];
            size_t t = pick(m.tuple_count(d.args));
            std::vector<Value> args(d.args.size());
            m.tuple_values(d.args, t, args.data());
            size_t dom = m.domain_size(d.result);
            if (dom < 2) continue;
            auto cur = m.value_index(m.entry(f, t));
            size_t k = pick(dom - 1);
            if (cur && k >= *cur) ++k;
            Mutation mu;
            mu.override_entry(d.name, args, m.value_at(d.result, k));
            auto pre = std::make_shared<const PreModel>(m);
            FrameModel fm(pre, defs);
            auto post = std::make_shared<const PreModel>(apply_mutation(m, mu));
            if (!is_stable_on(m, *post, fm.support(n, a))) continue;
            ++r.applicable;
            FrameModel fm2(post, defs);
            std::string why;
            if (!same(fm, fm2, a, why)) violation(m, mu, a, why);
        }
    }
};

}  // namespace

FrameSweepResult frame_sweep(std::shared_ptr<const Signature> sig, std::shared_ptr<const DefinitionSet> defs,
                             const NodePtr& n, const FrameSweepOptions& o) {
    Sweep s{defs, n, functions_used(n, *defs), {}, {}};
    for (auto& [name, sort] : free_variables(n)) s.vars.push_back({Symbol(name), sort});
    if (o.fg_size > o.exhaustive_limit) {
        s.r.exhaustive = false;
        s.sample(sig, o);
        return s.r;
    }
    ModelFilter filter;
    filter.functions = s.used;
    for (int fg = 1; fg <= o.fg_size; ++fg) {
        PreModelEnumerator en(sig, fg, o.ints, filter);
        PreModel m = en.base();
        while (en.next(m)) s.model(m);
    }
    return s.r;
}

}  // namespace fl
