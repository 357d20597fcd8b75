#include "fl/psl.hpp"

#include <functional>
#include <map>
#include <set>

#include "fl/semantics.hpp"
#include "fl/textio.hpp"

namespace fl {

namespace sl {

namespace {
std::shared_ptr<SLNode> make(SLKind k) {
    auto n = std::make_shared<SLNode>();
    n->kind = k;
    return n;
}
}  // namespace

SLPtr stack(NodePtr sf) {
    auto n = make(SLKind::Stack);
    n->sf = std::move(sf);
    return n;
}

SLPtr emp() { return make(SLKind::Emp); }

SLPtr points_to(NodePtr x, const std::string& f, NodePtr y) {
    auto n = make(SLKind::PointsTo);
    n->x = std::move(x);
    n->field = f;
    n->y = std::move(y);
    return n;
}

SLPtr ite(NodePtr sf, SLPtr a, SLPtr b) {
    auto n = make(SLKind::Ite);
    n->sf = std::move(sf);
    n->kids = {std::move(a), std::move(b)};
    return n;
}

SLPtr and_(SLPtr a, SLPtr b) {
    auto n = make(SLKind::And);
    n->kids = {std::move(a), std::move(b)};
    return n;
}

SLPtr star(SLPtr a, SLPtr b) {
    auto n = make(SLKind::Star);
    n->kids = {std::move(a), std::move(b)};
    return n;
}

SLPtr pred(const std::string& name, NodePtr arg) {
    auto n = make(SLKind::Pred);
    n->name = name;
    n->x = std::move(arg);
    return n;
}

SLPtr exists_points_to(const std::string& y, NodePtr x, const std::string& f, SLPtr body) {
    auto n = make(SLKind::ExistsPointsTo);
    n->name = y;
    n->x = std::move(x);
    n->field = f;
    n->y = mk::var(y);
    n->kids = {std::move(body)};
    return n;
}

SLPtr not_(SLPtr a) {
    auto n = make(SLKind::Not);
    n->kids = {std::move(a)};
    return n;
}

SLPtr or_(SLPtr a, SLPtr b) {
    auto n = make(SLKind::Or);
    n->kids = {std::move(a), std::move(b)};
    return n;
}

}  // namespace sl

bool structurally_equal(const SLPtr& a, const SLPtr& b) {
    if (a->kind != b->kind || a->field != b->field || a->name != b->name) return false;
    auto eqn = [](const NodePtr& p, const NodePtr& q) { return !p ? !q : (q && structurally_equal(p, q)); };
    if (!eqn(a->sf, b->sf) || !eqn(a->x, b->x) || !eqn(a->y, b->y)) return false;
    if (a->kids.size() != b->kids.size()) return false;
    for (size_t i = 0; i < a->kids.size(); ++i)
        if (!structurally_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

void SLDefinitionSet::add(SLDefinition d) {
    if (find(d.name)) throw Error(ErrorCode::DuplicateDefinition, "predicate " + d.name + " defined twice");
    defs_.push_back(std::move(d));
}

const SLDefinition* SLDefinitionSet::find(std::string_view name) const {
    for (auto& d : defs_)
        if (d.name == name) return &d;
    return nullptr;
}

// ---------------- heaplets ----------------

namespace {

bool heap_field(const FunctionDecl& f) {
    return f.is_mutable && f.args.size() == 1 && f.args[0] == Sort::Foreground;
}

Value outside_value(const PreModel& m, Sort s) {
    switch (s) {
        case Sort::Int: return Value::integer(std::clamp<int64_t>(0, m.ints().lo, m.ints().hi));
        case Sort::Bool: return Value::boolean(false);
        case Sort::SetOfForeground: return Value::set(0);
        default: return Value::loc(0);
    }
}

}  // namespace

bool heaplet_included(const Heaplet& a, const Heaplet& b) {
    if (a.dom & ~b.dom) return false;
    auto& sig = a.model->signature();
    for (size_t fi = 0; fi < sig.functions().size(); ++fi) {
        if (!heap_field(sig.functions()[fi])) continue;
        for (int c = 0; c < a.model->fg_size(); ++c)
            if (has(a.dom, c) && a.model->entry(static_cast<int>(fi), c) != b.model->entry(static_cast<int>(fi), c))
                return false;
    }
    return true;
}

bool heaplet_equal(const Heaplet& a, const Heaplet& b) { return a.dom == b.dom && heaplet_included(a, b); }

std::string format_heaplet(const Heaplet& h) {
    std::string out = "{";
    bool first = true;
    auto& sig = h.model->signature();
    for (int c = 0; c < h.model->fg_size(); ++c) {
        if (!has(h.dom, c)) continue;
        for (size_t fi = 0; fi < sig.functions().size(); ++fi) {
            if (!heap_field(sig.functions()[fi])) continue;
            out += (first ? "" : ", ") + element_name(c) + "." + sig.functions()[fi].name + "=" +
                   format_value(h.model->entry(static_cast<int>(fi), c));
            first = false;
        }
        if (first) {
            out += element_name(c);
            first = false;
        }
    }
    return out + "}";
}

PreModel complete_heaplet(const Heaplet& h, Completion mode) {
    PreModel m = *h.model;
    auto& sig = m.signature();
    for (size_t fi = 0; fi < sig.functions().size(); ++fi) {
        auto& f = sig.functions()[fi];
        if (!heap_field(f)) continue;
        for (int c = 0; c < m.fg_size(); ++c) {
            if (has(h.dom, c)) continue;
            Value v = outside_value(m, f.result);
            if (mode == Completion::Self && f.result == Sort::Foreground) v = Value::loc(c);
            m.set_entry(static_cast<int>(fi), c, v);
        }
    }
    return m;
}

// ---------------- validation ----------------

namespace {

void check_stack(const Signature& sig, const NodePtr& n, const std::string& path, ValidationReport& r) {
    switch (n->kind) {
        case Kind::SpFormula:
        case Kind::SpTerm:
            r.violations.push_back({"StackFormulaUsesSupport", path, "support expressions are not stack formulas"});
            return;
        case Kind::App:
            if (auto* f = sig.function(n->name()); f && f->is_mutable)
                r.violations.push_back(
                    {"StackFormulaDereferences", path, "stack formula dereferences mutable " + n->name()});
            break;
        case Kind::Rel:
            if (!is_builtin_relation(n->name()) && !sig.relation(n->name()))
                r.violations.push_back({"StackFormulaUsesInductive", path, n->name() + " is not a stack relation"});
            break;
        default:
            break;
    }
    for (size_t i = 0; i < n->kids.size(); ++i) check_stack(sig, n->kids[i], path + "/" + std::to_string(i), r);
}

void check_operand(const NodePtr& t, const std::string& path, ValidationReport& r) {
    if (t->sort != Sort::Foreground || (t->kind != Kind::Var && t->kind != Kind::Const))
        r.violations.push_back({"PointsToOperand", path, "points-to operands are location variables or constants"});
}

void check_field(const Signature& sig, const std::string& f, const std::string& path, ValidationReport& r) {
    auto* d = sig.function(f);
    if (!d || !heap_field(*d))
        r.violations.push_back({"FieldNotMutable", path, f + " is not a unary mutable field"});
}

void validate_sl(const Signature& sig, const SLDefinitionSet& defs, const SLPtr& n, const std::string& path,
                 ValidationReport& r) {
    auto kid = [&](size_t i) { return path + "/" + std::to_string(i); };
    switch (n->kind) {
        case SLKind::Stack:
            check_stack(sig, n->sf, path, r);
            return;
        case SLKind::Emp:
            return;
        case SLKind::PointsTo:
            check_operand(n->x, path, r);
            check_operand(n->y, path, r);
            check_field(sig, n->field, path, r);
            return;
        case SLKind::Ite:
            check_stack(sig, n->sf, path, r);
            break;
        case SLKind::And:
        case SLKind::Star:
            break;
        case SLKind::Pred:
            if (!defs.find(n->name))
                r.violations.push_back({"UnknownPredicate", path, "no predicate named " + n->name});
            check_operand(n->x, path, r);
            return;
        case SLKind::ExistsPointsTo:
            check_operand(n->x, path, r);
            check_field(sig, n->field, path, r);
            break;
        case SLKind::Not:
            r.violations.push_back({"NotInFragment", path, "negation is outside the fragment"});
            break;
        case SLKind::Or:
            r.violations.push_back({"NotInFragment", path, "disjunction is outside the fragment"});
            break;
    }
    for (size_t i = 0; i < n->kids.size(); ++i) validate_sl(sig, defs, n->kids[i], kid(i), r);
}

}  // namespace

ValidationReport validate_psl(const Signature& sig, const SLDefinitionSet& defs, const SLPtr& phi) {
    ValidationReport r;
    validate_sl(sig, defs, phi, "root", r);
    return r;
}

ValidationReport validate_psl_defs(const Signature& sig, const SLDefinitionSet& defs) {
    ValidationReport r;
    for (auto& d : defs.all()) validate_sl(sig, defs, d.body, d.name, r);
    return r;
}

// ---------------- evaluation ----------------

struct SLEvaluator::Impl {
    std::shared_ptr<const PreModel> model;
    SLDefinitionSet defs;
    FrameModel fm;
    int fg;
    size_t ndom;
    std::vector<std::vector<uint8_t>> tables;  // per predicate, [arg * ndom + (dom >> 1)]

    Impl(std::shared_ptr<const PreModel> m, const SLDefinitionSet& d)
        : model(m), defs(d), fm(m, std::make_shared<const DefinitionSet>()), fg(m->fg_size()),
          ndom(size_t(1) << (fg - 1)) {
        tables.assign(defs.all().size(), std::vector<uint8_t>(static_cast<size_t>(fg) * ndom, 0));
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t p = 0; p < defs.all().size(); ++p) {
                auto& def = defs.all()[p];
                for (int a = 0; a < fg; ++a) {
                    Assignment s;
                    s.set(def.param, Value::loc(a));
                    for (size_t di = 0; di < ndom; ++di) {
                        auto& cell = tables[p][static_cast<size_t>(a) * ndom + di];
                        if (cell) continue;
                        if (eval(def.body, s, static_cast<LocSet>(di) << 1)) {
                            cell = 1;
                            changed = true;
                        }
                    }
                }
            }
        }
    }

    int loc_of(const NodePtr& t, const Assignment& s) const { return static_cast<int>(fm.eval_term(t, s).v); }

    bool pred(const std::string& name, int a, LocSet dom) const {
        for (size_t p = 0; p < defs.all().size(); ++p)
            if (defs.all()[p].name == name) return tables[p][static_cast<size_t>(a) * ndom + (dom >> 1)] != 0;
        throw Error(ErrorCode::UnknownSymbol, "unknown predicate " + name);
    }

    bool eval(const SLPtr& n, const Assignment& s, LocSet dom) const {
        switch (n->kind) {
            case SLKind::Stack:
                return fm.eval(n->sf, s);
            case SLKind::Emp:
                return dom == 0;
            case SLKind::PointsTo: {
                int x = loc_of(n->x, s);
                if (x == 0 || dom != bit(x)) return false;
                int fi = model->signature().function_index(n->field);
                return model->entry(fi, static_cast<size_t>(x)) == fm.eval_term(n->y, s);
            }
            case SLKind::Ite:
                return fm.eval(n->sf, s) ? eval(n->kids[0], s, dom) : eval(n->kids[1], s, dom);
            case SLKind::And:
                return eval(n->kids[0], s, dom) && eval(n->kids[1], s, dom);
            case SLKind::Star:
                for (LocSet sub = dom;; sub = (sub - 1) & dom) {
                    if (eval(n->kids[0], s, sub) && eval(n->kids[1], s, dom & ~sub)) return true;
                    if (sub == 0) return false;
                }
            case SLKind::Pred:
                return pred(n->name, loc_of(n->x, s), dom);
            case SLKind::ExistsPointsTo: {
                int x = loc_of(n->x, s);
                if (x == 0 || !has(dom, x)) return false;
                int fi = model->signature().function_index(n->field);
                Assignment s2 = s;
                s2.set(n->name, model->entry(fi, static_cast<size_t>(x)));
                return eval(n->kids[0], s2, dom & ~bit(x));
            }
            case SLKind::Not:
                return !eval(n->kids[0], s, dom);
            case SLKind::Or:
                return eval(n->kids[0], s, dom) || eval(n->kids[1], s, dom);
        }
        return false;
    }
};

SLEvaluator::SLEvaluator(std::shared_ptr<const PreModel> model, const SLDefinitionSet& defs)
    : impl_(std::make_shared<Impl>(std::move(model), defs)) {}

bool SLEvaluator::eval(const SLPtr& phi, const Assignment& store, LocSet dom) const {
    return impl_->eval(phi, store, dom & ~LocSet(1));
}

bool SLEvaluator::pred(const std::string& name, int arg, LocSet dom) const { return impl_->pred(name, arg, dom); }

bool eval_sl(const Assignment& store, const Heaplet& h, const SLPtr& phi, const SLDefinitionSet& defs) {
    if (has(h.dom, 0)) return false;
    SLEvaluator ev(h.model, defs);
    return ev.eval(phi, store, h.dom);
}

// ---------------- precision and translation ----------------

namespace {

NodePtr s_and(NodePtr a, NodePtr b, bool simplify) {
    if (simplify) {
        if (a->kind == Kind::False || b->kind == Kind::False) return mk::fls();
        if (a->kind == Kind::True) return b;
        if (b->kind == Kind::True) return a;
    }
    return mk::and_(a, b);
}

NodePtr s_or(NodePtr a, NodePtr b, bool simplify) {
    if (simplify) {
        if (a->kind == Kind::True || b->kind == Kind::True) return mk::tru();
        if (a->kind == Kind::False) return b;
        if (b->kind == Kind::False) return a;
    }
    return mk::or_(a, b);
}

}  // namespace

NodePtr precision(const SLPtr& n, bool simplify) {
    switch (n->kind) {
        case SLKind::Stack: return mk::fls();
        case SLKind::Emp:
        case SLKind::PointsTo:
        case SLKind::Pred: return mk::tru();
        case SLKind::Ite:
            return s_or(s_and(n->sf, precision(n->kids[0], simplify), simplify),
                        s_and(mk::not_(n->sf), precision(n->kids[1], simplify), simplify), simplify);
        case SLKind::And: return s_or(precision(n->kids[0], simplify), precision(n->kids[1], simplify), simplify);
        case SLKind::Star: return s_and(precision(n->kids[0], simplify), precision(n->kids[1], simplify), simplify);
        case SLKind::ExistsPointsTo: return precision(n->kids[0], simplify);
        default: break;
    }
    throw Error(ErrorCode::InvalidInput, "precision is defined on the fragment only");
}

namespace {

NodePtr field_app(const std::string& f, NodePtr x) { return mk::app(f, {std::move(x)}, Sort::Foreground); }

NodePtr translate(const SLPtr& n) {
    switch (n->kind) {
        case SLKind::Stack: return n->sf;
        case SLKind::Emp: return mk::tru();
        case SLKind::PointsTo: return mk::eq(field_app(n->field, n->x), n->y);
        case SLKind::Ite: return mk::ite(n->sf, translate(n->kids[0]), translate(n->kids[1]));
        case SLKind::And: {
            auto a = translate(n->kids[0]), b = translate(n->kids[1]);
            return mk::and_({a, b, mk::implies(precision(n->kids[0]), mk::subseteq(mk::sp(b), mk::sp(a))),
                             mk::implies(precision(n->kids[1]), mk::subseteq(mk::sp(a), mk::sp(b)))});
        }
        case SLKind::Star: {
            auto a = translate(n->kids[0]), b = translate(n->kids[1]);
            return mk::and_({a, b, mk::eq(mk::cap(mk::sp(a), mk::sp(b)), mk::empty())});
        }
        case SLKind::Pred: return mk::rel(n->name, {n->x});
        case SLKind::ExistsPointsTo: {
            auto body = translate(n->kids[0]);
            return mk::exists({{Symbol(n->name), Sort::Foreground}}, mk::eq(field_app(n->field, n->x), n->y),
                              mk::and_(body, mk::notin(n->x, mk::sp(body))));
        }
        default: break;
    }
    throw Error(ErrorCode::InvalidInput, "translation is defined on the fragment only");
}

}  // namespace

DefinitionSet translate_psl_defs(const SLDefinitionSet& defs) {
    DefinitionSet out;
    for (auto& d : defs.all())
        out.add({d.name, {{Symbol(d.param), Sort::Foreground}}, translate(d.body), 0, d.span});
    stratify(out);
    return out;
}

PslTranslation translate_psl(const SLPtr& phi, const SLDefinitionSet& defs) {
    return {translate(phi), translate_psl_defs(defs)};
}

// ---------------- heaplet enumeration and minimum heaps ----------------

std::vector<Heaplet> enumerate_heaplets(std::shared_ptr<const Signature> sig, int fg_size, IntRange ints,
                                        const PreModel* store_model) {
    PreModel base = store_model ? *store_model : PreModel(sig, fg_size, ints);
    std::vector<int> fields;
    for (size_t fi = 0; fi < sig->functions().size(); ++fi)
        if (heap_field(sig->functions()[fi])) fields.push_back(static_cast<int>(fi));
    for (int fi : fields)
        for (int c = 0; c < fg_size; ++c) base.set_entry(fi, c, outside_value(base, sig->functions()[fi].result));
    std::vector<Heaplet> out;
    for (LocSet dom = 0; dom < bit(fg_size); dom += 2) {
        struct Slot {
            int f, cell;
            size_t radix;
        };
        std::vector<Slot> slots;
        for (int c = 1; c < fg_size; ++c)
            if (has(dom, c))
                for (int fi : fields) slots.push_back({fi, c, base.domain_size(sig->functions()[fi].result)});
        std::vector<size_t> digits(slots.size(), 0);
        while (true) {
            auto m = std::make_shared<PreModel>(base);
            for (size_t i = 0; i < slots.size(); ++i)
                m->set_entry(slots[i].f, slots[i].cell,
                             m->value_at(sig->functions()[slots[i].f].result, digits[i]));
            out.push_back({dom, std::move(m)});
            size_t i = 0;
            while (i < slots.size() && ++digits[i] == slots[i].radix) digits[i++] = 0;
            if (i == slots.size()) break;
        }
    }
    return out;
}

namespace {

std::optional<Heaplet> least_of(const std::vector<Heaplet>& sat) {
    if (sat.empty()) return std::nullopt;
    for (auto& h : sat) {
        bool least = true;
        for (auto& g : sat)
            if (!heaplet_included(h, g)) {
                least = false;
                break;
            }
        if (least) return h;
    }
    throw Error(ErrorCode::NoMinimum, "satisfying heaplets have no least element");
}

}  // namespace

std::optional<Heaplet> minimum_heap(const Assignment& store, const SLPtr& phi, const SLDefinitionSet& defs,
                                    const std::vector<Heaplet>& all_heaplets) {
    std::vector<Heaplet> sat;
    for (auto& h : all_heaplets) {
        SLEvaluator ev(h.model, defs);
        if (ev.eval(phi, store, h.dom)) sat.push_back(h);
    }
    return least_of(sat);
}

std::optional<Heaplet> minimum_subheap(const Assignment& store, const Heaplet& h, const SLPtr& phi,
                                       const SLDefinitionSet& defs) {
    SLEvaluator ev(h.model, defs);
    std::vector<Heaplet> sat;
    for (LocSet sub = h.dom;; sub = (sub - 1) & h.dom) {
        if (ev.eval(phi, store, sub)) sat.push_back({sub, h.model});
        if (sub == 0) break;
    }
    return least_of(sat);
}

ValidationReport check_unique_heaplets(std::shared_ptr<const Signature> sig, const SLDefinitionSet& defs,
                                       int fg_size, IntRange ints, bool literal) {
    ValidationReport r;
    std::set<std::string> failed;
    if (literal) {
        auto all = enumerate_heaplets(sig, fg_size, ints);
        for (auto& d : defs.all()) {
            for (int a = 0; a < fg_size && !failed.count(d.name); ++a) {
                std::vector<Heaplet> sat;
                for (auto& h : all) {
                    SLEvaluator ev(h.model, defs);
                    if (ev.pred(d.name, a, h.dom)) sat.push_back(h);
                }
                if (sat.size() > 1) {
                    failed.insert(d.name);
                    r.violations.push_back({"NonUniqueHeaplet", d.name,
                                            d.name + "(" + element_name(a) + ") holds on " + format_heaplet(sat[0]) +
                                                " and on " + format_heaplet(sat[1])});
                }
            }
        }
        return r;
    }
    ModelFilter filter;
    filter.functions = std::set<std::string>{};
    for (auto& f : sig->functions())
        if (heap_field(f)) filter.functions->insert(f.name);
    PreModelEnumerator en(sig, fg_size, ints, filter);
    PreModel m = en.base();
    while (en.next(m) && failed.size() < defs.all().size()) {
        auto mp = std::make_shared<const PreModel>(m);
        SLEvaluator ev(mp, defs);
        for (auto& d : defs.all()) {
            if (failed.count(d.name)) continue;
            for (int a = 0; a < fg_size; ++a) {
                std::vector<LocSet> doms;
                for (LocSet dom = 0; dom < bit(fg_size); dom += 2)
                    if (ev.pred(d.name, a, dom)) doms.push_back(dom);
                if (doms.size() > 1) {
                    failed.insert(d.name);
                    r.violations.push_back({"NonUniqueHeaplet", d.name,
                                            d.name + "(" + element_name(a) + ") holds on " +
                                                format_heaplet({doms[0], mp}) + " and on " +
                                                format_heaplet({doms[1], mp})});
                    break;
                }
            }
        }
    }
    return r;
}

}  // namespace fl
