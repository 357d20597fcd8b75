#include "fl/semantics.hpp"

#include <array>
#include <deque>
#include <unordered_map>

namespace fl {

namespace {

struct Env {
    std::vector<std::pair<uint32_t, Value>> slots;

    const Value* find(uint32_t id) const {
        for (auto it = slots.rbegin(); it != slots.rend(); ++it)
            if (it->first == id) return &it->second;
        return nullptr;
    }
    void push(uint32_t id, Value v) { slots.emplace_back(id, v); }
    void pop() { slots.pop_back(); }
};

Env env_of(const Assignment& a) {
    Env e;
    for (auto& [s, v] : a.entries()) e.push(s.id, v);
    return e;
}

enum class Res : uint8_t {
    Unknown,
    Fun,
    Cup,
    Cap,
    Compl,
    Plus,
    Minus,
    In,
    Subseteq,
    Lt,
    Le,
    Gt,
    Ge,
    Def,
    BaseRel,
    Const,
    Nil,
    Empty,
};

struct Resolved {
    Res kind = Res::Unknown;
    int index = -1;
};

struct DefInfo {
    const Definition* def;
    std::vector<Sort> sorts;
    std::vector<uint32_t> params;
    size_t count;
    int stratum;
};

class Resolver {
public:
    Resolver(const Signature& sig, const DefinitionSet& defs) : sig_(sig), defs_(defs) {}

    const Resolved& get(const Node& n) {
        auto& vec = n.kind == Kind::App ? app_ : n.kind == Kind::Rel ? rel_ : const_;
        if (n.sym.id >= vec.size()) vec.resize(n.sym.id + 16);
        auto& r = vec[n.sym.id];
        if (r.kind == Res::Unknown) r = resolve(n);
        return r;
    }

private:
    Resolved resolve(const Node& n) {
        const std::string& s = n.name();
        if (n.kind == Kind::App) {
            if (s == "cup") return {Res::Cup};
            if (s == "cap") return {Res::Cap};
            if (s == "compl") return {Res::Compl};
            if (s == "+") return {Res::Plus};
            if (s == "-") return {Res::Minus};
            int i = sig_.function_index(s);
            if (i < 0) throw Error(ErrorCode::UnknownSymbol, "unknown function " + s);
            return {Res::Fun, i};
        }
        if (n.kind == Kind::Rel) {
            if (s == "in") return {Res::In};
            if (s == "subseteq") return {Res::Subseteq};
            if (s == "<") return {Res::Lt};
            if (s == "<=") return {Res::Le};
            if (s == ">") return {Res::Gt};
            if (s == ">=") return {Res::Ge};
            int d = defs_.index(s);
            if (d >= 0) return {Res::Def, d};
            int i = sig_.relation_index(s);
            if (i < 0) throw Error(ErrorCode::UnknownSymbol, "unknown relation " + s);
            return {Res::BaseRel, i};
        }
        if (s == "nil") return {Res::Nil};
        if (s == "emptyset") return {Res::Empty};
        int i = sig_.constant_index(s);
        if (i < 0) throw Error(ErrorCode::UnknownSymbol, "unknown constant " + s);
        return {Res::Const, i};
    }

    const Signature& sig_;
    const DefinitionSet& defs_;
    std::vector<Resolved> app_, rel_, const_;
};

struct Hooks {
    virtual ~Hooks() = default;
    virtual bool truth(int def, size_t idx) = 0;
    virtual LocSet support(int def, size_t idx) = 0;
};

class Evaluator {
public:
    Evaluator(const PreModel& pre, const std::vector<DefInfo>& info, Resolver& res, Hooks& hooks)
        : pre_(pre), info_(info), res_(res), hooks_(hooks) {}

    Value term(const Node& n, Env& env) {
        switch (n.kind) {
            case Kind::Const: {
                auto& r = res_.get(n);
                if (r.kind == Res::Nil) return Value::loc(0);
                if (r.kind == Res::Empty) return Value::set(0);
                return pre_.constant(r.index);
            }
            case Kind::Var: {
                auto* v = env.find(n.sym.id);
                if (!v) throw Error(ErrorCode::UnboundVariable, "no value for variable " + n.name());
                return *v;
            }
            case Kind::IntLit: return Value::integer(n.ival);
            case Kind::BoolLit: return Value::boolean(n.ival != 0);
            case Kind::App: return app(n, env);
            case Kind::IteTerm: return formula(*n.kids[0], env) ? term(*n.kids[1], env) : term(*n.kids[2], env);
            case Kind::SpFormula: return Value::set(sp_formula(*n.kids[0], env));
            case Kind::SpTerm: return Value::set(sp_term(*n.kids[0], env));
            default: throw Error(ErrorCode::SortMismatch, "formula in term position");
        }
    }

    bool formula(const Node& n, Env& env) {
        switch (n.kind) {
            case Kind::True: return true;
            case Kind::False: return false;
            case Kind::Eq: return term(*n.kids[0], env) == term(*n.kids[1], env);
            case Kind::Rel: return rel(n, env);
            case Kind::And: return formula(*n.kids[0], env) && formula(*n.kids[1], env);
            case Kind::Or: return formula(*n.kids[0], env) || formula(*n.kids[1], env);
            case Kind::Not: return !formula(*n.kids[0], env);
            case Kind::Implies: return !formula(*n.kids[0], env) || formula(*n.kids[1], env);
            case Kind::Ite: return formula(*n.kids[0], env) ? formula(*n.kids[1], env) : formula(*n.kids[2], env);
            case Kind::Exists: {
                bool found = false;
                bind(n.binders, 0, env, [&]() {
                    if (formula(*n.kids[0], env) && formula(*n.kids[1], env)) found = true;
                    return !found;
                });
                return found;
            }
            case Kind::Forall: {
                bool ok = true;
                bind(n.binders, 0, env, [&]() {
                    if (formula(*n.kids[0], env) && !formula(*n.kids[1], env)) ok = false;
                    return ok;
                });
                return ok;
            }
            default: throw Error(ErrorCode::SortMismatch, "term in formula position");
        }
    }

    LocSet sp_term(const Node& n, Env& env) {
        switch (n.kind) {
            case Kind::Const:
            case Kind::Var:
            case Kind::IntLit:
            case Kind::BoolLit:
                return 0;
            case Kind::App: {
                LocSet s = 0;
                for (auto& k : n.kids) s |= sp_term(*k, env);
                auto& r = res_.get(n);
                if (r.kind == Res::Fun) {
                    auto& f = pre_.signature().functions()[r.index];
                    if (f.is_mutable)
                        for (size_t i = 0; i < f.args.size(); ++i)
                            if (f.args[i] == Sort::Foreground) s |= bit(static_cast<int>(term(*n.kids[i], env).v));
                }
                return s;
            }
            case Kind::IteTerm: {
                LocSet s = sp_formula(*n.kids[0], env);
                return s | (formula(*n.kids[0], env) ? sp_term(*n.kids[1], env) : sp_term(*n.kids[2], env));
            }
            case Kind::SpFormula: return sp_formula(*n.kids[0], env);
            case Kind::SpTerm: return sp_term(*n.kids[0], env);
            default: throw Error(ErrorCode::SortMismatch, "formula in term position");
        }
    }

    LocSet sp_formula(const Node& n, Env& env) {
        switch (n.kind) {
            case Kind::True:
            case Kind::False:
                return 0;
            case Kind::Eq: return sp_term(*n.kids[0], env) | sp_term(*n.kids[1], env);
            case Kind::Rel: {
                LocSet s = 0;
                for (auto& k : n.kids) s |= sp_term(*k, env);
                auto& r = res_.get(n);
                if (r.kind == Res::Def) {
                    auto idx = def_index(r.index, n, env);
                    if (idx) s |= hooks_.support(r.index, *idx);
                }
                return s;
            }
            case Kind::And:
            case Kind::Or:
            case Kind::Implies:
                return sp_formula(*n.kids[0], env) | sp_formula(*n.kids[1], env);
            case Kind::Not: return sp_formula(*n.kids[0], env);
            case Kind::Ite: {
                LocSet s = sp_formula(*n.kids[0], env);
                return s | (formula(*n.kids[0], env) ? sp_formula(*n.kids[1], env) : sp_formula(*n.kids[2], env));
            }
            case Kind::Exists:
            case Kind::Forall: {
                LocSet s = 0;
                bind(n.binders, 0, env, [&]() {
                    s |= sp_formula(*n.kids[0], env);
                    if (formula(*n.kids[0], env)) s |= sp_formula(*n.kids[1], env);
                    return true;
                });
                return s;
            }
            default: throw Error(ErrorCode::SortMismatch, "term in formula position");
        }
    }

private:
    template <class F>
    bool bind(const std::vector<Binder>& bs, size_t i, Env& env, F&& f) {
        if (i == bs.size()) return f();
        size_t n = pre_.domain_size(bs[i].sort);
        for (size_t k = 0; k < n; ++k) {
            env.push(bs[i].var.id, pre_.value_at(bs[i].sort, k));
            bool go_on = bind(bs, i + 1, env, f);
            env.pop();
            if (!go_on) return false;
        }
        return true;
    }

    std::optional<size_t> def_index(int d, const Node& n, Env& env) {
        std::array<Value, 16> args;
        if (n.kids.size() > args.size()) throw Error(ErrorCode::BoundsTooLarge, "too many arguments");
        for (size_t i = 0; i < n.kids.size(); ++i) args[i] = term(*n.kids[i], env);
        return pre_.tuple_index(info_[d].sorts, args.data());
    }

    Value app(const Node& n, Env& env) {
        auto& r = res_.get(n);
        switch (r.kind) {
            case Res::Cup: return Value::set(term(*n.kids[0], env).mask() | term(*n.kids[1], env).mask());
            case Res::Cap: return Value::set(term(*n.kids[0], env).mask() & term(*n.kids[1], env).mask());
            case Res::Compl: return Value::set(~term(*n.kids[0], env).mask() & pre_.universe());
            case Res::Plus: return Value::integer(term(*n.kids[0], env).v + term(*n.kids[1], env).v);
            case Res::Minus: return Value::integer(term(*n.kids[0], env).v - term(*n.kids[1], env).v);
            default: {
                std::array<Value, 16> args;
                if (n.kids.size() > args.size()) throw Error(ErrorCode::BoundsTooLarge, "too many arguments");
                for (size_t i = 0; i < n.kids.size(); ++i) args[i] = term(*n.kids[i], env);
                return pre_.apply(r.index, args.data());
            }
        }
    }

    bool rel(const Node& n, Env& env) {
        auto& r = res_.get(n);
        switch (r.kind) {
            case Res::In: return has(term(*n.kids[1], env).mask(), static_cast<int>(term(*n.kids[0], env).v));
            case Res::Subseteq: return (term(*n.kids[0], env).mask() & ~term(*n.kids[1], env).mask()) == 0;
            case Res::Lt: return term(*n.kids[0], env).v < term(*n.kids[1], env).v;
            case Res::Le: return term(*n.kids[0], env).v <= term(*n.kids[1], env).v;
            case Res::Gt: return term(*n.kids[0], env).v > term(*n.kids[1], env).v;
            case Res::Ge: return term(*n.kids[0], env).v >= term(*n.kids[1], env).v;
            case Res::Def: {
                auto idx = def_index(r.index, n, env);
                return idx && hooks_.truth(r.index, *idx);
            }
            default: {
                std::array<Value, 16> args;
                for (size_t i = 0; i < n.kids.size(); ++i) args[i] = term(*n.kids[i], env);
                return pre_.holds(r.index, args.data());
            }
        }
    }

    const PreModel& pre_;
    const std::vector<DefInfo>& info_;
    Resolver& res_;
    Hooks& hooks_;
};

constexpr uint64_t kIndexMask = (uint64_t(1) << 40) - 1;
inline uint64_t make_key(int d, size_t i) { return (uint64_t(d) << 40) | i; }

template <class T>
class Solver {
public:
    using Compute = std::function<T(int, size_t, uint64_t)>;

    void init(const std::vector<DefInfo>& info, WorklistOrder order) {
        tables_.resize(info.size());
        sizes_.clear();
        for (auto& d : info) sizes_.push_back(d.count);
        order_ = order;
    }
    void set_compute(Compute c) { compute_ = std::move(c); }

    T get(int d, size_t i, const uint64_t* reader) {
        auto& t = table(d);
        uint8_t st = t.state[i] & 3;
        if (st == 2) return t.val[i];
        if (!running_) {
            discover(d, i);
            run();
            return tables_[d].val[i];
        }
        if (st == 0) discover(d, i);
        if (reader) {
            auto& rs = readers_[make_key(d, i)];
            if (rs.empty() || rs.back() != *reader) rs.push_back(*reader);
        }
        return t.val[i];
    }

    // request every key of def d and solve
    void force(int d) {
        auto& t = table(d);
        bool any = false;
        if (order_ == WorklistOrder::Forward) {
            for (size_t i = 0; i < t.val.size(); ++i)
                if ((t.state[i] & 3) == 0) discover(d, i), any = true;
        } else {
            for (size_t i = t.val.size(); i-- > 0;)
                if ((t.state[i] & 3) == 0) discover(d, i), any = true;
        }
        if (any) run();
    }

    bool known(int d, size_t i) const {
        auto& t = tables_[d];
        return !t.state.empty() && (t.state[i] & 3) == 2;
    }
    T value(int d, size_t i) const { return tables_[d].val[i]; }
    size_t solved() const { return solved_; }

private:
    struct Table {
        std::vector<T> val;
        std::vector<uint8_t> state;  // bits 0-1: 0 unknown, 1 pending, 2 final; bit 2: queued
    };

    Table& table(int d) {
        auto& t = tables_[d];
        if (t.state.empty() && sizes_[d]) {
            t.val.assign(sizes_[d], T{});
            t.state.assign(sizes_[d], 0);
        }
        return t;
    }

    void discover(int d, size_t i) {
        auto& t = tables_[d];
        t.state[i] = 1;
        pending_.push_back(make_key(d, i));
        enqueue(make_key(d, i));
    }

    void enqueue(uint64_t k) {
        auto& st = tables_[k >> 40].state[k & kIndexMask];
        if (st & 4) return;
        st |= 4;
        queue_.push_back(k);
    }

    void run() {
        running_ = true;
        size_t steps = 0;
        try {
            while (!queue_.empty()) {
                uint64_t k;
                if (order_ == WorklistOrder::Forward) {
                    k = queue_.front();
                    queue_.pop_front();
                } else {
                    k = queue_.back();
                    queue_.pop_back();
                }
                int d = static_cast<int>(k >> 40);
                size_t i = k & kIndexMask;
                tables_[d].state[i] &= ~uint8_t(4);
                T nv = compute_(d, i, k);
                T old = tables_[d].val[i];
                T merged = join(old, nv);
                if (merged != old) {
                    tables_[d].val[i] = merged;
                    auto it = readers_.find(k);
                    if (it != readers_.end())
                        for (auto r : it->second) enqueue(r);
                }
                if (++steps > 200'000'000)
                    throw Error(ErrorCode::FixpointDiverged, "fixpoint iteration exceeded its cap");
            }
        } catch (...) {
            for (auto k : pending_) {
                auto& t = tables_[k >> 40];
                t.state[k & kIndexMask] = 0;
                t.val[k & kIndexMask] = T{};
            }
            pending_.clear();
            queue_.clear();
            running_ = false;
            throw;
        }
        for (auto k : pending_) tables_[k >> 40].state[k & kIndexMask] = 2;
        solved_ += pending_.size();
        pending_.clear();
        running_ = false;
    }

    static T join(T a, T b) { return a | b; }

    std::vector<Table> tables_;
    std::vector<size_t> sizes_;
    std::unordered_map<uint64_t, std::vector<uint64_t>> readers_;
    std::deque<uint64_t> queue_;
    std::vector<uint64_t> pending_;
    bool running_ = false;
    WorklistOrder order_ = WorklistOrder::Forward;
    Compute compute_;
    size_t solved_ = 0;
};

}  // namespace

struct FrameModel::Impl {
    std::shared_ptr<const PreModel> pre;
    std::shared_ptr<const DefinitionSet> defs;
    std::vector<DefInfo> info;
    Resolver resolver;
    Solver<LocSet> sp;
    std::vector<Solver<uint8_t>> truth;

    Impl(std::shared_ptr<const PreModel> p, std::shared_ptr<const DefinitionSet> d, FrameOptions opts)
        : pre(std::move(p)), defs(std::move(d)), resolver(pre->signature(), *defs) {
        int strata = 1;
        for (auto& def : defs->all()) {
            DefInfo di{&def, {}, {}, 1, def.stratum};
            for (auto& b : def.params) {
                di.sorts.push_back(b.sort);
                di.params.push_back(b.var.id);
            }
            di.count = pre->tuple_count(di.sorts);
            if (di.count > kIndexMask) throw Error(ErrorCode::BoundsTooLarge, "definition " + def.name + " too wide");
            strata = std::max(strata, def.stratum + 1);
            info.push_back(std::move(di));
        }
        sp.init(info, opts.order);
        sp.set_compute([this](int d, size_t i, uint64_t self) { return compute_support(d, i, self); });
        truth.resize(strata);
        for (int s = 0; s < strata; ++s) {
            truth[s].init(info, opts.order);
            truth[s].set_compute(
                [this, s](int d, size_t i, uint64_t self) { return compute_truth(s, d, i, self); });
        }
    }

    Env params_env(int d, size_t i) {
        std::array<Value, 16> vals;
        auto& di = info[d];
        pre->tuple_values(di.sorts, i, vals.data());
        Env e;
        for (size_t k = 0; k < di.params.size(); ++k) e.push(di.params[k], vals[k]);
        return e;
    }

    struct SupportHooks : Hooks {
        Impl* m;
        uint64_t self;
        bool truth(int d, size_t) override {
            throw Error(ErrorCode::InvalidInput,
                        "support of a guard depends on inductive relation " + m->info[d].def->name);
        }
        LocSet support(int d, size_t i) override { return m->sp.get(d, i, &self); }
    };

    struct TruthHooks : Hooks {
        Impl* m;
        int stratum;
        uint64_t self;
        bool truth(int d, size_t i) override {
            int s = m->info[d].stratum;
            if (s == stratum) return m->truth[s].get(d, i, &self) != 0;
            if (s > stratum)
                throw Error(ErrorCode::InvalidInput, "definition reads a higher stratum: " + m->info[d].def->name);
            return m->truth[s].get(d, i, nullptr) != 0;
        }
        LocSet support(int d, size_t i) override { return m->sp.get(d, i, nullptr); }
    };

    struct TopHooks : Hooks {
        Impl* m;
        bool truth(int d, size_t i) override { return m->truth[m->info[d].stratum].get(d, i, nullptr) != 0; }
        LocSet support(int d, size_t i) override { return m->sp.get(d, i, nullptr); }
    };

    LocSet compute_support(int d, size_t i, uint64_t self) {
        SupportHooks h;
        h.m = this;
        h.self = self;
        Evaluator ev(*pre, info, resolver, h);
        Env e = params_env(d, i);
        try {
            return ev.sp_formula(*info[d].def->body, e);
        } catch (const Error& err) {
            if (err.code() == ErrorCode::DomainOverflow)
                throw Error(ErrorCode::DomainOverflow, std::string(err.what()) + " in definition " + info[d].def->name);
            throw;
        }
    }

    uint8_t compute_truth(int s, int d, size_t i, uint64_t self) {
        TruthHooks h;
        h.m = this;
        h.stratum = s;
        h.self = self;
        Evaluator ev(*pre, info, resolver, h);
        Env e = params_env(d, i);
        try {
            return ev.formula(*info[d].def->body, e) ? 1 : 0;
        } catch (const Error& err) {
            if (err.code() == ErrorCode::DomainOverflow)
                throw Error(ErrorCode::DomainOverflow, std::string(err.what()) + " in definition " + info[d].def->name);
            throw;
        }
    }

    int def_index(const std::string& name) const {
        int d = defs->index(name);
        if (d < 0) throw Error(ErrorCode::UnknownSymbol, "unknown definition " + name);
        return d;
    }

    std::optional<size_t> tuple(int d, const std::vector<Value>& args) const {
        if (args.size() != info[d].sorts.size())
            throw Error(ErrorCode::SortMismatch, "wrong number of arguments for " + info[d].def->name);
        for (size_t k = 0; k < args.size(); ++k)
            if (args[k].sort != info[d].sorts[k])
                throw Error(ErrorCode::SortMismatch, "wrong argument sort for " + info[d].def->name);
        return pre->tuple_index(info[d].sorts, args.data());
    }
};

FrameModel::FrameModel(std::shared_ptr<const PreModel> pre, std::shared_ptr<const DefinitionSet> defs,
                       FrameOptions opts)
    : impl_(std::make_shared<Impl>(std::move(pre), std::move(defs), opts)) {}

const PreModel& FrameModel::pre() const { return *impl_->pre; }
const std::shared_ptr<const PreModel>& FrameModel::pre_ptr() const { return impl_->pre; }
const DefinitionSet& FrameModel::defs() const { return *impl_->defs; }
const std::shared_ptr<const DefinitionSet>& FrameModel::defs_ptr() const { return impl_->defs; }

bool FrameModel::eval(const NodePtr& f, const Assignment& a) const {
    Impl::TopHooks h;
    h.m = impl_.get();
    Evaluator ev(*impl_->pre, impl_->info, impl_->resolver, h);
    Env e = env_of(a);
    return ev.formula(*f, e);
}

Value FrameModel::eval_term(const NodePtr& t, const Assignment& a) const {
    Impl::TopHooks h;
    h.m = impl_.get();
    Evaluator ev(*impl_->pre, impl_->info, impl_->resolver, h);
    Env e = env_of(a);
    return ev.term(*t, e);
}

LocSet FrameModel::support(const NodePtr& n, const Assignment& a) const {
    Impl::TopHooks h;
    h.m = impl_.get();
    Evaluator ev(*impl_->pre, impl_->info, impl_->resolver, h);
    Env e = env_of(a);
    return n->is_term() ? ev.sp_term(*n, e) : ev.sp_formula(*n, e);
}

bool FrameModel::holds(const std::string& def, const std::vector<Value>& args) const {
    int d = impl_->def_index(def);
    auto t = impl_->tuple(d, args);
    if (!t) return false;
    return impl_->truth[impl_->info[d].stratum].get(d, *t, nullptr) != 0;
}

LocSet FrameModel::inductive_support(const std::string& def, const std::vector<Value>& args) const {
    int d = impl_->def_index(def);
    auto t = impl_->tuple(d, args);
    if (!t) return 0;
    return impl_->sp.get(d, *t, nullptr);
}

void FrameModel::complete() const {
    auto& im = *impl_;
    for (size_t d = 0; d < im.info.size(); ++d) im.sp.force(static_cast<int>(d));
    for (auto& s : im.truth)
        for (size_t d = 0; d < im.info.size(); ++d)
            if (&s == &im.truth[im.info[d].stratum]) s.force(static_cast<int>(d));
}

std::vector<uint8_t> FrameModel::truth_table(const std::string& def) const {
    int d = impl_->def_index(def);
    auto& s = impl_->truth[impl_->info[d].stratum];
    s.force(d);
    std::vector<uint8_t> out(impl_->info[d].count);
    for (size_t i = 0; i < out.size(); ++i) out[i] = s.value(d, i);
    return out;
}

std::vector<LocSet> FrameModel::support_table(const std::string& def) const {
    int d = impl_->def_index(def);
    impl_->sp.force(d);
    std::vector<LocSet> out(impl_->info[d].count);
    for (size_t i = 0; i < out.size(); ++i) out[i] = impl_->sp.value(d, i);
    return out;
}

bool FrameModel::is_fixpoint() const {
    complete();
    auto& im = *impl_;
    struct ReadHooks : Hooks {
        Impl* m;
        bool truth(int d, size_t i) override { return m->truth[m->info[d].stratum].value(d, i) != 0; }
        LocSet support(int d, size_t i) override { return m->sp.value(d, i); }
    } h;
    h.m = impl_.get();
    Evaluator ev(*im.pre, im.info, im.resolver, h);
    for (size_t d = 0; d < im.info.size(); ++d) {
        for (size_t i = 0; i < im.info[d].count; ++i) {
            Env e = im.params_env(static_cast<int>(d), i);
            if (ev.sp_formula(*im.info[d].def->body, e) != im.sp.value(static_cast<int>(d), i)) return false;
            bool t = ev.formula(*im.info[d].def->body, e);
            if (t != (im.truth[im.info[d].stratum].value(static_cast<int>(d), i) != 0)) return false;
        }
    }
    return true;
}

size_t FrameModel::solved_keys() const {
    size_t n = impl_->sp.solved();
    for (auto& s : impl_->truth) n += s.solved();
    return n;
}

FrameModel frame_model(const PreModel& pre, const DefinitionSet& defs, FrameOptions opts) {
    return frame_model(std::make_shared<const PreModel>(pre), std::make_shared<const DefinitionSet>(defs), opts);
}

FrameModel frame_model(std::shared_ptr<const PreModel> pre, std::shared_ptr<const DefinitionSet> defs,
                       FrameOptions opts) {
    FrameModel m(std::move(pre), std::move(defs), opts);
    m.complete();
    return m;
}

bool eval_formula(const FrameModel& m, const Assignment& a, const NodePtr& f) { return m.eval(f, a); }
Value eval_term(const FrameModel& m, const Assignment& a, const NodePtr& t) { return m.eval_term(t, a); }
LocSet support(const FrameModel& m, const Assignment& a, const NodePtr& n) { return m.support(n, a); }

FrameVerdict check_frame_instance(const FrameModel& m, const Mutation& mu, const Assignment& a, const NodePtr& n) {
    FrameVerdict v;
    v.support = m.support(n, a);
    auto post = std::make_shared<const PreModel>(apply_mutation(m.pre(), mu));
    if (!is_stable_on(m.pre(), *post, v.support)) {
        v.kind = FrameVerdictKind::NotApplicable;
        return v;
    }
    FrameModel m2(post, m.defs_ptr());
    if (n->is_term()) {
        Value a1 = m.eval_term(n, a), a2 = m2.eval_term(n, a);
        v.before = v.after = true;
        if (a1 != a2) {
            v.kind = FrameVerdictKind::Fail;
            v.detail = "term value changed from " + format_value(a1) + " to " + format_value(a2);
        }
    } else {
        v.before = m.eval(n, a);
        v.after = m2.eval(n, a);
        if (v.before != v.after) {
            v.kind = FrameVerdictKind::Fail;
            v.detail = "truth changed";
        }
    }
    v.support_after = m2.support(n, a);
    if (v.kind == FrameVerdictKind::Pass && v.support_after != v.support) {
        v.kind = FrameVerdictKind::Fail;
        v.detail = "support changed from " + format_set(v.support) + " to " + format_set(v.support_after);
    }
    return v;
}

std::vector<Mutation> single_entry_mutations(const PreModel& m, const std::set<std::string>* only) {
    std::vector<Mutation> out;
    auto& sig = m.signature();
    std::vector<Value> args;
    for (size_t fi = 0; fi < sig.functions().size(); ++fi) {
        auto& f = sig.functions()[fi];
        if (!f.is_mutable || (only && !only->count(f.name))) continue;
        args.resize(f.args.size());
        size_t n = m.tuple_count(f.args);
        size_t dom = m.domain_size(f.result);
        for (size_t t = 0; t < n; ++t) {
            m.tuple_values(f.args, t, args.data());
            Value cur = m.entry(static_cast<int>(fi), t);
            for (size_t k = 0; k < dom; ++k) {
                Value nv = m.value_at(f.result, k);
                if (nv == cur) continue;
                Mutation mu;
                mu.override_entry(f.name, args, nv);
                out.push_back(std::move(mu));
            }
        }
    }
    return out;
}

}  // namespace fl
