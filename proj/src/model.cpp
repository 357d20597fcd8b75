#include "fl/model.hpp"

#include <algorithm>
#include <bit>
#include <functional>

namespace fl {

int popcount(LocSet s) { return std::popcount(s); }

std::string element_name(int e) { return e == 0 ? "nil" : "u" + std::to_string(e); }

std::optional<int> parse_element(const std::string& s) {
    if (s == "nil") return 0;
    if (s.size() < 2 || s[0] != 'u') return std::nullopt;
    if (s.find_first_not_of("0123456789", 1) != std::string::npos) return std::nullopt;
    int e = std::stoi(s.substr(1));
    if (e <= 0) return std::nullopt;
    return e;
}

std::string format_set(LocSet s) {
    std::string out = "{";
    bool first = true;
    for (int e = 0; e < 64; ++e)
        if (has(s, e)) {
            if (!first) out += ", ";
            out += element_name(e);
            first = false;
        }
    return out + "}";
}

std::string format_value(const Value& v) {
    switch (v.sort) {
        case Sort::Foreground: return element_name(static_cast<int>(v.v));
        case Sort::SetOfForeground: return format_set(v.mask());
        case Sort::Int: return std::to_string(v.v);
        case Sort::Bool: return v.v ? "true" : "false";
    }
    return "?";
}

std::optional<Value> parse_value(const std::string& s, Sort sort) {
    switch (sort) {
        case Sort::Foreground: {
            auto e = parse_element(s);
            if (!e) return std::nullopt;
            return Value::loc(*e);
        }
        case Sort::Int: {
            if (s.empty()) return std::nullopt;
            size_t start = s[0] == '-' ? 1 : 0;
            if (start == s.size() || s.find_first_not_of("0123456789", start) != std::string::npos)
                return std::nullopt;
            return Value::integer(std::stoll(s));
        }
        case Sort::Bool:
            if (s == "true") return Value::boolean(true);
            if (s == "false") return Value::boolean(false);
            return std::nullopt;
        case Sort::SetOfForeground: {
            if (s.size() < 2 || s.front() != '{' || s.back() != '}') return std::nullopt;
            LocSet m = 0;
            std::string cur;
            for (size_t i = 1; i + 1 <= s.size() - 1; ++i) {
                char c = s[i];
                if (c == ',' || c == ' ') {
                    if (!cur.empty()) {
                        auto e = parse_element(cur);
                        if (!e) return std::nullopt;
                        m |= bit(*e);
                        cur.clear();
                    }
                } else {
                    cur += c;
                }
            }
            if (!cur.empty()) {
                auto e = parse_element(cur);
                if (!e) return std::nullopt;
                m |= bit(*e);
            }
            return Value::set(m);
        }
    }
    return std::nullopt;
}

void Assignment::set(const std::string& name, Value v) { set(Symbol(name), v); }

void Assignment::set(Symbol name, Value v) {
    for (auto& [s, val] : entries_)
        if (s == name) {
            val = v;
            return;
        }
    entries_.emplace_back(name, v);
}

const Value* Assignment::find(Symbol name) const {
    for (auto& [s, val] : entries_)
        if (s == name) return &val;
    return nullptr;
}

Value Assignment::get(const std::string& name) const {
    auto* v = find(name);
    if (!v) throw Error(ErrorCode::UnboundVariable, "no value for " + name);
    return *v;
}

std::string Assignment::str() const {
    auto sorted = entries_;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.first.str() < b.first.str(); });
    std::string s;
    for (auto& [n, v] : sorted) {
        if (!s.empty()) s += ",";
        s += n.str() + "=" + format_value(v);
    }
    return s;
}

static Value default_result(const FunctionDecl& f, const Value* args, IntRange ints) {
    int e = 0;
    for (size_t i = 0; i < f.args.size(); ++i)
        if (f.args[i] == Sort::Foreground) {
            e = static_cast<int>(args[i].v);
            break;
        }
    switch (f.result) {
        case Sort::Foreground: return Value::loc(e);
        case Sort::Int: return Value::integer(std::clamp<int64_t>(e, ints.lo, ints.hi));
        default: return Value::boolean(false);
    }
}

static Value default_constant(Sort s, IntRange ints) {
    if (s == Sort::Int) return Value::integer(std::clamp<int64_t>(0, ints.lo, ints.hi));
    if (s == Sort::Bool) return Value::boolean(false);
    return Value::loc(0);
}

PreModel::PreModel(std::shared_ptr<const Signature> sig, int fg_size, IntRange ints)
    : sig_(std::move(sig)), fg_(fg_size), ints_(ints) {
    if (fg_ < 1 || fg_ > kForegroundCap)
        throw Error(ErrorCode::BoundsTooLarge,
                    "foreground size must be between 1 and " + std::to_string(kForegroundCap));
    if (ints_.lo > ints_.hi) throw Error(ErrorCode::BoundsTooLarge, "empty int range");
    for (auto& c : sig_->constants()) consts_.push_back(default_constant(c.sort, ints_));
    for (auto& f : sig_->functions()) {
        size_t n = tuple_count(f.args);
        if (n > (size_t(1) << 22)) throw Error(ErrorCode::BoundsTooLarge, "table for " + f.name + " too large");
        std::vector<int64_t> table(n);
        std::vector<Value> args(f.args.size());
        for (size_t t = 0; t < n; ++t) {
            tuple_values(f.args, t, args.data());
            table[t] = default_result(f, args.data(), ints_).v;
        }
        funs_.push_back(std::move(table));
    }
    for (auto& r : sig_->relations()) rels_.emplace_back(tuple_count(r.args), 0);
}

size_t PreModel::domain_size(Sort s) const {
    switch (s) {
        case Sort::Foreground: return static_cast<size_t>(fg_);
        case Sort::Int: return ints_.size();
        case Sort::Bool: return 2;
        case Sort::SetOfForeground: return size_t(1) << fg_;
    }
    return 0;
}

std::optional<size_t> PreModel::value_index(const Value& v) const {
    switch (v.sort) {
        case Sort::Foreground:
            if (v.v < 0 || v.v >= fg_) return std::nullopt;
            return static_cast<size_t>(v.v);
        case Sort::Int:
            if (!ints_.contains(v.v)) return std::nullopt;
            return static_cast<size_t>(v.v - ints_.lo);
        case Sort::Bool: return static_cast<size_t>(v.v != 0);
        case Sort::SetOfForeground: return static_cast<size_t>(v.v);
    }
    return std::nullopt;
}

Value PreModel::value_at(Sort s, size_t index) const {
    switch (s) {
        case Sort::Foreground: return Value::loc(static_cast<int>(index));
        case Sort::Int: return Value::integer(ints_.lo + static_cast<int64_t>(index));
        case Sort::Bool: return Value::boolean(index != 0);
        case Sort::SetOfForeground: return Value::set(index);
    }
    return {};
}

size_t PreModel::tuple_count(const std::vector<Sort>& sorts) const {
    size_t n = 1;
    for (Sort s : sorts) n *= domain_size(s);
    return n;
}

std::optional<size_t> PreModel::tuple_index(const std::vector<Sort>& sorts, const Value* args) const {
    size_t idx = 0;
    for (size_t i = 0; i < sorts.size(); ++i) {
        auto p = value_index(args[i]);
        if (!p) return std::nullopt;
        idx = idx * domain_size(sorts[i]) + *p;
    }
    return idx;
}

void PreModel::tuple_values(const std::vector<Sort>& sorts, size_t index, Value* out) const {
    for (size_t i = sorts.size(); i-- > 0;) {
        size_t d = domain_size(sorts[i]);
        out[i] = value_at(sorts[i], index % d);
        index /= d;
    }
}

Value PreModel::constant(const std::string& name) const {
    int i = sig_->constant_index(name);
    if (i < 0) throw Error(ErrorCode::UnknownSymbol, "unknown constant " + name);
    return consts_[i];
}

void PreModel::set_constant(int idx, Value v) {
    if (!value_index(v)) throw Error(ErrorCode::DomainOverflow, "constant value out of range");
    consts_[idx] = v;
}

void PreModel::set_constant(const std::string& name, Value v) {
    int i = sig_->constant_index(name);
    if (i < 0) throw Error(ErrorCode::UnknownSymbol, "unknown constant " + name);
    set_constant(i, v);
}

Value PreModel::apply(int fidx, const Value* args) const {
    auto& f = sig_->functions()[fidx];
    auto t = tuple_index(f.args, args);
    if (!t) throw Error(ErrorCode::DomainOverflow, "argument of " + f.name + " outside the int range");
    return {f.result, funs_[fidx][*t]};
}

Value PreModel::entry(int fidx, size_t tuple) const {
    return {sig_->functions()[fidx].result, funs_[fidx][tuple]};
}

void PreModel::set_entry(int fidx, size_t tuple, Value v) {
    auto& f = sig_->functions()[fidx];
    if (v.sort != f.result) throw Error(ErrorCode::SortMismatch, "wrong result sort for " + f.name);
    if (!value_index(v)) throw Error(ErrorCode::DomainOverflow, "value for " + f.name + " out of range");
    funs_[fidx][tuple] = v.v;
}

void PreModel::set(const std::string& f, const std::vector<Value>& args, Value v) {
    int i = sig_->function_index(f);
    if (i < 0) throw Error(ErrorCode::UnknownSymbol, "unknown function " + f);
    auto& d = sig_->functions()[i];
    if (args.size() != d.args.size()) throw Error(ErrorCode::SortMismatch, "arity of " + f);
    auto t = tuple_index(d.args, args.data());
    if (!t) throw Error(ErrorCode::DomainOverflow, "argument of " + f + " out of range");
    set_entry(i, *t, v);
}

Value PreModel::get(const std::string& f, const std::vector<Value>& args) const {
    int i = sig_->function_index(f);
    if (i < 0) throw Error(ErrorCode::UnknownSymbol, "unknown function " + f);
    return apply(i, args.data());
}

bool PreModel::holds(int ridx, const Value* args) const {
    auto t = tuple_index(sig_->relations()[ridx].args, args);
    if (!t) return false;
    return rels_[ridx][*t] != 0;
}

void PreModel::set_relation(const std::string& r, const std::vector<Value>& args, bool b) {
    int i = sig_->relation_index(r);
    if (i < 0) throw Error(ErrorCode::UnknownSymbol, "unknown relation " + r);
    auto t = tuple_index(sig_->relations()[i].args, args.data());
    if (!t) throw Error(ErrorCode::DomainOverflow, "argument of " + r + " out of range");
    rels_[i][*t] = b ? 1 : 0;
}

bool PreModel::same_tables(const PreModel& o) const {
    return fg_ == o.fg_ && ints_ == o.ints_ && consts_ == o.consts_ && funs_ == o.funs_ && rels_ == o.rels_;
}

size_t PreModel::hash() const {
    size_t h = std::hash<int>()(fg_);
    auto mix = [&](int64_t v) { h ^= std::hash<int64_t>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (auto& c : consts_) mix(c.v);
    for (auto& t : funs_)
        for (auto v : t) mix(v);
    for (auto& t : rels_)
        for (auto v : t) mix(v);
    return h;
}

PreModel apply_mutation(const PreModel& m, const Mutation& mu) {
    PreModel out = m;
    for (auto& e : mu.entries) {
        auto* f = m.signature().function(e.function);
        if (!f) throw Error(ErrorCode::UnknownSymbol, "unknown function " + e.function);
        if (!f->is_mutable) throw Error(ErrorCode::IllegalMutation, e.function + " is not mutable");
        out.set(e.function, e.args, e.value);
    }
    return out;
}

bool is_stable_on(const PreModel& m1, const PreModel& m2, LocSet x) {
    if (m1.fg_size() != m2.fg_size() || !(m1.ints() == m2.ints()))
        throw Error(ErrorCode::UniverseMismatch, "models have different universes");
    auto& sig = m1.signature();
    std::vector<Value> args;
    for (size_t fi = 0; fi < sig.functions().size(); ++fi) {
        auto& f = sig.functions()[fi];
        if (!f.is_mutable) continue;
        args.resize(f.args.size());
        size_t n = m1.tuple_count(f.args);
        for (size_t t = 0; t < n; ++t) {
            m1.tuple_values(f.args, t, args.data());
            bool touches = false;
            for (size_t i = 0; i < f.args.size(); ++i)
                if (f.args[i] == Sort::Foreground && has(x, static_cast<int>(args[i].v))) touches = true;
            if (touches && m1.entry(static_cast<int>(fi), t) != m2.entry(static_cast<int>(fi), t)) return false;
        }
    }
    return true;
}

PreModelEnumerator::PreModelEnumerator(std::shared_ptr<const Signature> sig, int fg_size, IntRange ints,
                                       ModelFilter filter)
    : base_(sig, fg_size, ints) {
    for (auto& c : filter.constants) {
        int i = sig->constant_index(c);
        if (i < 0) throw Error(ErrorCode::UnknownSymbol, "unknown constant " + c);
        Sort s = sig->constants()[i].sort;
        slots_.push_back({0, i, 0, s, base_.domain_size(s)});
    }
    for (size_t fi = 0; fi < sig->functions().size(); ++fi) {
        auto& f = sig->functions()[fi];
        bool vary = filter.functions ? filter.functions->count(f.name) > 0 : f.is_mutable;
        if (!vary) continue;
        size_t n = base_.tuple_count(f.args);
        for (size_t t = 0; t < n; ++t)
            slots_.push_back({1, static_cast<int>(fi), t, f.result, base_.domain_size(f.result)});
    }
    for (auto& r : filter.relations) {
        int i = sig->relation_index(r);
        if (i < 0) throw Error(ErrorCode::UnknownSymbol, "unknown relation " + r);
        size_t n = base_.tuple_count(sig->relations()[i].args);
        for (size_t t = 0; t < n; ++t) slots_.push_back({2, i, t, Sort::Bool, 2});
    }
    digits_.assign(slots_.size(), 0);
}

uint64_t PreModelEnumerator::count() const {
    uint64_t n = 1;
    for (auto& s : slots_) {
        if (n > (uint64_t(1) << 62) / s.radix) return ~uint64_t(0);
        n *= s.radix;
    }
    return n;
}

void PreModelEnumerator::reset() {
    digits_.assign(slots_.size(), 0);
    started_ = false;
    done_ = false;
}

bool PreModelEnumerator::next(PreModel& out) {
    if (done_) return false;
    if (started_) {
        size_t i = slots_.size();
        while (i > 0) {
            --i;
            if (++digits_[i] < slots_[i].radix) break;
            digits_[i] = 0;
            if (i == 0) {
                done_ = true;
                return false;
            }
        }
        if (slots_.empty()) {
            done_ = true;
            return false;
        }
    }
    started_ = true;
    out = base_;
    for (size_t i = 0; i < slots_.size(); ++i) {
        auto& s = slots_[i];
        Value v = out.value_at(s.sort, digits_[i]);
        if (s.kind == 0) out.set_constant(s.index, v);
        else if (s.kind == 1) out.set_entry(s.index, s.tuple, v);
        else out.set_relation(s.index, s.tuple, v.v != 0);
    }
    return true;
}

std::vector<PreModel> enumerate_pre_models(std::shared_ptr<const Signature> sig, int fg_size, IntRange ints,
                                           ModelFilter filter) {
    PreModelEnumerator en(std::move(sig), fg_size, ints, std::move(filter));
    if (en.count() > 5'000'000) throw Error(ErrorCode::BoundsTooLarge, "too many models to enumerate");
    std::vector<PreModel> out;
    PreModel m = en.base();
    while (en.next(m)) out.push_back(m);
    return out;
}

}  // namespace fl
