#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fl/ast.hpp"

namespace fl {

// Sets of foreground elements. Element 0 is nil.
using LocSet = uint64_t;
constexpr int kForegroundCap = 6;

inline bool has(LocSet s, int e) { return (s >> e) & 1u; }
inline LocSet bit(int e) { return LocSet(1) << e; }
inline LocSet full_set(int n) { return n >= 64 ? ~LocSet(0) : (LocSet(1) << n) - 1; }
int popcount(LocSet s);

struct IntRange {
    int64_t lo = -16;
    int64_t hi = 16;
    bool contains(int64_t v) const { return v >= lo && v <= hi; }
    size_t size() const { return static_cast<size_t>(hi - lo + 1); }
    bool operator==(const IntRange& o) const { return lo == o.lo && hi == o.hi; }
};

struct Value {
    Sort sort = Sort::Foreground;
    int64_t v = 0;

    static Value loc(int e) { return {Sort::Foreground, e}; }
    static Value set(LocSet s) { return {Sort::SetOfForeground, static_cast<int64_t>(s)}; }
    static Value integer(int64_t i) { return {Sort::Int, i}; }
    static Value boolean(bool b) { return {Sort::Bool, b ? 1 : 0}; }
    LocSet mask() const { return static_cast<LocSet>(v); }
    bool operator==(const Value& o) const { return sort == o.sort && v == o.v; }
    bool operator!=(const Value& o) const { return !(*this == o); }
    bool operator<(const Value& o) const { return sort != o.sort ? sort < o.sort : v < o.v; }
};

std::string element_name(int e);
std::optional<int> parse_element(const std::string& s);
std::string format_set(LocSet s);
std::string format_value(const Value& v);
// parses nil/uK, integers, true/false and {..} sets
std::optional<Value> parse_value(const std::string& s, Sort sort);

class Assignment {
public:
    void set(const std::string& name, Value v);
    void set(Symbol name, Value v);
    const Value* find(Symbol name) const;
    const Value* find(const std::string& name) const { return find(Symbol(name)); }
    Value get(const std::string& name) const;
    const std::vector<std::pair<Symbol, Value>>& entries() const { return entries_; }
    bool operator==(const Assignment& o) const { return entries_ == o.entries_; }
    std::string str() const;

private:
    std::vector<std::pair<Symbol, Value>> entries_;
};

class PreModel {
public:
    PreModel(std::shared_ptr<const Signature> sig, int fg_size, IntRange ints = {});

    const Signature& signature() const { return *sig_; }
    const std::shared_ptr<const Signature>& signature_ptr() const { return sig_; }
    int fg_size() const { return fg_; }
    IntRange ints() const { return ints_; }
    LocSet universe() const { return full_set(fg_); }

    size_t domain_size(Sort s) const;
    // position of a value inside its sort's domain, nullopt when out of range
    std::optional<size_t> value_index(const Value& v) const;
    Value value_at(Sort s, size_t index) const;

    size_t tuple_count(const std::vector<Sort>& sorts) const;
    std::optional<size_t> tuple_index(const std::vector<Sort>& sorts, const Value* args) const;
    void tuple_values(const std::vector<Sort>& sorts, size_t index, Value* out) const;

    Value constant(int idx) const { return consts_[idx]; }
    Value constant(const std::string& name) const;
    void set_constant(int idx, Value v);
    void set_constant(const std::string& name, Value v);

    // throws DomainOverflow if an int argument is outside the range
    Value apply(int fidx, const Value* args) const;
    Value entry(int fidx, size_t tuple) const;
    void set_entry(int fidx, size_t tuple, Value v);
    void set(const std::string& f, const std::vector<Value>& args, Value v);
    Value get(const std::string& f, const std::vector<Value>& args) const;

    bool holds(int ridx, const Value* args) const;
    bool holds_entry(int ridx, size_t tuple) const { return rels_[ridx][tuple] != 0; }
    void set_relation(int ridx, size_t tuple, bool b) { rels_[ridx][tuple] = b ? 1 : 0; }
    void set_relation(const std::string& r, const std::vector<Value>& args, bool b);

    bool same_tables(const PreModel& o) const;
    bool operator==(const PreModel& o) const { return same_tables(o); }
    size_t hash() const;

private:
    std::shared_ptr<const Signature> sig_;
    int fg_;
    IntRange ints_;
    std::vector<Value> consts_;
    std::vector<std::vector<int64_t>> funs_;
    std::vector<std::vector<uint8_t>> rels_;
};

struct Mutation {
    struct Entry {
        std::string function;
        std::vector<Value> args;
        Value value;
    };
    std::vector<Entry> entries;
    void override_entry(const std::string& f, std::vector<Value> args, Value v) {
        entries.push_back({f, std::move(args), v});
    }
    bool empty() const { return entries.empty(); }
};

PreModel apply_mutation(const PreModel& m, const Mutation& mu);
bool is_stable_on(const PreModel& m1, const PreModel& m2, LocSet x);

// Which symbols vary during enumeration. Unset functions means all mutable functions.
struct ModelFilter {
    std::optional<std::set<std::string>> functions;
    std::set<std::string> constants;
    std::set<std::string> relations;
};

class PreModelEnumerator {
public:
    PreModelEnumerator(std::shared_ptr<const Signature> sig, int fg_size, IntRange ints, ModelFilter filter = {});
    // false once exhausted
    bool next(PreModel& out);
    // closed-form number of models
    uint64_t count() const;
    void reset();
    const PreModel& base() const { return base_; }

private:
    struct Slot {
        int kind;  // 0 constant, 1 function, 2 relation
        int index;
        size_t tuple;
        Sort sort;
        size_t radix;
    };
    PreModel base_;
    std::vector<Slot> slots_;
    std::vector<size_t> digits_;
    bool started_ = false;
    bool done_ = false;
};

std::vector<PreModel> enumerate_pre_models(std::shared_ptr<const Signature> sig, int fg_size, IntRange ints,
                                           ModelFilter filter = {});

}  // namespace fl
