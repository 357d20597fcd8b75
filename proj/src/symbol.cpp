#include "fl/symbol.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace fl {

namespace {
struct Interner {
    std::mutex mu;
    std::deque<std::string> names;
    std::unordered_map<std::string_view, uint32_t> ids;
    Interner() { intern(""); }
    uint32_t intern(std::string_view s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        names.emplace_back(s);
        uint32_t id = static_cast<uint32_t>(names.size() - 1);
        ids.emplace(names.back(), id);
        return id;
    }
};

Interner& interner() {
    static Interner in;
    return in;
}
}  // namespace

Symbol::Symbol(std::string_view name) {
    auto& in = interner();
    std::lock_guard<std::mutex> lock(in.mu);
    id = in.intern(name);
}

const std::string& Symbol::str() const {
    auto& in = interner();
    std::lock_guard<std::mutex> lock(in.mu);
    return in.names[id];
}

}  // namespace fl
