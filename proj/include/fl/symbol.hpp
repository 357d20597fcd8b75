#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fl {

// Interned identifier. Equality is id equality.
struct Symbol {
    uint32_t id = 0;
    Symbol() = default;
    explicit Symbol(std::string_view name);
    const std::string& str() const;
    bool operator==(const Symbol& o) const { return id == o.id; }
    bool operator!=(const Symbol& o) const { return id != o.id; }
    bool operator<(const Symbol& o) const { return str() < o.str(); }
};

}  // namespace fl
