#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "fl/ast.hpp"
#include "fl/model.hpp"

namespace fl {

struct FrameSweepOptions {
    int fg_size = 3;
    IntRange ints{-1, 1};
    int exhaustive_limit = 3;  // sizes up to this are enumerated completely
    size_t samples = 10000;
    uint64_t seed = 0;
};

struct FrameSweepResult {
    bool exhaustive = true;
    size_t models = 0;
    size_t instances = 0;   // (model, assignment, mutation) triples examined
    size_t applicable = 0;  // of those, the mutation was stable on the support
    size_t violations = 0;
    std::optional<std::string> counterexample;  // first violation
};

// Mutates one table entry at a time and checks that truth, value and support survive whenever the
// mutation leaves the support untouched. Sizes 1..fg_size are covered.
FrameSweepResult frame_sweep(std::shared_ptr<const Signature> sig, std::shared_ptr<const DefinitionSet> defs,
                             const NodePtr& n, const FrameSweepOptions& o);

}  // namespace fl
