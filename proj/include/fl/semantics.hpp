#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fl/ast.hpp"
#include "fl/model.hpp"

namespace fl {

enum class WorklistOrder { Forward, Reverse };

struct FrameOptions {
    WorklistOrder order = WorklistOrder::Forward;
};

// A pre-model together with the least interpretation of its inductive relations and
// support expressions. Tables are filled on demand; frame_model() fills all of them.
// Not safe for concurrent use (tables are filled lazily).
class FrameModel {
public:
    FrameModel(std::shared_ptr<const PreModel> pre, std::shared_ptr<const DefinitionSet> defs,
               FrameOptions opts = {});

    const PreModel& pre() const;
    const std::shared_ptr<const PreModel>& pre_ptr() const;
    const DefinitionSet& defs() const;
    const std::shared_ptr<const DefinitionSet>& defs_ptr() const;

    bool eval(const NodePtr& formula, const Assignment& a) const;
    Value eval_term(const NodePtr& term, const Assignment& a) const;
    LocSet support(const NodePtr& formula_or_term, const Assignment& a) const;

    bool holds(const std::string& def, const std::vector<Value>& args) const;
    LocSet inductive_support(const std::string& def, const std::vector<Value>& args) const;

    void complete() const;
    std::vector<uint8_t> truth_table(const std::string& def) const;
    std::vector<LocSet> support_table(const std::string& def) const;
    // one more round of both operators changes nothing
    bool is_fixpoint() const;
    // number of keys whose value was computed so far
    size_t solved_keys() const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

FrameModel frame_model(const PreModel& pre, const DefinitionSet& defs, FrameOptions opts = {});
FrameModel frame_model(std::shared_ptr<const PreModel> pre, std::shared_ptr<const DefinitionSet> defs,
                       FrameOptions opts = {});

bool eval_formula(const FrameModel& m, const Assignment& a, const NodePtr& f);
Value eval_term(const FrameModel& m, const Assignment& a, const NodePtr& t);
LocSet support(const FrameModel& m, const Assignment& a, const NodePtr& n);

enum class FrameVerdictKind { Pass, Fail, NotApplicable };

struct FrameVerdict {
    FrameVerdictKind kind = FrameVerdictKind::Pass;
    LocSet support = 0;
    bool before = false;
    bool after = false;
    LocSet support_after = 0;
    std::string detail;
};

FrameVerdict check_frame_instance(const FrameModel& m, const Mutation& mu, const Assignment& a, const NodePtr& n);

// every single-entry mutation of the mutable functions of m
std::vector<Mutation> single_entry_mutations(const PreModel& m, const std::set<std::string>* only = nullptr);

}  // namespace fl
