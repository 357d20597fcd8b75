#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fl/ast.hpp"
#include "fl/model.hpp"
#include "fl/oracle.hpp"
#include "fl/whilelang.hpp"

namespace fl {

// Holds the signature and the definitions; transformers that need auxiliary
// definitions (derived inductive relations) add them here.
class ProgramLogic {
public:
    ProgramLogic(std::shared_ptr<const Signature> sig, DefinitionSet defs);

    const Signature& signature() const { return *sig_; }
    const std::shared_ptr<const Signature>& signature_ptr() const { return sig_; }
    // original definitions plus every derived one created so far, stratified
    std::shared_ptr<const DefinitionSet> defs() const;

    // beta with every f(t) read as ite(t = x : ite(f(x) = f(x) : rhs, rhs), f(t))
    NodePtr mw_mutation(const std::string& x, const std::string& f, const NodePtr& rhs, const NodePtr& beta);
    // beta evaluated after alloc(x), with v naming the allocated location
    NodePtr mw_alloc(const std::string& x, const std::string& v, const NodePtr& beta);

    NodePtr wtp(const Stmt& s, const NodePtr& beta);
    NodePtr wtp(const StmtPtr& s, const NodePtr& beta) { return wtp(*s, beta); }

    // name base#k unused by the signature, the definitions and everything issued so far
    std::string fresh(const std::string& base, const NodePtr& around = nullptr);

private:
    struct MwCtx;
    struct AllocCtx;
    NodePtr mw(MwCtx& c, const NodePtr& n);
    std::string mw_def(const std::string& def, const std::string& f, Sort rhs_sort);
    NodePtr alloc_rw(AllocCtx& c, const NodePtr& n);
    NodePtr alloc_member(AllocCtx& c, const NodePtr& set, const NodePtr& z);
    NodePtr halloc_call(AllocCtx& c, const NodePtr& n, const NodePtr& z);
    NodePtr halloc_body(AllocCtx& c, const NodePtr& n, const NodePtr& z);
    std::string alloc_def(const std::string& def);
    std::string halloc_def(const std::string& def);
    bool trivial(const NodePtr& n) const;
    void put(const Definition& d);

    std::shared_ptr<const Signature> sig_;
    DefinitionSet defs_;
    std::set<std::string> used_;
    std::map<std::string, std::string> derived_;
    std::map<const Node*, std::string> halloc_nodes_;
    std::vector<NodePtr> keep_;
    int halloc_counter_ = 0;
};

enum class ObligationKind { Implication, SupportEq, SupportDisjoint, FrameSideCondition };
const char* obligation_kind_name(ObligationKind k);

// lhs => rhs together with Sp(lhs) = Sp(rhs), checked on configurations whose heap is Sp(lhs)
struct Obligation {
    std::string id;
    ObligationKind kind = ObligationKind::Implication;
    std::string provenance;
    NodePtr lhs;
    NodePtr rhs;
    std::string text() const;
};

std::vector<Obligation> vc_gen(ProgramLogic& logic, const Triple& t);

enum class Verdict { Valid, Invalid, Inconclusive };
const char* verdict_name(Verdict v);

struct Bounds {
    int fg_size = 3;
    IntRange ints{-2, 2};
    int fuel = 32;
};

struct CheckResult {
    Verdict verdict = Verdict::Valid;
    std::optional<Configuration> counterexample;
    std::string detail;
    size_t cases = 0;
};

CheckResult check_obligation(const ProgramLogic& logic, const Obligation& o, const Bounds& b);
CheckResult check_triple(const ProgramLogic& logic, const Triple& t, const Bounds& b);
// set equality between configurations satisfying wtp tightly and preconfigurations of beta
CheckResult check_wtp_property(ProgramLogic& logic, const Stmt& s, const NodePtr& beta, const Bounds& b);

// frame rule side conditions for {alpha} S {beta} framed by mu
struct FrameRuleCheck {
    bool disjoint_supports = false;  // Sp(alpha) cap Sp(mu) = emptyset on every model satisfying both
    bool untouched_variables = false;
};
FrameRuleCheck check_frame_rule(const ProgramLogic& logic, const NodePtr& alpha, const StmtPtr& s,
                                const NodePtr& mu, const Bounds& b);

struct ObligationReport {
    Obligation obligation;
    CheckResult result;
};
// one JSON object per line
std::string to_jsonl(const ObligationReport& r);

struct VerifyResult {
    Verdict verdict = Verdict::Valid;
    std::vector<ObligationReport> reports;
};
VerifyResult verify(ProgramLogic& logic, const Triple& t, const Bounds& b);

// functions the formula reads, through definitions as well
std::set<std::string> functions_used(const NodePtr& n, const DefinitionSet& defs);

}  // namespace fl
