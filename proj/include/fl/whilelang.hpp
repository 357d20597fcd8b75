#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fl/ast.hpp"
#include "fl/model.hpp"

namespace fl {

enum class StmtKind { Skip, AssignConst, AssignVar, Lookup, AssignExpr, Mutate, Alloc, Free, If, While, Seq };

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

// x := c | x := y | x := y.f | v := be | x.f := y | alloc(x) | free(x)
// | if be then S else T | while be do S | S; T
struct Stmt {
    StmtKind kind = StmtKind::Skip;
    std::string x;      // assigned / dereferenced variable
    std::string y;      // source variable of a lookup
    std::string field;  // f in x := y.f and x.f := y
    NodePtr expr;       // right-hand side term, or the condition of if/while
    NodePtr invariant;  // while only, may be null
    std::vector<StmtPtr> body;  // Seq: statements; If: then, else; While: body
    Span span;
};

namespace stmt {
StmtPtr skip();
StmtPtr assign(const std::string& x, NodePtr rhs);  // picks AssignConst/AssignVar/AssignExpr
StmtPtr lookup(const std::string& x, const std::string& y, const std::string& f);
StmtPtr mutate(const std::string& x, const std::string& f, NodePtr rhs);
StmtPtr alloc(const std::string& x);
StmtPtr free_(const std::string& x);
StmtPtr if_(NodePtr cond, StmtPtr then_branch, StmtPtr else_branch);
StmtPtr while_(NodePtr cond, StmtPtr body, NodePtr invariant = nullptr);
StmtPtr seq(std::vector<StmtPtr> parts);
}  // namespace stmt

bool structurally_equal(const StmtPtr& a, const StmtPtr& b);
bool is_basic(const Stmt& s);
bool uses_alloc(const Stmt& s);
// variables assigned anywhere in s
std::set<std::string> assigned_variables(const Stmt& s);
// variables mentioned anywhere in s (conditions included)
std::set<std::string> program_variables(const Stmt& s);
// assignments outside loop bodies that target an already assigned variable
std::vector<std::string> ssa_warnings(const Stmt& s);

struct Triple {
    std::string name;
    NodePtr pre;
    StmtPtr program;
    NodePtr post;
};

struct Configuration {
    std::shared_ptr<const PreModel> heap;
    Assignment store;
    LocSet H = 0;
    LocSet U = 0;

    // store plus U
    Assignment assignment() const;
    bool same_as(const Configuration& o) const;
    std::string str() const;
};

enum class OutcomeKind { Final, Abort, Stuck };

struct Outcome {
    OutcomeKind kind = OutcomeKind::Final;
    Configuration config;
};

bool valid_config(const Configuration& c);
std::vector<Outcome> step(const Configuration& c, const Stmt& s);

struct RunOptions {
    int fuel = 32;
    std::vector<std::string>* trace = nullptr;
};

// all outcomes; throws FuelExhausted when a loop runs out of fuel
std::vector<Outcome> run(const Configuration& c, const StmtPtr& program, RunOptions opts = {});

// default value of a field after alloc
Value field_default(Sort s);

}  // namespace fl
