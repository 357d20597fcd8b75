#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fl/ast.hpp"
#include "fl/model.hpp"
#include "fl/psl.hpp"
#include "fl/whilelang.hpp"

namespace fl {

enum class FileMode { Logic, Separation };

// Contents of a .fl/.flp/.slf file: declarations, definitions, goals and triples.
struct ParsedFile {
    std::shared_ptr<Signature> sig;
    DefinitionSet defs;
    std::vector<NodePtr> goals;
    std::vector<Triple> triples;
    SLDefinitionSet sl_defs;
    std::vector<SLPtr> sl_goals;
};

FileMode mode_for_path(const std::string& path);

ParsedFile parse_file(const std::string& text, const std::string& filename = "",
                      FileMode mode = FileMode::Logic, const Signature* base = nullptr);
ParsedFile load_file(const std::string& path);

NodePtr parse_formula(const std::string& text, const Signature& sig, const DefinitionSet& defs = {});
NodePtr parse_term(const std::string& text, const Signature& sig, const DefinitionSet& defs = {});
DefinitionSet parse_defs(const std::string& text, Signature& sig);
StmtPtr parse_program(const std::string& text, const Signature& sig, const DefinitionSet& defs = {});
Triple parse_triple(const std::string& text, const Signature& sig, const DefinitionSet& defs = {});
SLPtr parse_sl(const std::string& text, const Signature& sig, const SLDefinitionSet& defs = {});
PreModel parse_model(const std::string& text, std::shared_ptr<const Signature> sig);

struct ConfigExtras {
    LocSet H = 0;
    LocSet U = 0;
    bool has_heap = false;
    bool has_free = false;
};
PreModel parse_model(const std::string& text, std::shared_ptr<const Signature> sig, ConfigExtras& extras);

std::string print(const NodePtr& n);
std::string print(const Definition& d);
std::string print(const DefinitionSet& defs);
std::string print(const StmtPtr& s, int indent = 0);
std::string print(const Triple& t);
std::string print(const SLPtr& s);
std::string print(const SLDefinition& d);
std::string print(const PreModel& m);
std::string print(const Signature& sig);
std::string print(const ParsedFile& f, FileMode mode = FileMode::Logic);

}  // namespace fl
