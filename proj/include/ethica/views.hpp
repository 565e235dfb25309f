#pragma once

#include <map>
#include <string>
#include <vector>

#include "ethica/relation.hpp"
#include "ethica/tree.hpp"

namespace ethica {

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

struct ViewBinding {
    std::string name;
    Context pattern;  // possibly partial; subset-match semantics
    std::vector<std::pair<std::string, RelExprPtr>> named_exprs;  // label order kept
};

struct ContextualView {
    Context context;
    std::string binding_name;
    std::vector<std::pair<std::string, Table>> tables;
    std::string source_hash;  // digest over the referenced base tables' CSV bytes

    const Table& table(const std::string& label) const;  // throws Eval
};

/// Parses the registry file: blocks of `view <name>`, `when <context>`,
/// repeated `def <label> = <expression>`. Patterns are validated against
/// the CDT.
std::vector<ViewBinding> parse_registry(const std::string& text, const Node& cdt);

/// The binding whose pattern elements are all contained in c, preferring
/// the one with the most elements; registry order breaks ties.
const ViewBinding& match_binding(const std::vector<ViewBinding>& registry,
                                 const Context& c);

/// Evaluates every labeled expression; source_hash covers the CSV bytes
/// of all referenced base tables, sorted by table name.
ContextualView materialize(const Database& db, const ViewBinding& binding,
                           const Context& c);

}  // namespace ethica
