#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ethica {

enum class NodeKind { Root, Dimension, Concept, Attribute };

/// One node of a CDT or ERT. Trees are immutable after parsing.
struct Node {
    NodeKind kind = NodeKind::Root;
    std::string name;  // lowercase identifier
    std::vector<std::shared_ptr<Node>> children;

    const Node* find_child(const std::string& name) const;
};

using NodePtr = std::shared_ptr<Node>;

/// Parses the indentation-based tree DSL (root/dim/val/attr, 2-space
/// indents, `#` comments) and validates the node-taxonomy invariants:
/// dimensions under the root, concepts (or a single attribute shorthand)
/// under dimensions, dimensions/attributes under concepts, unique sibling
/// names, attribute nodes as leaves.
NodePtr parse_tree(const std::string& text);

/// Re-renders a tree in the DSL; parse_tree(serialize_tree(t)) is
/// structurally equal to t.
std::string serialize_tree(const Node& root);

bool trees_equal(const Node& a, const Node& b);

/// One `dimension = value` element of a context.
struct ContextElement {
    std::vector<std::string> dimension_path;  // names root -> dimension
    std::string value;                        // concept name or attribute literal
    std::map<std::string, std::string> attribute_bindings;

    std::string dimension_name() const { return dimension_path.back(); }
    std::string dotted_path() const;
};

struct Context {
    std::vector<ContextElement> elements;

    bool empty() const { return elements.empty(); }
    const ContextElement* find(const std::vector<std::string>& dimension_path) const;
    /// Value bound to the (unique) dimension with this leaf name, if any.
    const ContextElement* find_by_name(const std::string& dimension_name) const;
    std::string to_string() const;
};

/// Parses `dim=value; dim=value(attr=literal); ...` against a CDT.
/// Dimensions may be named bare (when unambiguous) or by dotted path.
/// Enforces mutual exclusivity of sibling concepts and parent-concept
/// consistency for subdimensions.
Context parse_context(const std::string& text, const Node& tree);

struct EthicalRequirement {
    std::vector<std::string> facet_path;           // e.g. {"fairness","equity"}
    std::vector<std::string> affected_attributes;  // input schema column names

    std::string facet_dotted() const;
};

/// Resolves a dotted facet path (e.g. "fairness.equity") against the ERT
/// and pairs it with the affected attributes. The facet must be a leaf
/// concept: one with no further concept specializations.
EthicalRequirement make_requirement(const std::string& facet,
                                    const std::vector<std::string>& affected,
                                    const Node& ert);

struct EthicalContext {
    Context context;
    EthicalRequirement requirement;
};

EthicalContext combine(Context context, EthicalRequirement requirement);

}  // namespace ethica
