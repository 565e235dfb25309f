#include "ethica/tree.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ethica/error.hpp"

namespace ethica {

namespace {

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

const char* kind_keyword(NodeKind k) {
    switch (k) {
        case NodeKind::Root: return "root";
        case NodeKind::Dimension: return "dim";
        case NodeKind::Concept: return "val";
        default: return "attr";
    }
}

void validate_node(const Node& node, int line_hint) {
    std::vector<std::string> seen;
    for (const auto& child : node.children) {
        if (std::find(seen.begin(), seen.end(), child->name) != seen.end())
            fail(ErrorKind::Validation,
                 "duplicate sibling name '" + child->name + "' under '" + node.name + "'");
        seen.push_back(child->name);
    }
    switch (node.kind) {
        case NodeKind::Root:
            for (const auto& c : node.children)
                if (c->kind != NodeKind::Dimension)
                    fail(ErrorKind::Validation,
                         "child '" + c->name + "' of root must be a dimension, got " +
                             kind_keyword(c->kind));
            break;
        case NodeKind::Dimension: {
            bool has_attr = false;
            for (const auto& c : node.children) {
                if (c->kind == NodeKind::Attribute)
                    has_attr = true;
                else if (c->kind != NodeKind::Concept)
                    fail(ErrorKind::Validation,
                         "child '" + c->name + "' of dimension '" + node.name +
                             "' must be a concept");
            }
            // The single-attribute child is the value shorthand form.
            if (has_attr && node.children.size() != 1)
                fail(ErrorKind::Validation,
                     "dimension '" + node.name +
                         "' mixes an attribute shorthand with other children");
            break;
        }
        case NodeKind::Concept:
            for (const auto& c : node.children)
                if (c->kind != NodeKind::Dimension && c->kind != NodeKind::Attribute)
                    fail(ErrorKind::Validation,
                         "child '" + c->name + "' of concept '" + node.name +
                             "' must be a dimension or attribute");
            break;
        case NodeKind::Attribute:
            if (!node.children.empty())
                fail(ErrorKind::Validation, "attribute '" + node.name +
                                                "' must be a leaf (line " +
                                                std::to_string(line_hint) + ")");
            break;
    }
    for (const auto& c : node.children) validate_node(*c, line_hint);
}

struct PathEntry {
    const Node* node;
    const Node* parent;
};

void index_tree(const Node& node, const Node* parent,
                std::vector<std::string>& path,
                std::map<const Node*, const Node*>& parents,
                std::map<const Node*, std::vector<std::string>>& paths) {
    parents[&node] = parent;
    if (node.kind != NodeKind::Root) path.push_back(node.name);
    paths[&node] = path;
    for (const auto& c : node.children) index_tree(*c, &node, path, parents, paths);
    if (node.kind != NodeKind::Root) path.pop_back();
}

void collect_dimensions(const Node& node, std::vector<const Node*>& out) {
    if (node.kind == NodeKind::Dimension) out.push_back(&node);
    for (const auto& c : node.children) collect_dimensions(*c, out);
}

}  // namespace

const Node* Node::find_child(const std::string& name) const {
    for (const auto& c : children)
        if (c->name == name) return c.get();
    return nullptr;
}

NodePtr parse_tree(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    NodePtr root;
    std::vector<NodePtr> stack;  // stack[d] = last node at depth d

    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;

        std::size_t indent = line.find_first_not_of(' ');
        if (line[indent] == '\t')
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": tabs not allowed");
        if (indent % 2 != 0)
            fail(ErrorKind::Parse,
                 "line " + std::to_string(lineno) + ": indent must be a multiple of 2");
        std::size_t depth = indent / 2;

        std::istringstream fields(stripped);
        std::string keyword, name, extra;
        fields >> keyword >> name;
        if (fields >> extra)
            fail(ErrorKind::Parse,
                 "line " + std::to_string(lineno) + ": trailing content '" + extra + "'");
        name = to_lower(name);
        if (!is_identifier(name))
            fail(ErrorKind::Parse,
                 "line " + std::to_string(lineno) + ": invalid name '" + name + "'");

        NodeKind kind;
        if (keyword == "root") kind = NodeKind::Root;
        else if (keyword == "dim") kind = NodeKind::Dimension;
        else if (keyword == "val") kind = NodeKind::Concept;
        else if (keyword == "attr") kind = NodeKind::Attribute;
        else
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) +
                                       ": unknown keyword '" + keyword + "'");

        auto node = std::make_shared<Node>();
        node->kind = kind;
        node->name = name;

        if (kind == NodeKind::Root) {
            if (root)
                fail(ErrorKind::Parse,
                     "line " + std::to_string(lineno) + ": second root node");
            if (depth != 0)
                fail(ErrorKind::Parse,
                     "line " + std::to_string(lineno) + ": root must not be indented");
            root = node;
            stack = {node};
            continue;
        }
        if (!root)
            fail(ErrorKind::Parse,
                 "line " + std::to_string(lineno) + ": node before root");
        if (depth == 0 || depth > stack.size())
            fail(ErrorKind::Parse,
                 "line " + std::to_string(lineno) + ": bad indentation depth");
        stack.resize(depth);
        stack.back()->children.push_back(node);
        stack.push_back(node);
    }

    if (!root) fail(ErrorKind::Parse, "empty tree: no root node");
    validate_node(*root, 0);
    return root;
}

namespace {
void serialize_node(const Node& node, int depth, std::string& out) {
    out.append(depth * 2, ' ');
    out += kind_keyword(node.kind);
    out += ' ';
    out += node.name;
    out += '\n';
    for (const auto& c : node.children) serialize_node(*c, depth + 1, out);
}
}  // namespace

std::string serialize_tree(const Node& root) {
    std::string out;
    serialize_node(root, 0, out);
    return out;
}

bool trees_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.name != b.name || a.children.size() != b.children.size())
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!trees_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

std::string ContextElement::dotted_path() const {
    std::string out;
    for (const auto& p : dimension_path) {
        if (!out.empty()) out += '.';
        out += p;
    }
    return out;
}

const ContextElement* Context::find(const std::vector<std::string>& dimension_path) const {
    for (const auto& e : elements)
        if (e.dimension_path == dimension_path) return &e;
    return nullptr;
}

const ContextElement* Context::find_by_name(const std::string& dimension_name) const {
    for (const auto& e : elements)
        if (e.dimension_name() == dimension_name) return &e;
    return nullptr;
}

std::string Context::to_string() const {
    std::string out;
    for (const auto& e : elements) {
        if (!out.empty()) out += "; ";
        out += e.dotted_path() + "=" + e.value;
        if (!e.attribute_bindings.empty()) {
            out += '(';
            bool first = true;
            for (const auto& [k, v] : e.attribute_bindings) {
                if (!first) out += ", ";
                first = false;
                out += k + "=" + v;
            }
            out += ')';
        }
    }
    return out;
}

Context parse_context(const std::string& text, const Node& tree) {
    std::map<const Node*, const Node*> parents;
    std::map<const Node*, std::vector<std::string>> paths;
    std::vector<std::string> scratch;
    index_tree(tree, nullptr, scratch, parents, paths);

    std::vector<const Node*> dimensions;
    collect_dimensions(tree, dimensions);

    Context ctx;
    std::vector<const Node*> bound_dims;

    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ';')) {
        part = trim(part);
        if (part.empty()) continue;

        auto eq = part.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::Parse, "context element '" + part + "' lacks '='");
        std::string dim_spec = to_lower(trim(part.substr(0, eq)));
        std::string rhs = trim(part.substr(eq + 1));

        // Optional attribute bindings: value(name=literal, ...)
        std::map<std::string, std::string> attr_bindings;
        std::string value = rhs;
        auto paren = rhs.find('(');
        if (paren != std::string::npos) {
            if (rhs.back() != ')')
                fail(ErrorKind::Parse, "unterminated attribute bindings in '" + part + "'");
            value = trim(rhs.substr(0, paren));
            std::string inner = rhs.substr(paren + 1, rhs.size() - paren - 2);
            std::istringstream bindings(inner);
            std::string binding;
            while (std::getline(bindings, binding, ',')) {
                binding = trim(binding);
                if (binding.empty()) continue;
                auto beq = binding.find('=');
                if (beq == std::string::npos)
                    fail(ErrorKind::Parse, "attribute binding '" + binding + "' lacks '='");
                attr_bindings[to_lower(trim(binding.substr(0, beq)))] =
                    trim(binding.substr(beq + 1));
            }
        }
        value = to_lower(value);

        // Resolve the dimension: bare leaf name, or dotted path suffix.
        std::vector<std::string> components;
        {
            std::istringstream cs(dim_spec);
            std::string c;
            while (std::getline(cs, c, '.')) components.push_back(trim(c));
        }
        if (components.empty())
            fail(ErrorKind::Parse, "empty dimension name in '" + part + "'");

        std::vector<const Node*> matches;
        for (const Node* d : dimensions) {
            const auto& full = paths.at(d);
            if (full.size() < components.size()) continue;
            if (std::equal(components.rbegin(), components.rend(), full.rbegin()))
                matches.push_back(d);
        }
        if (matches.empty())
            fail(ErrorKind::Validation, "unknown dimension '" + dim_spec + "'");
        if (matches.size() > 1)
            fail(ErrorKind::Validation,
                 "ambiguous dimension '" + dim_spec + "'; use a dotted path");
        const Node* dim = matches.front();

        if (std::find(bound_dims.begin(), bound_dims.end(), dim) != bound_dims.end())
            fail(ErrorKind::Validation,
                 "dimension '" + dim_spec +
                     "' bound twice; sibling concepts are mutually exclusive");
        bound_dims.push_back(dim);

        ContextElement elem;
        elem.dimension_path = paths.at(dim);
        elem.attribute_bindings = attr_bindings;

        // Shorthand form: the dimension's single attribute child takes a literal.
        if (dim->children.size() == 1 && dim->children[0]->kind == NodeKind::Attribute) {
            elem.value = value;
        } else {
            const Node* concept_node = dim->find_child(value);
            if (!concept_node || concept_node->kind != NodeKind::Concept)
                fail(ErrorKind::Validation, "unknown value '" + value +
                                                "' for dimension '" + dim_spec + "'");
            elem.value = value;
            for (const auto& c : concept_node->children) {
                if (c->kind == NodeKind::Attribute &&
                    attr_bindings.find(c->name) == attr_bindings.end())
                    fail(ErrorKind::Validation,
                         "missing attribute binding '" + c->name + "' for value '" +
                             value + "'");
            }
            for (const auto& [k, v] : attr_bindings)
                if (!concept_node->find_child(k))
                    fail(ErrorKind::Validation,
                         "value '" + value + "' has no attribute '" + k + "'");
        }
        ctx.elements.push_back(std::move(elem));
    }

    // A bound subdimension needs its parent concept bound to the same value.
    for (const Node* dim : bound_dims) {
        const Node* parent = parents.at(dim);
        if (!parent || parent->kind != NodeKind::Concept) continue;
        const Node* parent_dim = parents.at(parent);
        const ContextElement* parent_elem = ctx.find(paths.at(parent_dim));
        if (!parent_elem || parent_elem->value != parent->name)
            fail(ErrorKind::Validation,
                 "subdimension '" + dim->name + "' requires '" +
                     parent_dim->name + "=" + parent->name + "' in the context");
    }
    return ctx;
}

namespace {

// True when the concept has no further concept specializations below it.
bool is_leaf_facet(const Node& concept_node) {
    for (const auto& sub : concept_node.children)
        if (sub->kind == NodeKind::Dimension)
            for (const auto& v : sub->children)
                if (v->kind == NodeKind::Concept) return false;
    return true;
}

// Finds concept chains matching the dotted components, skipping the
// dimension levels between consecutive concepts.
void find_facet(const Node& node, const std::vector<std::string>& components,
                std::size_t next, std::vector<const Node*>& found) {
    if (next == components.size()) return;
    for (const auto& child : node.children) {
        if (child->kind == NodeKind::Dimension) {
            find_facet(*child, components, next, found);
        } else if (child->kind == NodeKind::Concept && node.kind == NodeKind::Dimension) {
            if (child->name == components[next]) {
                if (next + 1 == components.size())
                    found.push_back(child.get());
                else
                    find_facet(*child, components, next + 1, found);
            } else if (next == 0) {
                find_facet(*child, components, 0, found);
            }
        }
    }
}

}  // namespace

std::string EthicalRequirement::facet_dotted() const {
    std::string out;
    for (const auto& p : facet_path) {
        if (!out.empty()) out += '.';
        out += p;
    }
    return out;
}

EthicalRequirement make_requirement(const std::string& facet,
                                    const std::vector<std::string>& affected,
                                    const Node& ert) {
    std::vector<std::string> components;
    std::istringstream cs(to_lower(trim(facet)));
    std::string c;
    while (std::getline(cs, c, '.')) components.push_back(trim(c));
    if (components.empty())
        fail(ErrorKind::Validation, "empty ethical facet path");

    std::vector<const Node*> found;
    find_facet(ert, components, 0, found);
    if (found.empty())
        fail(ErrorKind::Validation, "facet '" + facet + "' not found in the ERT");
    if (found.size() > 1)
        fail(ErrorKind::Validation, "facet '" + facet + "' is ambiguous in the ERT");
    if (!is_leaf_facet(*found.front()))
        fail(ErrorKind::Validation,
             "facet '" + facet + "' has specializations; pick a leaf facet");
    if (affected.empty())
        fail(ErrorKind::Validation,
             "facet '" + facet + "' requires at least one affected attribute");

    EthicalRequirement req;
    req.facet_path = components;
    req.affected_attributes = affected;
    return req;
}

EthicalContext combine(Context context, EthicalRequirement requirement) {
    return EthicalContext{std::move(context), std::move(requirement)};
}

}  // namespace ethica
