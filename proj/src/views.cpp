#include "ethica/views.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ethica/error.hpp"

namespace ethica {

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        fail(ErrorKind::Io, "SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

const Table& ContextualView::table(const std::string& label) const {
    for (const auto& [l, t] : tables)
        if (l == label) return t;
    fail(ErrorKind::Eval, "no table labeled '" + label + "' in the contextual view");
}

namespace {
std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
}  // namespace

std::vector<ViewBinding> parse_registry(const std::string& text, const Node& cdt) {
    std::vector<ViewBinding> registry;
    ViewBinding* current = nullptr;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::string at = "registry line " + std::to_string(lineno);

        if (line.rfind("view ", 0) == 0) {
            ViewBinding b;
            b.name = trim(line.substr(5));
            if (b.name.empty()) fail(ErrorKind::Parse, at + ": view without a name");
            registry.push_back(std::move(b));
            current = &registry.back();
        } else if (line.rfind("when ", 0) == 0 || line == "when") {
            if (!current) fail(ErrorKind::Parse, at + ": 'when' before any 'view'");
            current->pattern = parse_context(line == "when" ? "" : line.substr(5), cdt);
        } else if (line.rfind("def ", 0) == 0) {
            if (!current) fail(ErrorKind::Parse, at + ": 'def' before any 'view'");
            auto eq = line.find('=');
            if (eq == std::string::npos)
                fail(ErrorKind::Parse, at + ": expected 'def <label> = <expression>'");
            std::string label = trim(line.substr(4, eq - 4));
            if (label.empty()) fail(ErrorKind::Parse, at + ": empty label");
            for (const auto& [l, _] : current->named_exprs)
                if (l == label)
                    fail(ErrorKind::Parse, at + ": duplicate label '" + label + "'");
            current->named_exprs.emplace_back(label, parse_expr(line.substr(eq + 1)));
        } else {
            fail(ErrorKind::Parse, at + ": unknown directive");
        }
    }
    for (const auto& b : registry)
        if (b.named_exprs.empty())
            fail(ErrorKind::Parse, "view '" + b.name + "' defines no expressions");
    return registry;
}

namespace {

bool element_contained(const ContextElement& pattern, const Context& c) {
    const ContextElement* e = c.find(pattern.dimension_path);
    return e && e->value == pattern.value;
}

}  // namespace

const ViewBinding& match_binding(const std::vector<ViewBinding>& registry,
                                 const Context& c) {
    if (registry.empty()) fail(ErrorKind::Validation, "empty view registry");
    const ViewBinding* best = nullptr;
    std::size_t best_size = 0;
    for (const auto& b : registry) {
        bool contained = std::all_of(
            b.pattern.elements.begin(), b.pattern.elements.end(),
            [&](const ContextElement& e) { return element_contained(e, c); });
        if (!contained) continue;
        if (!best || b.pattern.elements.size() > best_size) {
            best = &b;
            best_size = b.pattern.elements.size();
        }
    }
    if (!best)
        fail(ErrorKind::Validation,
             "no view binding matches context '" + c.to_string() + "'");
    return *best;
}

ContextualView materialize(const Database& db, const ViewBinding& binding,
                           const Context& c) {
    ContextualView view;
    view.context = c;
    view.binding_name = binding.name;

    std::vector<std::string> bases;
    for (const auto& [label, expr] : binding.named_exprs) {
        view.tables.emplace_back(label, evaluate(db, *expr));
        for (const auto& t : referenced_tables(*expr)) bases.push_back(t);
    }
    std::sort(bases.begin(), bases.end());
    bases.erase(std::unique(bases.begin(), bases.end()), bases.end());

    std::string material;
    for (const auto& name : bases) {
        auto it = db.csv_paths.find(name);
        material += name;
        material += '\0';
        if (it != db.csv_paths.end()) {
            std::ifstream in(it->second, std::ios::binary);
            if (!in) fail(ErrorKind::Io, "cannot re-read '" + it->second + "'");
            std::ostringstream buf;
            buf << in.rdbuf();
            material += buf.str();
        } else {
            // in-memory table (tests): hash its canonical CSV form
            material += table_to_csv(db.table(name));
        }
        material += '\0';
    }
    view.source_hash = sha256_hex(material);
    return view;
}

}  // namespace ethica
