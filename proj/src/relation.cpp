#include "ethica/relation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "ethica/error.hpp"

namespace ethica {

ColumnType column_type_from_string(const std::string& name) {
    if (name == "text") return ColumnType::Text;
    if (name == "integer") return ColumnType::Integer;
    if (name == "decimal") return ColumnType::Decimal;
    if (name == "boolean") return ColumnType::Boolean;
    if (name == "date") return ColumnType::Date;
    fail(ErrorKind::Parse, "unknown column type '" + name + "'");
}

std::string column_type_to_string(ColumnType t) {
    switch (t) {
        case ColumnType::Text: return "text";
        case ColumnType::Integer: return "integer";
        case ColumnType::Decimal: return "decimal";
        case ColumnType::Boolean: return "boolean";
        default: return "date";
    }
}

std::optional<std::size_t> Schema::index_of(const std::string& column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == column) return i;
    return std::nullopt;
}

namespace {
std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}
}  // namespace

std::optional<std::size_t> Schema::index_of_ci(const std::string& column) const {
    std::string want = lower(column);
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (lower(columns[i].name) == want) return i;
    return std::nullopt;
}

std::size_t Table::column_index(const std::string& column) const {
    if (auto i = schema.index_of(column)) return *i;
    if (auto i = schema.index_of_ci(column)) return *i;
    fail(ErrorKind::Eval, "unknown column '" + column + "' in table '" + name + "'");
}

const Table& Database::table(const std::string& name) const {
    auto it = tables.find(name);
    if (it == tables.end()) fail(ErrorKind::Eval, "unknown table '" + name + "'");
    return it->second;
}

// --- CSV -------------------------------------------------------------------

std::vector<std::vector<std::optional<std::string>>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::optional<std::string>>> rows;
    std::vector<std::optional<std::string>> row;
    std::string field;
    bool quoted = false;     // current field was quoted
    bool in_quotes = false;  // currently inside quotes
    bool field_open = false;

    auto end_field = [&] {
        if (!quoted && field == "\\N")
            row.push_back(std::nullopt);
        else
            row.push_back(field);
        field.clear();
        quoted = false;
        field_open = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty() && !quoted) {
            in_quotes = true;
            quoted = true;
            field_open = true;
        } else if (c == ',') {
            end_field();
            field_open = true;
        } else if (c == '\n') {
            if (row.empty() && field.empty() && !field_open) {
                // blank line
            } else {
                end_row();
            }
        } else if (c == '\r') {
            // swallowed; \r\n ends the row at the \n
            if (i + 1 >= text.size() || text[i + 1] != '\n') end_row();
        } else {
            field.push_back(c);
            field_open = true;
        }
        ++i;
    }
    if (in_quotes) fail(ErrorKind::Parse, "CSV ends inside a quoted field");
    if (field_open || !field.empty() || !row.empty()) end_row();
    return rows;
}

namespace {

std::string csv_escape(const std::string& s, bool is_text) {
    bool needs_quotes = s.find_first_of(",\"\n\r") != std::string::npos ||
                        (is_text && s == "\\N");
    if (!needs_quotes) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

}  // namespace

std::string table_to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.schema.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(t.schema.columns[i].name, true);
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (is_null(row[i]))
                out += "\\N";
            else
                out += csv_escape(value_to_string(row[i]),
                                  std::holds_alternative<std::string>(row[i]));
        }
        out += '\n';
    }
    return out;
}

void write_table_csv(const Table& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
    out << table_to_csv(t);
    if (!out) fail(ErrorKind::Io, "write failed: '" + path + "'");
}

Value coerce_value(const std::optional<std::string>& raw, ColumnType type,
                   const std::string& where) {
    if (!raw) return std::monostate{};
    const std::string& s = *raw;
    switch (type) {
        case ColumnType::Text:
            return s;
        case ColumnType::Integer: {
            try {
                std::size_t pos = 0;
                std::int64_t v = std::stoll(s, &pos);
                if (pos == s.size()) return v;
            } catch (...) {
            }
            fail(ErrorKind::Parse, where + ": not an integer: '" + s + "'");
        }
        case ColumnType::Decimal: {
            if (auto d = Decimal::try_parse(s)) return *d;
            fail(ErrorKind::Parse, where + ": not a decimal: '" + s + "'");
        }
        case ColumnType::Boolean: {
            std::string l = lower(s);
            if (l == "true" || l == "1") return true;
            if (l == "false" || l == "0") return false;
            fail(ErrorKind::Parse, where + ": not a boolean: '" + s + "'");
        }
        case ColumnType::Date: {
            bool ok = s.size() == 10 && s[4] == '-' && s[7] == '-';
            for (std::size_t i = 0; ok && i < s.size(); ++i)
                if (i != 4 && i != 7) ok = std::isdigit(static_cast<unsigned char>(s[i]));
            if (!ok) fail(ErrorKind::Parse, where + ": not an ISO date: '" + s + "'");
            return s;  // ISO-8601, lexicographic compare is chronological
        }
    }
    fail(ErrorKind::Parse, where + ": unhandled type");
}

// --- Manifest / database loading --------------------------------------------

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void check_keys(const Table& t) {
    if (t.schema.key.empty()) return;
    std::vector<std::size_t> key_idx;
    for (const auto& k : t.schema.key) {
        auto i = t.schema.index_of(k);
        if (!i) fail(ErrorKind::Parse, "table '" + t.name + "': key column '" + k +
                                           "' not declared");
        key_idx.push_back(*i);
    }
    std::set<std::string> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::string key;
        for (auto i : key_idx) key += value_to_string(t.rows[r][i]) + "\x1f";
        if (!seen.insert(key).second)
            fail(ErrorKind::Validation,
                 "table '" + t.name + "': duplicate key at data row " +
                     std::to_string(r + 1));
    }
}

}  // namespace

Database load_database(const std::string& directory, const std::string& manifest_path) {
    std::string manifest = read_file(manifest_path);

    Database db;
    Table* current = nullptr;
    std::map<std::string, std::string> files;

    std::istringstream in(manifest);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string keyword;
        fields >> keyword;
        std::string at = "manifest line " + std::to_string(lineno);
        if (keyword == "table") {
            std::string name, kw_file, file;
            fields >> name >> kw_file >> file;
            if (name.empty() || kw_file != "file" || file.empty())
                fail(ErrorKind::Parse, at + ": expected 'table <name> file <csv>'");
            if (db.tables.count(name))
                fail(ErrorKind::Parse, at + ": duplicate table '" + name + "'");
            Table t;
            t.name = name;
            current = &db.tables.emplace(name, std::move(t)).first->second;
            files[name] = file;
        } else if (keyword == "col") {
            if (!current) fail(ErrorKind::Parse, at + ": 'col' before any 'table'");
            std::string name, type;
            fields >> name >> type;
            if (current->schema.index_of(name))
                fail(ErrorKind::Parse, at + ": duplicate column '" + name + "'");
            current->schema.columns.push_back({name, column_type_from_string(type)});
        } else if (keyword == "key") {
            if (!current) fail(ErrorKind::Parse, at + ": 'key' before any 'table'");
            std::string rest;
            std::getline(fields, rest);
            std::istringstream keys(rest);
            std::string k;
            while (std::getline(keys, k, ',')) {
                k = trim(k);
                if (!k.empty()) current->schema.key.push_back(k);
            }
        } else {
            fail(ErrorKind::Parse, at + ": unknown keyword '" + keyword + "'");
        }
    }

    for (auto& [name, table] : db.tables) {
        std::string path = directory + "/" + files[name];
        db.csv_paths[name] = path;
        auto rows = parse_csv(read_file(path));
        if (rows.empty())
            fail(ErrorKind::Parse, path + ": missing header row");
        const auto& header = rows.front();
        if (header.size() != table.schema.columns.size())
            fail(ErrorKind::Parse, path + ": header has " +
                                       std::to_string(header.size()) +
                                       " columns, manifest declares " +
                                       std::to_string(table.schema.columns.size()));
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (!header[i] || *header[i] != table.schema.columns[i].name)
                fail(ErrorKind::Parse, path + ": header column " + std::to_string(i + 1) +
                                           " is '" + header[i].value_or("\\N") +
                                           "', manifest declares '" +
                                           table.schema.columns[i].name + "'");
        }
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].size() != table.schema.columns.size())
                fail(ErrorKind::Parse, path + ": row " + std::to_string(r) + " has " +
                                           std::to_string(rows[r].size()) + " fields");
            Row row;
            for (std::size_t c = 0; c < rows[r].size(); ++c) {
                std::string where = path + " row " + std::to_string(r) + " column " +
                                    table.schema.columns[c].name;
                row.push_back(coerce_value(rows[r][c], table.schema.columns[c].type, where));
            }
            table.rows.push_back(std::move(row));
        }
        check_keys(table);
    }
    return db;
}

// --- Expression parsing ------------------------------------------------------

namespace {

struct Token {
    enum class Kind { Name, String, Number, Punct, End };
    Kind kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token next() {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorKind::Parse,
             "expression error at position " + std::to_string(current_.pos) + ": " + msg);
    }

private:
    void advance() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        current_.pos = pos_;
        if (pos_ >= text_.size()) {
            current_ = {Token::Kind::End, "", pos_};
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_'))
                ++pos_;
            current_ = {Token::Kind::Name, text_.substr(start, pos_ - start), start};
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '-' && pos_ + 1 < text_.size() &&
                    std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            std::size_t start = pos_;
            ++pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '.'))
                ++pos_;
            current_ = {Token::Kind::Number, text_.substr(start, pos_ - start), start};
        } else if (c == '"') {
            std::size_t start = pos_++;
            std::string s;
            while (pos_ < text_.size() && text_[pos_] != '"') s.push_back(text_[pos_++]);
            if (pos_ >= text_.size())
                fail(ErrorKind::Parse, "expression error at position " +
                                           std::to_string(start) +
                                           ": unterminated string literal");
            ++pos_;
            current_ = {Token::Kind::String, s, start};
        } else {
            std::size_t start = pos_;
            std::string p(1, c);
            ++pos_;
            if ((c == '<' || c == '>' || c == '!') && pos_ < text_.size() &&
                text_[pos_] == '=') {
                p.push_back('=');
                ++pos_;
            } else if (c == '<' && pos_ < text_.size() && text_[pos_] == '>') {
                p = "!=";
                ++pos_;
            }
            current_ = {Token::Kind::Punct, p, start};
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    Token current_{Token::Kind::End, "", 0};
};

class ExprParser {
public:
    explicit ExprParser(const std::string& text) : lex_(text) {}

    RelExprPtr parse() {
        auto e = parse_expr();
        if (lex_.peek().kind != Token::Kind::End)
            lex_.error("trailing input '" + lex_.peek().text + "'");
        return e;
    }

private:
    void expect_punct(const std::string& p) {
        if (lex_.peek().kind != Token::Kind::Punct || lex_.peek().text != p)
            lex_.error("expected '" + p + "'");
        lex_.next();
    }

    std::string expect_name() {
        if (lex_.peek().kind != Token::Kind::Name) lex_.error("expected a name");
        return lex_.next().text;
    }

    RelExprPtr parse_expr() {
        std::string name = expect_name();
        auto e = std::make_shared<RelExpr>();
        if (name == "select") {
            expect_punct("(");
            e->kind = RelExpr::Kind::Select;
            e->left = parse_expr();
            expect_punct(",");
            e->predicate = parse_or();
            expect_punct(")");
        } else if (name == "join") {
            expect_punct("(");
            e->kind = RelExpr::Kind::NaturalJoin;
            e->left = parse_expr();
            expect_punct(",");
            e->right = parse_expr();
            expect_punct(")");
        } else if (name == "project" || name == "group") {
            expect_punct("(");
            e->kind = name == "project" ? RelExpr::Kind::Project
                                        : RelExpr::Kind::GroupCount;
            e->left = parse_expr();
            expect_punct(",");
            e->columns.push_back(expect_name());
            while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ",") {
                lex_.next();
                e->columns.push_back(expect_name());
            }
            expect_punct(")");
        } else {
            e->kind = RelExpr::Kind::Base;
            e->table = name;
        }
        return e;
    }

    static bool is_keyword(const Token& t, const char* kw) {
        return t.kind == Token::Kind::Name && lower(t.text) == kw;
    }

    PredicatePtr parse_or() {
        auto left = parse_and();
        while (is_keyword(lex_.peek(), "or")) {
            lex_.next();
            auto p = std::make_shared<Predicate>();
            p->kind = Predicate::Kind::Or;
            p->left = left;
            p->right = parse_and();
            left = p;
        }
        return left;
    }

    PredicatePtr parse_and() {
        auto left = parse_not();
        while (is_keyword(lex_.peek(), "and")) {
            lex_.next();
            auto p = std::make_shared<Predicate>();
            p->kind = Predicate::Kind::And;
            p->left = left;
            p->right = parse_not();
            left = p;
        }
        return left;
    }

    PredicatePtr parse_not() {
        if (is_keyword(lex_.peek(), "not")) {
            lex_.next();
            auto p = std::make_shared<Predicate>();
            p->kind = Predicate::Kind::Not;
            p->left = parse_not();
            return p;
        }
        if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "(") {
            lex_.next();
            auto p = parse_or();
            expect_punct(")");
            return p;
        }
        return parse_compare();
    }

    PredicatePtr parse_compare() {
        auto p = std::make_shared<Predicate>();
        p->kind = Predicate::Kind::Compare;
        p->column = expect_name();
        if (lex_.peek().kind != Token::Kind::Punct) lex_.error("expected an operator");
        std::string op = lex_.next().text;
        if (op == "=") p->op = CompareOp::Eq;
        else if (op == "!=") p->op = CompareOp::Ne;
        else if (op == "<") p->op = CompareOp::Lt;
        else if (op == "<=") p->op = CompareOp::Le;
        else if (op == ">") p->op = CompareOp::Gt;
        else if (op == ">=") p->op = CompareOp::Ge;
        else lex_.error("unknown operator '" + op + "'");

        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::String) {
            p->literal = lex_.next().text;
        } else if (t.kind == Token::Kind::Number) {
            std::string num = lex_.next().text;
            if (num.find('.') == std::string::npos)
                p->literal = static_cast<std::int64_t>(std::stoll(num));
            else
                p->literal = Decimal::parse(num);
        } else if (is_keyword(t, "true")) {
            lex_.next();
            p->literal = true;
        } else if (is_keyword(t, "false")) {
            lex_.next();
            p->literal = false;
        } else {
            lex_.error("expected a literal");
        }
        return p;
    }

    Lexer lex_;
};

std::string predicate_to_string(const Predicate& p) {
    switch (p.kind) {
        case Predicate::Kind::Compare: {
            const char* op = "=";
            switch (p.op) {
                case CompareOp::Eq: op = "="; break;
                case CompareOp::Ne: op = "!="; break;
                case CompareOp::Lt: op = "<"; break;
                case CompareOp::Le: op = "<="; break;
                case CompareOp::Gt: op = ">"; break;
                case CompareOp::Ge: op = ">="; break;
            }
            std::string lit = std::holds_alternative<std::string>(p.literal)
                                  ? "\"" + std::get<std::string>(p.literal) + "\""
                                  : value_to_string(p.literal);
            return p.column + " " + op + " " + lit;
        }
        case Predicate::Kind::And:
            return "(" + predicate_to_string(*p.left) + " AND " +
                   predicate_to_string(*p.right) + ")";
        case Predicate::Kind::Or:
            return "(" + predicate_to_string(*p.left) + " OR " +
                   predicate_to_string(*p.right) + ")";
        default:
            return "NOT (" + predicate_to_string(*p.left) + ")";
    }
}

bool eval_compare(const Value& cell, CompareOp op, const Value& literal) {
    if (is_null(cell) || is_null(literal)) return false;
    bool numeric_cell = std::holds_alternative<std::int64_t>(cell) ||
                        std::holds_alternative<Decimal>(cell);
    bool numeric_lit = std::holds_alternative<std::int64_t>(literal) ||
                       std::holds_alternative<Decimal>(literal);
    if (cell.index() != literal.index() && !(numeric_cell && numeric_lit))
        fail(ErrorKind::Eval, "type mismatch in predicate: cannot compare " +
                                  value_to_string(cell) + " with " +
                                  value_to_string(literal));
    int c = compare_values(cell, literal);
    switch (op) {
        case CompareOp::Eq: return c == 0;
        case CompareOp::Ne: return c != 0;
        case CompareOp::Lt: return c < 0;
        case CompareOp::Le: return c <= 0;
        case CompareOp::Gt: return c > 0;
        default: return c >= 0;
    }
}

bool eval_predicate(const Predicate& p, const Table& t, const Row& row) {
    switch (p.kind) {
        case Predicate::Kind::Compare:
            return eval_compare(row[t.column_index(p.column)], p.op, p.literal);
        case Predicate::Kind::And:
            return eval_predicate(*p.left, t, row) && eval_predicate(*p.right, t, row);
        case Predicate::Kind::Or:
            return eval_predicate(*p.left, t, row) || eval_predicate(*p.right, t, row);
        default:
            return !eval_predicate(*p.left, t, row);
    }
}

}  // namespace

RelExprPtr parse_expr(const std::string& text) { return ExprParser(text).parse(); }

std::string expr_to_string(const RelExpr& e) {
    switch (e.kind) {
        case RelExpr::Kind::Base:
            return e.table;
        case RelExpr::Kind::Select:
            return "select(" + expr_to_string(*e.left) + ", " +
                   predicate_to_string(*e.predicate) + ")";
        case RelExpr::Kind::NaturalJoin:
            return "join(" + expr_to_string(*e.left) + ", " + expr_to_string(*e.right) +
                   ")";
        case RelExpr::Kind::Project:
        case RelExpr::Kind::GroupCount: {
            std::string out =
                e.kind == RelExpr::Kind::Project ? "project(" : "group(";
            out += expr_to_string(*e.left);
            for (const auto& c : e.columns) out += ", " + c;
            return out + ")";
        }
    }
    return "";
}

namespace {

Table eval_join(Table left, Table right) {
    std::vector<std::size_t> shared_l, shared_r, only_l, only_r;
    for (std::size_t i = 0; i < left.schema.columns.size(); ++i) {
        auto j = right.schema.index_of(left.schema.columns[i].name);
        if (j) {
            shared_l.push_back(i);
            shared_r.push_back(*j);
        } else {
            only_l.push_back(i);
        }
    }
    for (std::size_t j = 0; j < right.schema.columns.size(); ++j)
        if (!left.schema.index_of(right.schema.columns[j].name)) only_r.push_back(j);
    if (shared_l.empty())
        fail(ErrorKind::Eval, "natural join with no shared columns");

    Table out;
    out.name = "join";
    for (auto i : shared_l) out.schema.columns.push_back(left.schema.columns[i]);
    for (auto i : only_l) out.schema.columns.push_back(left.schema.columns[i]);
    for (auto j : only_r) out.schema.columns.push_back(right.schema.columns[j]);

    for (const auto& lr : left.rows) {
        for (const auto& rr : right.rows) {
            bool match = true;
            for (std::size_t k = 0; k < shared_l.size() && match; ++k) {
                const Value& a = lr[shared_l[k]];
                const Value& b = rr[shared_r[k]];
                // nulls never join
                match = !is_null(a) && !is_null(b) && compare_values(a, b) == 0;
            }
            if (!match) continue;
            Row row;
            for (auto i : shared_l) row.push_back(lr[i]);
            for (auto i : only_l) row.push_back(lr[i]);
            for (auto j : only_r) row.push_back(rr[j]);
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

Table eval_group(const Table& child, const std::vector<std::string>& columns) {
    std::vector<std::size_t> idx;
    for (const auto& c : columns) {
        idx.push_back(child.column_index(c));
        if (child.schema.columns[idx.back()].name == "count")
            fail(ErrorKind::Eval,
                 "grouping by a column named 'count' collides with the count output");
    }

    Table out;
    out.name = "group";
    for (auto i : idx) out.schema.columns.push_back(child.schema.columns[i]);
    out.schema.columns.push_back({"count", ColumnType::Integer});

    std::vector<Row> keys;  // first-appearance order
    std::vector<std::int64_t> counts;
    for (const auto& row : child.rows) {
        Row key;
        for (auto i : idx) key.push_back(row[i]);
        bool found = false;
        for (std::size_t k = 0; k < keys.size() && !found; ++k) {
            bool eq = true;
            for (std::size_t c = 0; c < key.size() && eq; ++c)
                eq = compare_values(keys[k][c], key[c]) == 0 &&
                     keys[k][c].index() == key[c].index();
            if (eq) {
                ++counts[k];
                found = true;
            }
        }
        if (!found) {
            keys.push_back(std::move(key));
            counts.push_back(1);
        }
    }
    for (std::size_t k = 0; k < keys.size(); ++k) {
        Row row = keys[k];
        row.push_back(counts[k]);
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace

Table evaluate(const Database& db, const RelExpr& expr) {
    switch (expr.kind) {
        case RelExpr::Kind::Base:
            return db.table(expr.table);
        case RelExpr::Kind::Select: {
            Table child = evaluate(db, *expr.left);
            Table out;
            out.name = "select";
            out.schema = child.schema;
            for (const auto& row : child.rows)
                if (eval_predicate(*expr.predicate, child, row)) out.rows.push_back(row);
            return out;
        }
        case RelExpr::Kind::NaturalJoin:
            return eval_join(evaluate(db, *expr.left), evaluate(db, *expr.right));
        case RelExpr::Kind::Project: {
            Table child = evaluate(db, *expr.left);
            std::vector<std::size_t> idx;
            for (const auto& c : expr.columns) idx.push_back(child.column_index(c));
            Table out;
            out.name = "project";
            for (auto i : idx) out.schema.columns.push_back(child.schema.columns[i]);
            for (const auto& row : child.rows) {
                Row r;
                for (auto i : idx) r.push_back(row[i]);
                out.rows.push_back(std::move(r));
            }
            return out;
        }
        case RelExpr::Kind::GroupCount:
            return eval_group(evaluate(db, *expr.left), expr.columns);
    }
    fail(ErrorKind::Eval, "unhandled expression kind");
}

namespace {
void collect_tables(const RelExpr& e, std::vector<std::string>& out) {
    if (e.kind == RelExpr::Kind::Base) out.push_back(e.table);
    if (e.left) collect_tables(*e.left, out);
    if (e.right) collect_tables(*e.right, out);
}
}  // namespace

std::vector<std::string> referenced_tables(const RelExpr& expr) {
    std::vector<std::string> out;
    collect_tables(expr, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace ethica
