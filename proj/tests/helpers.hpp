#pragma once

// Shared test fixtures: quick table builders and an independent
// nested-loop reference evaluator used to check the relational engine.
// The reference works on column-name->value maps and never touches the
// engine's evaluation path.

#include <algorithm>
#include <memory>
#include <random>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ethica/relation.hpp"

namespace testutil {

using ethica::ColumnType;
using ethica::Database;
using ethica::Predicate;
using ethica::RelExpr;
using ethica::Row;
using ethica::Table;
using ethica::Value;

inline Value cell(const std::string& spec, ColumnType type) {
    if (spec == "\\N") return std::monostate{};
    return ethica::coerce_value(spec, type, "test cell");
}

/// make_table("T", {{"a","text"},{"n","integer"}}, {{"x","1"},{"y","2"}})
inline Table make_table(
    const std::string& name,
    const std::vector<std::pair<std::string, std::string>>& columns,
    const std::vector<std::vector<std::string>>& rows) {
    Table t;
    t.name = name;
    for (const auto& [cname, ctype] : columns)
        t.schema.columns.push_back({cname, ethica::column_type_from_string(ctype)});
    for (const auto& r : rows) {
        Row row;
        for (std::size_t i = 0; i < r.size(); ++i)
            row.push_back(cell(r[i], t.schema.columns[i].type));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Database make_db(std::vector<Table> tables) {
    Database db;
    for (auto& t : tables) db.tables.emplace(t.name, std::move(t));
    return db;
}

// ---- independent reference evaluator ---------------------------------------

using RefRow = std::map<std::string, Value>;

inline bool ref_compare(const Value& cell, ethica::CompareOp op, const Value& lit) {
    if (ethica::is_null(cell) || ethica::is_null(lit)) return false;
    int c = ethica::compare_values(cell, lit);
    switch (op) {
        case ethica::CompareOp::Eq: return c == 0;
        case ethica::CompareOp::Ne: return c != 0;
        case ethica::CompareOp::Lt: return c < 0;
        case ethica::CompareOp::Le: return c <= 0;
        case ethica::CompareOp::Gt: return c > 0;
        default: return c >= 0;
    }
}

inline bool ref_predicate(const Predicate& p, const RefRow& row) {
    switch (p.kind) {
        case Predicate::Kind::Compare:
            return ref_compare(row.at(p.column), p.op, p.literal);
        case Predicate::Kind::And:
            return ref_predicate(*p.left, row) && ref_predicate(*p.right, row);
        case Predicate::Kind::Or:
            return ref_predicate(*p.left, row) || ref_predicate(*p.right, row);
        default:
            return !ref_predicate(*p.left, row);
    }
}

inline std::vector<RefRow> ref_evaluate(const Database& db, const RelExpr& e) {
    switch (e.kind) {
        case RelExpr::Kind::Base: {
            const Table& t = db.table(e.table);
            std::vector<RefRow> out;
            for (const auto& row : t.rows) {
                RefRow r;
                for (std::size_t i = 0; i < row.size(); ++i)
                    r[t.schema.columns[i].name] = row[i];
                out.push_back(std::move(r));
            }
            return out;
        }
        case RelExpr::Kind::Select: {
            std::vector<RefRow> out;
            for (const auto& row : ref_evaluate(db, *e.left))
                if (ref_predicate(*e.predicate, row)) out.push_back(row);
            return out;
        }
        case RelExpr::Kind::NaturalJoin: {
            auto left = ref_evaluate(db, *e.left);
            auto right = ref_evaluate(db, *e.right);
            std::vector<RefRow> out;
            for (const auto& l : left) {
                for (const auto& r : right) {
                    bool match = true;
                    for (const auto& [k, v] : l) {
                        auto it = r.find(k);
                        if (it == r.end()) continue;
                        if (ethica::is_null(v) || ethica::is_null(it->second) ||
                            ethica::compare_values(v, it->second) != 0) {
                            match = false;
                            break;
                        }
                    }
                    if (!match) continue;
                    RefRow merged = l;
                    merged.insert(r.begin(), r.end());
                    out.push_back(std::move(merged));
                }
            }
            return out;
        }
        case RelExpr::Kind::Project: {
            std::vector<RefRow> out;
            for (const auto& row : ref_evaluate(db, *e.left)) {
                RefRow r;
                for (const auto& c : e.columns) r[c] = row.at(c);
                out.push_back(std::move(r));
            }
            return out;
        }
        case RelExpr::Kind::GroupCount: {
            auto rows = ref_evaluate(db, *e.left);
            std::vector<std::pair<RefRow, std::int64_t>> groups;
            for (const auto& row : rows) {
                RefRow key;
                for (const auto& c : e.columns) key[c] = row.at(c);
                auto rendered = [&](const RefRow& k) {
                    std::string s;
                    for (const auto& [n, v] : k)
                        s += n + "=" + std::to_string(v.index()) + ":" +
                             ethica::value_to_string(v) + ";";
                    return s;
                };
                bool found = false;
                for (auto& [k, n] : groups)
                    if (rendered(k) == rendered(key)) {
                        ++n;
                        found = true;
                        break;
                    }
                if (!found) groups.emplace_back(std::move(key), 1);
            }
            std::vector<RefRow> out;
            for (auto& [k, n] : groups) {
                RefRow r = k;
                r["count"] = n;
                out.push_back(std::move(r));
            }
            return out;
        }
    }
    return {};
}

// ---- randomized database / expression generator ----------------------------

struct Generator {
    std::mt19937 rng;
    // shared column pool; types fixed by name so joins stay well-typed
    std::vector<std::pair<std::string, std::string>> pool = {
        {"c1", "integer"}, {"c2", "text"}, {"c3", "decimal"}, {"c4", "integer"}};

    std::string random_cell(const std::string& type) {
        if (type == "text") {
            static const char* words[] = {"a", "b", "c", "d"};
            return words[rng() % 4];
        }
        if (type == "decimal") {
            return std::to_string(static_cast<int>(rng() % 5)) + "." +
                   std::to_string(static_cast<int>(rng() % 10));
        }
        return std::to_string(static_cast<int>(rng() % 6));
    }

    Database random_db(std::size_t max_tables, std::size_t max_rows) {
        std::vector<Table> tables;
        std::size_t n_tables = 1 + rng() % max_tables;
        for (std::size_t t = 0; t < n_tables; ++t) {
            std::vector<std::pair<std::string, std::string>> cols = {pool[0]};
            for (std::size_t c = 1; c < pool.size(); ++c)
                if (rng() % 2) cols.push_back(pool[c]);
            std::vector<std::vector<std::string>> rows(rng() % (max_rows + 1));
            for (auto& r : rows) {
                for (const auto& [_, type] : cols)
                    r.push_back(rng() % 8 == 0 ? "\\N" : random_cell(type));
            }
            tables.push_back(make_table("T" + std::to_string(t), cols, rows));
        }
        return make_db(std::move(tables));
    }

    ethica::PredicatePtr random_predicate(const ethica::Schema& schema, int depth) {
        if (depth > 0 && rng() % 2 == 0) {
            auto p = std::make_shared<Predicate>();
            switch (rng() % 3) {
                case 0: p->kind = Predicate::Kind::And; break;
                case 1: p->kind = Predicate::Kind::Or; break;
                default: p->kind = Predicate::Kind::Not; break;
            }
            p->left = random_predicate(schema, depth - 1);
            if (p->kind != Predicate::Kind::Not)
                p->right = random_predicate(schema, depth - 1);
            return p;
        }
        auto p = std::make_shared<Predicate>();
        p->kind = Predicate::Kind::Compare;
        const ethica::Column& col = schema.columns[rng() % schema.columns.size()];
        p->column = col.name;
        p->op = static_cast<ethica::CompareOp>(rng() % 6);
        std::string lit = random_cell(ethica::column_type_to_string(col.type));
        p->literal = ethica::coerce_value(lit, col.type, "literal");
        return p;
    }

    // returns expr + its output schema; depth-bounded and always resolvable
    std::pair<ethica::RelExprPtr, ethica::Schema> random_expr(const Database& db, int depth) {
        auto base = [&] {
            auto it = db.tables.begin();
            std::advance(it, rng() % db.tables.size());
            auto e = std::make_shared<RelExpr>();
            e->kind = RelExpr::Kind::Base;
            e->table = it->first;
            return std::make_pair(e, it->second.schema);
        };
        if (depth <= 0) return base();
        switch (rng() % 5) {
            case 0:
                return base();
            case 1: {
                auto [child, schema] = random_expr(db, depth - 1);
                auto e = std::make_shared<RelExpr>();
                e->kind = RelExpr::Kind::Select;
                e->left = child;
                e->predicate = random_predicate(schema, 2);
                return {e, schema};
            }
            case 2: {
                // joining two base tables always shares c1
                auto [l, ls] = base();
                auto [r, rs] = base();
                auto e = std::make_shared<RelExpr>();
                e->kind = RelExpr::Kind::NaturalJoin;
                e->left = l;
                e->right = r;
                ethica::Schema out = ls;
                for (const auto& c : rs.columns)
                    if (!out.index_of(c.name)) out.columns.push_back(c);
                return {e, out};
            }
            case 3: {
                auto [child, schema] = random_expr(db, depth - 1);
                auto e = std::make_shared<RelExpr>();
                e->kind = RelExpr::Kind::Project;
                e->left = child;
                ethica::Schema out;
                for (const auto& c : schema.columns)
                    if (rng() % 2) {
                        e->columns.push_back(c.name);
                        out.columns.push_back(c);
                    }
                if (e->columns.empty()) {
                    e->columns.push_back(schema.columns[0].name);
                    out.columns.push_back(schema.columns[0]);
                }
                return {e, out};
            }
            default: {
                auto [child, schema] = random_expr(db, depth - 1);
                auto e = std::make_shared<RelExpr>();
                e->kind = RelExpr::Kind::GroupCount;
                e->left = child;
                ethica::Schema out;
                std::vector<std::string> groupable;
                for (const auto& c : schema.columns)
                    if (c.name != "count") groupable.push_back(c.name);
                if (groupable.empty()) return base();
                e->columns.push_back(groupable[rng() % groupable.size()]);
                out.columns.push_back(*std::find_if(
                    schema.columns.begin(), schema.columns.end(),
                    [&](const ethica::Column& c) { return c.name == e->columns[0]; }));
                out.columns.push_back({"count", ethica::ColumnType::Integer});
                return {e, out};
            }
        }
    }
};

/// Order- and column-order-insensitive row multiset rendering.
inline std::vector<std::string> row_multiset(const Table& t) {
    std::vector<std::string> out;
    for (const auto& row : t.rows) {
        std::vector<std::string> cells;
        for (std::size_t i = 0; i < row.size(); ++i)
            cells.push_back(t.schema.columns[i].name + "=" +
                            std::to_string(row[i].index()) + ":" +
                            ethica::value_to_string(row[i]));
        std::sort(cells.begin(), cells.end());
        std::string s;
        for (const auto& c : cells) s += c + ";";
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::string> row_multiset(const std::vector<RefRow>& rows) {
    std::vector<std::string> out;
    for (const auto& row : rows) {
        std::vector<std::string> cells;
        for (const auto& [n, v] : row)
            cells.push_back(n + "=" + std::to_string(v.index()) + ":" +
                            ethica::value_to_string(v));
        std::sort(cells.begin(), cells.end());
        std::string s;
        for (const auto& c : cells) s += c + ";";
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace testutil
