#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ethica/value.hpp"

namespace ethica {

enum class ColumnType { Text, Integer, Decimal, Boolean, Date };

ColumnType column_type_from_string(const std::string& name);
std::string column_type_to_string(ColumnType t);

struct Column {
    std::string name;
    ColumnType type;
};

struct Schema {
    std::vector<Column> columns;
    std::vector<std::string> key;  // subset of column names (base tables only)

    std::optional<std::size_t> index_of(const std::string& column) const;
    /// Case-insensitive lookup, for names coming from contexts/rule files.
    std::optional<std::size_t> index_of_ci(const std::string& column) const;
};

using Row = std::vector<Value>;

/// Rows are an ordered multiset: duplicates are meaningful (repair
/// replicates rows on purpose) and key uniqueness is enforced only when
/// loading base tables.
struct Table {
    std::string name;
    Schema schema;
    std::vector<Row> rows;

    std::size_t column_index(const std::string& column) const;  // throws Eval
    std::size_t row_count() const { return rows.size(); }
};

struct Database {
    std::map<std::string, Table> tables;
    std::map<std::string, std::string> csv_paths;  // table name -> source file

    const Table& table(const std::string& name) const;  // throws Eval
};

// --- Relational expression AST -------------------------------------------

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Predicate;
using PredicatePtr = std::shared_ptr<Predicate>;

struct Predicate {
    enum class Kind { Compare, And, Or, Not };
    Kind kind;
    // Compare
    std::string column;
    CompareOp op = CompareOp::Eq;
    Value literal;
    // And/Or/Not
    PredicatePtr left, right;
};

struct RelExpr;
using RelExprPtr = std::shared_ptr<RelExpr>;

struct RelExpr {
    enum class Kind { Base, Select, NaturalJoin, Project, GroupCount };
    Kind kind;
    std::string table;               // Base
    PredicatePtr predicate;          // Select
    RelExprPtr left, right;          // children
    std::vector<std::string> columns;  // Project / GroupCount
};

/// Parses `NAME | select(e, pred) | join(e, e) | project(e, cols...) |
/// group(e, cols...)`; predicates are AND/OR/NOT combinations of
/// `NAME op literal` with double-quoted strings.
RelExprPtr parse_expr(const std::string& text);

std::string expr_to_string(const RelExpr& expr);

/// Evaluates an expression. Select keeps rows satisfying the predicate
/// (comparisons with null are false). NaturalJoin equi-joins on all
/// shared column names, emitting shared columns once (shared in left
/// order, then left-only, then right-only). GroupCount appends a `count`
/// column, one row per distinct grouping combination in first-appearance
/// order, null being a group value of its own.
Table evaluate(const Database& db, const RelExpr& expr);

/// Base table names referenced by an expression, sorted and deduplicated.
std::vector<std::string> referenced_tables(const RelExpr& expr);

// --- CSV / manifest loading ----------------------------------------------

/// RFC-4180 CSV with a mandatory header; `\N` is null.
std::vector<std::vector<std::optional<std::string>>> parse_csv(const std::string& text);

std::string table_to_csv(const Table& t);
void write_table_csv(const Table& t, const std::string& path);

/// Loads every table declared in the manifest (`table <name> file <csv>`,
/// `col <name> <type>`, `key <name>[, ...]`), type-checking all cells and
/// enforcing key uniqueness on the base tables.
Database load_database(const std::string& directory, const std::string& manifest_path);

/// Typed coercion of one CSV cell; reports the cell location on failure.
Value coerce_value(const std::optional<std::string>& raw, ColumnType type,
                   const std::string& where);

}  // namespace ethica
