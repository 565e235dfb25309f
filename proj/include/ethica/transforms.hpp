#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ethica/relation.hpp"
#include "ethica/tree.hpp"

namespace ethica {

enum class TransformKind {
    Suppression,
    RepairOversample,
    Reweighting,
    Massaging,
    EqualityRank,
    DiversitySelect
};

TransformKind transform_kind_from_string(const std::string& name);
std::string transform_kind_to_string(TransformKind k);

/// One line of the rule table; "*" in a field matches anything.
struct TransformRule {
    std::string action;  // value of the `action` dimension, or "*"
    std::string facet;   // dotted facet path (or bare leaf name), or "*"
    std::string attr;    // affected attribute name, or "*"
    TransformKind kind;
};

/// Parses `rule action=<v|*> facet=<path|*> attr=<name|*> -> <kind>` lines.
std::vector<TransformRule> parse_rules(const std::string& text);

/// Most specific matching rule's kind: exact fields beat wildcards,
/// earlier rules break ties.
TransformKind select_transform(const EthicalContext& ec,
                               const std::vector<TransformRule>& rules);

inline constexpr const char* kWeightColumn = "__weight";

struct RepairResult {
    Table table;
    std::size_t advantaged = 0;     // BMC
    std::size_t disadvantaged = 0;  // BFC
    std::int64_t replications = 0;  // p
};

/// Drops the protected column plus every column whose association with it
/// reaches the threshold. Rows are untouched.
Table suppress(const Table& t, const std::string& protected_col, double assoc_threshold,
               std::vector<std::string>* removed = nullptr);

/// Oversampling repair: keep rows with score > pmin, then append
/// p = ceil((BMC-BFC)/BFC) extra copies of the disadvantaged rows
/// (p = 0 when BMC <= BFC), so that BMC <= BFC*(1+p) < BMC+BFC.
RepairResult repair_oversample(const Table& t, const std::string& protected_col,
                               const std::string& disadvantaged,
                               const std::string& score_col, const Decimal& pmin);

/// Variant driven by the manager head-count: p' = ceil((MM-FM)/(MM+FM))
/// computed on the managers table, clamped to 0 for a negative numerator.
/// With `proportional` set, p' = ceil(MM/FM) - 1 instead (matches the
/// manager gender ratio rather than the literal formula).
RepairResult repair_manager_ratio(const Table& clerks, const Table& managers,
                                  const std::string& protected_col,
                                  const std::string& disadvantaged,
                                  const std::string& score_col, const Decimal& pmin,
                                  bool proportional = false);

/// Appends a `__weight` column; each row's weight is the product of the
/// weights of its matching (column, value) pairs, 1.0 when none match.
Table reweight(const Table& t,
               const std::vector<std::tuple<std::string, std::string, Decimal>>&
                   value_weights);

/// Replicates each row round(weight) times (half-up) and drops the weight
/// column. Rows whose weight rounds to 0 are dropped (counted in
/// rows_dropped when given, so the caller can record a warning).
Table materialize_weights(const Table& t, std::size_t* rows_dropped = nullptr);

struct MassageResult {
    Table table;
    std::size_t k = 0;
    double rate_gap = 0.0;  // |P(+|disadvantaged) - P(+|advantaged)| after
};

/// Relabeling: flips the top-k disadvantaged negatives to positive and the
/// bottom-k advantaged positives to negative, with k the smallest value
/// minimizing the positive-rate gap. Ranking is by `score_col` descending
/// when given, input order otherwise; ties keep input order.
MassageResult massage(const Table& t, const std::string& class_col,
                      const std::string& protected_col,
                      const std::string& disadvantaged,
                      const std::string& score_col = "");

/// Stable descending sort by a numeric score column.
Table equality_rank(const Table& t, const std::string& score_col);

Table top_k(const Table& t, std::size_t k);

/// Ordered selection of k rows where score ties go to the group with the
/// largest remaining cardinality; dominance is recomputed after each pick.
Table diversity_select(const Table& t, const std::string& score_col, std::size_t k,
                       const std::string& protected_col);

struct Allocation {
    std::vector<std::pair<std::string, double>> shares;  // facet, percentage
    std::vector<std::size_t> counts;
};

/// Largest-remainder apportionment of n positions over percentage shares
/// (remainder ties go to the earlier, higher-priority facet).
Allocation priority_split(std::size_t n,
                          const std::vector<std::pair<std::string, double>>& shares);

}  // namespace ethica
