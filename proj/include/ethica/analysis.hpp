#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ethica/relation.hpp"

namespace ethica {

/// Per-value cardinalities of one column over a table.
struct GroupProfile {
    std::string attribute;
    // value rendered as text (null renders as \N); first-appearance order
    std::vector<std::pair<std::string, std::size_t>> groups;

    std::size_t total() const;
};

struct DisparityReport {
    std::string attribute;
    std::pair<std::string, std::size_t> min_group;
    std::pair<std::string, std::size_t> max_group;
    double ratio = 1.0;  // min/max, in [0,1]
    bool flagged = false;
    double threshold = 0.8;
};

enum class AssociationMetric { CramersV, CorrelationRatio };

struct AssociationScore {
    std::string column_a;  // protected column
    std::string column_b;
    AssociationMetric metric;
    double value = 0.0;  // in [0,1]
};

GroupProfile group_cardinalities(const Table& t, const std::string& attr);

/// Flags the profile when it has >= 2 groups and min/max < threshold
/// (four-fifths rule by default).
DisparityReport disparity(const GroupProfile& p, double threshold);

/// Cramér's V (bias-uncorrected) for a pair of categorical columns.
/// Values are compared after text rendering; null is a category.
double cramers_v(const Table& t, const std::string& col_a, const std::string& col_b);

/// Correlation ratio eta of a numeric column against a categorical one.
/// Rows where either side is null are skipped.
double correlation_ratio(const Table& t, const std::string& categorical,
                         const std::string& numeric);

/// Columns whose association with the protected column reaches the
/// threshold, sorted descending by score. Numeric columns with <= 10
/// distinct values count as categorical.
std::vector<AssociationScore> correlated_columns(const Table& t,
                                                 const std::string& protected_col,
                                                 double threshold);

}  // namespace ethica
