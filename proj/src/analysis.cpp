#include "ethica/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ethica/error.hpp"

namespace ethica {

std::size_t GroupProfile::total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : groups) n += c;
    return n;
}

GroupProfile group_cardinalities(const Table& t, const std::string& attr) {
    std::size_t idx = t.column_index(attr);
    GroupProfile p;
    p.attribute = t.schema.columns[idx].name;
    for (const auto& row : t.rows) {
        std::string key = value_to_string(row[idx]);
        auto it = std::find_if(p.groups.begin(), p.groups.end(),
                               [&](const auto& g) { return g.first == key; });
        if (it == p.groups.end())
            p.groups.emplace_back(key, 1);
        else
            ++it->second;
    }
    return p;
}

DisparityReport disparity(const GroupProfile& p, double threshold) {
    if (threshold <= 0.0 || threshold > 1.0)
        fail(ErrorKind::Validation, "disparity threshold must be in (0,1]");
    DisparityReport r;
    r.attribute = p.attribute;
    r.threshold = threshold;
    if (p.groups.empty()) return r;

    r.min_group = r.max_group = p.groups.front();
    for (const auto& g : p.groups) {
        if (g.second < r.min_group.second) r.min_group = g;
        if (g.second > r.max_group.second) r.max_group = g;
    }
    if (r.max_group.second > 0)
        r.ratio = static_cast<double>(r.min_group.second) /
                  static_cast<double>(r.max_group.second);
    r.flagged = p.groups.size() >= 2 && r.ratio < threshold;
    return r;
}

namespace {

std::vector<std::string> rendered_column(const Table& t, std::size_t idx) {
    std::vector<std::string> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) out.push_back(value_to_string(row[idx]));
    return out;
}

std::size_t distinct_count(const std::vector<std::string>& col) {
    std::vector<std::string> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    return std::unique(sorted.begin(), sorted.end()) - sorted.begin();
}

bool is_numeric_type(ColumnType t) {
    return t == ColumnType::Integer || t == ColumnType::Decimal;
}

}  // namespace

double cramers_v(const Table& t, const std::string& col_a, const std::string& col_b) {
    std::size_t ia = t.column_index(col_a);
    std::size_t ib = t.column_index(col_b);
    if (t.rows.size() < 2)
        fail(ErrorKind::Validation, "association undefined on a table with < 2 rows");

    auto a = rendered_column(t, ia);
    auto b = rendered_column(t, ib);

    std::map<std::string, std::size_t> levels_a, levels_b;
    for (const auto& v : a) levels_a.emplace(v, levels_a.size());
    for (const auto& v : b) levels_b.emplace(v, levels_b.size());
    std::size_t r = levels_a.size();
    std::size_t c = levels_b.size();
    if (r < 2 || c < 2) return 0.0;  // a constant column carries no association

    std::vector<std::vector<double>> obs(r, std::vector<double>(c, 0.0));
    std::vector<double> row_sum(r, 0.0), col_sum(c, 0.0);
    double n = static_cast<double>(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        std::size_t ra = levels_a[a[i]];
        std::size_t cb = levels_b[b[i]];
        obs[ra][cb] += 1.0;
        row_sum[ra] += 1.0;
        col_sum[cb] += 1.0;
    }

    double chi2 = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            double expected = row_sum[i] * col_sum[j] / n;
            if (expected > 0.0) {
                double d = obs[i][j] - expected;
                chi2 += d * d / expected;
            }
        }
    double phi2 = chi2 / n;
    double v = std::sqrt(phi2 / static_cast<double>(std::min(r, c) - 1));
    return std::min(v, 1.0);
}

double correlation_ratio(const Table& t, const std::string& categorical,
                         const std::string& numeric) {
    std::size_t ic = t.column_index(categorical);
    std::size_t in = t.column_index(numeric);
    if (t.rows.size() < 2)
        fail(ErrorKind::Validation, "association undefined on a table with < 2 rows");

    std::map<std::string, std::pair<double, std::size_t>> by_group;  // sum, n
    std::vector<std::pair<std::string, double>> samples;
    for (const auto& row : t.rows) {
        if (is_null(row[ic]) || is_null(row[in])) continue;
        double y;
        if (std::holds_alternative<std::int64_t>(row[in]))
            y = static_cast<double>(std::get<std::int64_t>(row[in]));
        else if (std::holds_alternative<Decimal>(row[in]))
            y = std::get<Decimal>(row[in]).to_double();
        else
            fail(ErrorKind::Eval, "column '" + numeric + "' is not numeric");
        std::string g = value_to_string(row[ic]);
        auto& acc = by_group[g];
        acc.first += y;
        acc.second += 1;
        samples.emplace_back(g, y);
    }
    if (samples.size() < 2) return 0.0;

    double total = 0.0;
    for (const auto& [g, y] : samples) total += y;
    double mean = total / static_cast<double>(samples.size());

    double ss_total = 0.0;
    for (const auto& [g, y] : samples) ss_total += (y - mean) * (y - mean);
    if (ss_total == 0.0) return 0.0;

    double ss_between = 0.0;
    for (const auto& [g, acc] : by_group) {
        double gm = acc.first / static_cast<double>(acc.second);
        ss_between += static_cast<double>(acc.second) * (gm - mean) * (gm - mean);
    }
    return std::sqrt(std::min(1.0, ss_between / ss_total));
}

std::vector<AssociationScore> correlated_columns(const Table& t,
                                                 const std::string& protected_col,
                                                 double threshold) {
    std::size_t ip = t.column_index(protected_col);
    const std::string& pname = t.schema.columns[ip].name;
    if (t.rows.size() < 2)
        fail(ErrorKind::Validation, "association undefined on a table with < 2 rows");

    std::vector<AssociationScore> out;
    for (std::size_t i = 0; i < t.schema.columns.size(); ++i) {
        if (i == ip) continue;
        const auto& col = t.schema.columns[i];
        bool categorical = !is_numeric_type(col.type) ||
                           distinct_count(rendered_column(t, i)) <= 10;
        AssociationScore s;
        s.column_a = pname;
        s.column_b = col.name;
        if (categorical) {
            s.metric = AssociationMetric::CramersV;
            s.value = cramers_v(t, pname, col.name);
        } else {
            s.metric = AssociationMetric::CorrelationRatio;
            s.value = correlation_ratio(t, pname, col.name);
        }
        if (s.value >= threshold) out.push_back(s);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.value > b.value; });
    return out;
}

}  // namespace ethica
