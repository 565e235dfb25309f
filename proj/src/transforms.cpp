#include "ethica/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ethica/analysis.hpp"
#include "ethica/error.hpp"

namespace ethica {

namespace {

std::string lower(std::string s) {
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

bool value_matches(const Value& cell, const std::string& wanted) {
    return !is_null(cell) && lower(value_to_string(cell)) == lower(wanted);
}

void require_numeric(const Table& t, const std::string& score_col) {
    std::size_t i = t.column_index(score_col);
    ColumnType type = t.schema.columns[i].type;
    if (type != ColumnType::Integer && type != ColumnType::Decimal)
        fail(ErrorKind::Transform, "column '" + score_col + "' is not numeric");
}

Decimal cell_decimal(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v))
        return Decimal::from_int(std::get<std::int64_t>(v));
    if (std::holds_alternative<Decimal>(v)) return std::get<Decimal>(v);
    fail(ErrorKind::Transform, "expected a numeric value, got " + value_to_string(v));
}

}  // namespace

TransformKind transform_kind_from_string(const std::string& name) {
    if (name == "suppression") return TransformKind::Suppression;
    if (name == "repair_oversample") return TransformKind::RepairOversample;
    if (name == "reweighting") return TransformKind::Reweighting;
    if (name == "massaging") return TransformKind::Massaging;
    if (name == "equality_rank") return TransformKind::EqualityRank;
    if (name == "diversity_select") return TransformKind::DiversitySelect;
    fail(ErrorKind::Parse, "unknown transform kind '" + name + "'");
}

std::string transform_kind_to_string(TransformKind k) {
    switch (k) {
        case TransformKind::Suppression: return "suppression";
        case TransformKind::RepairOversample: return "repair_oversample";
        case TransformKind::Reweighting: return "reweighting";
        case TransformKind::Massaging: return "massaging";
        case TransformKind::EqualityRank: return "equality_rank";
        default: return "diversity_select";
    }
}

std::vector<TransformRule> parse_rules(const std::string& text) {
    std::vector<TransformRule> rules;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::string at = "rules line " + std::to_string(lineno);

        auto arrow = line.find("->");
        if (arrow == std::string::npos)
            fail(ErrorKind::Parse, at + ": missing '->'");
        std::string head = line.substr(0, arrow);
        std::string kind = trim(line.substr(arrow + 2));

        TransformRule rule{"*", "*", "*", transform_kind_from_string(kind)};
        std::istringstream fields(head);
        std::string field;
        fields >> field;
        if (field != "rule") fail(ErrorKind::Parse, at + ": expected 'rule'");
        while (fields >> field) {
            auto eq = field.find('=');
            if (eq == std::string::npos)
                fail(ErrorKind::Parse, at + ": expected key=value, got '" + field + "'");
            std::string key = field.substr(0, eq);
            std::string val = lower(field.substr(eq + 1));
            if (key == "action") rule.action = val;
            else if (key == "facet") rule.facet = val;
            else if (key == "attr") rule.attr = val;
            else fail(ErrorKind::Parse, at + ": unknown field '" + key + "'");
        }
        for (const auto& r : rules) {
            // the first match wins ties, so a repeated triple is dead weight
            if (r.action == rule.action && r.facet == rule.facet && r.attr == rule.attr)
                fail(ErrorKind::Validation,
                     at + ": duplicate rule for (" + rule.action + ", " + rule.facet +
                         ", " + rule.attr + ")");
        }
        rules.push_back(rule);
    }
    if (rules.empty()) fail(ErrorKind::Validation, "empty transform rule table");
    return rules;
}

TransformKind select_transform(const EthicalContext& ec,
                               const std::vector<TransformRule>& rules) {
    if (rules.empty()) fail(ErrorKind::Validation, "empty transform rule table");

    std::string action;
    if (const ContextElement* e = ec.context.find_by_name("action")) action = e->value;
    std::string facet_full = ec.requirement.facet_dotted();
    std::string facet_leaf = ec.requirement.facet_path.back();

    const TransformRule* best = nullptr;
    int best_score = -1;
    for (const auto& r : rules) {
        int score = 0;
        if (r.action != "*") {
            if (r.action != action) continue;
            ++score;
        }
        if (r.facet != "*") {
            if (r.facet != facet_full && r.facet != facet_leaf) continue;
            ++score;
        }
        if (r.attr != "*") {
            bool hit = std::any_of(
                ec.requirement.affected_attributes.begin(),
                ec.requirement.affected_attributes.end(),
                [&](const std::string& a) { return lower(a) == r.attr; });
            if (!hit) continue;
            ++score;
        }
        if (score > best_score) {
            best = &r;
            best_score = score;
        }
    }
    if (!best)
        fail(ErrorKind::Validation,
             "no transform rule matches (action=" + (action.empty() ? "-" : action) +
                 ", facet=" + facet_full + ")");
    return best->kind;
}

Table suppress(const Table& t, const std::string& protected_col, double assoc_threshold,
               std::vector<std::string>* removed) {
    std::size_t ip = t.column_index(protected_col);

    std::vector<bool> drop(t.schema.columns.size(), false);
    drop[ip] = true;
    if (t.rows.size() >= 2) {
        for (const auto& score : correlated_columns(t, protected_col, assoc_threshold))
            drop[t.column_index(score.column_b)] = true;
    }

    Table out;
    out.name = t.name;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < t.schema.columns.size(); ++i) {
        if (drop[i]) {
            if (removed) removed->push_back(t.schema.columns[i].name);
        } else {
            keep.push_back(i);
            out.schema.columns.push_back(t.schema.columns[i]);
        }
    }
    if (keep.empty())
        fail(ErrorKind::Transform, "suppression would remove every column");
    for (const auto& row : t.rows) {
        Row r;
        for (auto i : keep) r.push_back(row[i]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

namespace {

RepairResult replicate_disadvantaged(const Table& t, const std::string& protected_col,
                                     const std::string& disadvantaged,
                                     const std::string& score_col, const Decimal& pmin,
                                     std::optional<std::int64_t> fixed_p) {
    require_numeric(t, score_col);
    std::size_t ip = t.column_index(protected_col);
    std::size_t is = t.column_index(score_col);

    RepairResult result;
    result.table.name = t.name;
    result.table.schema = t.schema;

    std::vector<const Row*> disadvantaged_rows;
    for (const auto& row : t.rows) {
        if (is_null(row[is]) || !(cell_decimal(row[is]) > pmin)) continue;
        result.table.rows.push_back(row);
        if (value_matches(row[ip], disadvantaged)) {
            ++result.disadvantaged;
            disadvantaged_rows.push_back(&row);
        } else {
            ++result.advantaged;
        }
    }

    if (fixed_p) {
        result.replications = *fixed_p;
    } else {
        // p = ceil((BMC - BFC) / BFC), clamped to 0 when BMC <= BFC
        if (result.advantaged > result.disadvantaged) {
            std::int64_t bmc = static_cast<std::int64_t>(result.advantaged);
            std::int64_t bfc = static_cast<std::int64_t>(result.disadvantaged);
            if (bfc == 0)
                fail(ErrorKind::Transform,
                     "no disadvantaged rows qualify (BFC = 0); replication cannot "
                     "rebalance, choose another transform");
            result.replications = (bmc - bfc + bfc - 1) / bfc;
        }
    }
    if (result.replications > 0 && disadvantaged_rows.empty())
        fail(ErrorKind::Transform,
             "no disadvantaged rows qualify (BFC = 0); replication cannot rebalance, "
             "choose another transform");
    for (std::int64_t i = 0; i < result.replications; ++i)
        for (const Row* row : disadvantaged_rows) result.table.rows.push_back(*row);
    return result;
}

}  // namespace

RepairResult repair_oversample(const Table& t, const std::string& protected_col,
                               const std::string& disadvantaged,
                               const std::string& score_col, const Decimal& pmin) {
    return replicate_disadvantaged(t, protected_col, disadvantaged, score_col, pmin,
                                   std::nullopt);
}

RepairResult repair_manager_ratio(const Table& clerks, const Table& managers,
                                  const std::string& protected_col,
                                  const std::string& disadvantaged,
                                  const std::string& score_col, const Decimal& pmin,
                                  bool proportional) {
    if (managers.rows.empty())
        fail(ErrorKind::Transform, "managers table is empty");
    std::size_t ip = managers.column_index(protected_col);
    std::int64_t minority = 0, majority = 0;  // FM, MM
    for (const auto& row : managers.rows) {
        if (value_matches(row[ip], disadvantaged))
            ++minority;
        else
            ++majority;
    }

    std::int64_t p = 0;
    if (proportional) {
        // p' = ceil((MM - FM) / FM): the clerk formula applied to managers
        if (minority == 0)
            fail(ErrorKind::Transform,
                 "no disadvantaged managers; proportional ratio undefined");
        if (majority > minority) p = (majority - minority + minority - 1) / minority;
    } else {
        // literal p' = ceil((MM - FM) / (MM + FM)), negative numerator clamps to 0
        if (majority > minority) p = 1;  // 0 < (MM-FM)/(MM+FM) < 1, so the ceiling is 1
    }
    return replicate_disadvantaged(clerks, protected_col, disadvantaged, score_col, pmin,
                                   p);
}

Table reweight(const Table& t,
               const std::vector<std::tuple<std::string, std::string, Decimal>>&
                   value_weights) {
    if (t.schema.index_of(kWeightColumn))
        fail(ErrorKind::Transform,
             std::string("table already has a '") + kWeightColumn + "' column");
    std::vector<std::pair<std::size_t, std::pair<std::string, Decimal>>> resolved;
    for (const auto& [col, val, w] : value_weights) {
        if (!(w > Decimal(0, 0)))
            fail(ErrorKind::Transform, "weight for " + col + "=" + val +
                                           " must be positive, got " + w.to_string());
        resolved.push_back({t.column_index(col), {val, w}});
    }

    Table out;
    out.name = t.name;
    out.schema = t.schema;
    out.schema.columns.push_back({kWeightColumn, ColumnType::Decimal});
    for (const auto& row : t.rows) {
        Decimal weight(1, 0);
        for (const auto& [idx, vw] : resolved)
            if (value_matches(row[idx], vw.first)) weight = weight * vw.second;
        Row r = row;
        r.push_back(weight);
        out.rows.push_back(std::move(r));
    }
    return out;
}

Table materialize_weights(const Table& t, std::size_t* rows_dropped) {
    auto iw = t.schema.index_of(kWeightColumn);
    if (!iw)
        fail(ErrorKind::Transform,
             std::string("no '") + kWeightColumn + "' column to materialize");

    Table out;
    out.name = t.name;
    for (std::size_t i = 0; i < t.schema.columns.size(); ++i)
        if (i != *iw) out.schema.columns.push_back(t.schema.columns[i]);
    for (const auto& row : t.rows) {
        std::int64_t copies = cell_decimal(row[*iw]).round_half_up();
        if (copies < 0)
            fail(ErrorKind::Transform, "negative weight cannot be materialized");
        if (copies == 0 && rows_dropped) ++*rows_dropped;
        Row r;
        for (std::size_t i = 0; i < row.size(); ++i)
            if (i != *iw) r.push_back(row[i]);
        for (std::int64_t c = 0; c < copies; ++c) out.rows.push_back(r);
    }
    return out;
}

namespace {

// Ranking permutation: by score descending when a score column is given
// (stable for ties), input order otherwise. Null scores sort last.
std::vector<std::size_t> ranked_order(const Table& t, const std::string& score_col) {
    std::vector<std::size_t> order(t.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (score_col.empty()) return order;
    require_numeric(t, score_col);
    std::size_t is = t.column_index(score_col);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Value& va = t.rows[a][is];
        const Value& vb = t.rows[b][is];
        if (is_null(va)) return false;
        if (is_null(vb)) return true;
        return compare_values(va, vb) > 0;
    });
    return order;
}

}  // namespace

MassageResult massage(const Table& t, const std::string& class_col,
                      const std::string& protected_col,
                      const std::string& disadvantaged, const std::string& score_col) {
    std::size_t ic = t.column_index(class_col);
    if (t.schema.columns[ic].type != ColumnType::Boolean)
        fail(ErrorKind::Transform, "class column '" + class_col + "' is not boolean");
    std::size_t ip = t.column_index(protected_col);

    auto order = ranked_order(t, score_col);

    std::vector<std::size_t> promo_candidates;  // disadvantaged negatives, best first
    std::vector<std::size_t> demo_candidates;   // advantaged positives, worst first
    std::size_t n_dis = 0, n_adv = 0, pos_dis = 0;
    for (std::size_t r : order) {
        const Row& row = t.rows[r];
        bool positive = !is_null(row[ic]) && std::get<bool>(row[ic]);
        if (value_matches(row[ip], disadvantaged)) {
            ++n_dis;
            if (positive) ++pos_dis;
            else promo_candidates.push_back(r);
        } else {
            ++n_adv;
            if (positive) demo_candidates.push_back(r);
        }
    }
    std::reverse(demo_candidates.begin(), demo_candidates.end());
    if (n_dis == 0 || n_adv == 0)
        fail(ErrorKind::Transform, "massaging needs both groups non-empty");

    std::size_t pos_adv = demo_candidates.size();
    auto gap = [&](std::size_t k) {
        double rd = static_cast<double>(pos_dis + k) / static_cast<double>(n_dis);
        double ra = static_cast<double>(pos_adv - k) / static_cast<double>(n_adv);
        return std::abs(rd - ra);
    };
    std::size_t max_k = std::min(promo_candidates.size(), demo_candidates.size());
    std::size_t best_k = 0;
    double best_gap = gap(0);
    for (std::size_t k = 1; k <= max_k; ++k) {
        double g = gap(k);
        if (g < best_gap) {
            best_gap = g;
            best_k = k;
        }
    }

    MassageResult result;
    result.table = t;
    result.k = best_k;
    result.rate_gap = best_gap;
    for (std::size_t k = 0; k < best_k; ++k) {
        result.table.rows[promo_candidates[k]][ic] = true;
        result.table.rows[demo_candidates[k]][ic] = false;
    }
    return result;
}

Table equality_rank(const Table& t, const std::string& score_col) {
    if (score_col.empty())
        fail(ErrorKind::Transform, "equality_rank needs a score column");
    auto order = ranked_order(t, score_col);
    Table out;
    out.name = t.name;
    out.schema = t.schema;
    for (std::size_t r : order) out.rows.push_back(t.rows[r]);
    return out;
}

Table top_k(const Table& t, std::size_t k) {
    Table out;
    out.name = t.name;
    out.schema = t.schema;
    for (std::size_t i = 0; i < std::min(k, t.rows.size()); ++i)
        out.rows.push_back(t.rows[i]);
    return out;
}

Table diversity_select(const Table& t, const std::string& score_col, std::size_t k,
                       const std::string& protected_col) {
    if (k > t.rows.size())
        fail(ErrorKind::Transform, "k exceeds the table's row count");
    std::size_t is = t.column_index(score_col);
    std::size_t ip = t.column_index(protected_col);
    require_numeric(t, score_col);

    auto order = ranked_order(t, score_col);
    std::vector<bool> taken(t.rows.size(), false);
    std::map<std::string, std::size_t> remaining;
    for (const auto& row : t.rows) ++remaining[value_to_string(row[ip])];

    Table out;
    out.name = t.name;
    out.schema = t.schema;
    for (std::size_t pick = 0; pick < k; ++pick) {
        // candidates: untaken rows tied at the current best score
        std::size_t first = order.size();
        for (std::size_t i = 0; i < order.size(); ++i)
            if (!taken[order[i]]) {
                first = i;
                break;
            }
        const Value& best_score = t.rows[order[first]][is];
        std::size_t chosen = order[first];
        std::size_t chosen_count = remaining[value_to_string(t.rows[chosen][ip])];
        for (std::size_t i = first + 1; i < order.size(); ++i) {
            std::size_t r = order[i];
            if (taken[r]) continue;
            const Value& s = t.rows[r][is];
            if (s.index() != best_score.index() ||
                (!is_null(s) && compare_values(s, best_score) != 0))
                break;  // ranked order: past the tie block
            std::size_t count = remaining[value_to_string(t.rows[r][ip])];
            if (count > chosen_count) {
                chosen = r;
                chosen_count = count;
            }
        }
        taken[chosen] = true;
        --remaining[value_to_string(t.rows[chosen][ip])];
        out.rows.push_back(t.rows[chosen]);
    }
    return out;
}

Allocation priority_split(std::size_t n,
                          const std::vector<std::pair<std::string, double>>& shares) {
    double total = 0.0;
    for (const auto& [_, pct] : shares) {
        if (pct < 0.0) fail(ErrorKind::Validation, "negative percentage share");
        total += pct;
    }
    if (std::abs(total - 100.0) > 1e-9)
        fail(ErrorKind::Validation, "shares must sum to 100, got " +
                                        std::to_string(total));

    Allocation a;
    a.shares = shares;
    std::vector<double> remainders;
    std::size_t allocated = 0;
    for (const auto& [_, pct] : shares) {
        double quota = static_cast<double>(n) * pct / 100.0;
        auto base = static_cast<std::size_t>(std::floor(quota));
        a.counts.push_back(base);
        remainders.push_back(quota - std::floor(quota));
        allocated += base;
    }
    // distribute the leftover by largest remainder; ties keep priority order
    std::vector<std::size_t> idx(shares.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        return remainders[x] > remainders[y];
    });
    for (std::size_t i = 0; allocated < n; ++i) {
        ++a.counts[idx[i % idx.size()]];
        ++allocated;
    }
    return a;
}

}  // namespace ethica
