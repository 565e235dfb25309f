#include "ethica/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ethica/analysis.hpp"
#include "ethica/error.hpp"

namespace ethica {

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

bool parse_bool(const std::string& s, const std::string& at) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    fail(ErrorKind::Parse, at + ": expected true/false, got '" + s + "'");
}

}  // namespace

Params parse_params(const std::string& text) {
    Params p;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::string at = "params line " + std::to_string(lineno);
        std::istringstream fields(line);
        std::string key;
        fields >> key;
        if (key == "target") fields >> p.target;
        else if (key == "score") fields >> p.score_col;
        else if (key == "class") fields >> p.class_col;
        else if (key == "manager_table") fields >> p.manager_label;
        else if (key == "pmin") {
            std::string v;
            fields >> v;
            p.pmin = Decimal::parse(v);
        } else if (key == "disadvantaged") {
            std::string v;
            fields >> v;
            p.disadvantaged = v;
        } else if (key == "k" || key == "n") {
            long long v = -1;
            fields >> v;
            if (v < 0) fail(ErrorKind::Parse, at + ": '" + key + "' must be >= 0");
            (key == "k" ? p.k : p.n) = static_cast<std::size_t>(v);
        } else if (key == "weight") {
            std::string pair, w;
            fields >> pair >> w;
            auto eq = pair.find('=');
            if (eq == std::string::npos || w.empty())
                fail(ErrorKind::Parse, at + ": expected 'weight <col>=<value> <weight>'");
            p.weights.emplace_back(pair.substr(0, eq), pair.substr(eq + 1),
                                   Decimal::parse(w));
        } else if (key == "share") {
            std::string facet;
            double pct = -1.0;
            fields >> facet >> pct;
            if (facet.empty() || pct < 0.0)
                fail(ErrorKind::Parse, at + ": expected 'share <facet> <percentage>'");
            p.shares.emplace_back(facet, pct);
        } else if (key == "materialize") {
            std::string v;
            fields >> v;
            p.materialize = parse_bool(v, at);
        } else if (key == "manager_ratio") {
            std::string v;
            fields >> v;
            p.manager_ratio = parse_bool(v, at);
        } else if (key == "proportional") {
            std::string v;
            fields >> v;
            p.proportional_ratio = parse_bool(v, at);
        } else {
            fail(ErrorKind::Parse, at + ": unknown parameter '" + key + "'");
        }
    }
    return p;
}

namespace {

struct LoadedRun {
    NodePtr cdt;
    Database db;
    std::vector<ViewBinding> registry;
    Context context;
    ContextualView view;
};

LoadedRun load_and_materialize(const RunConfig& config) {
    LoadedRun run;
    run.cdt = parse_tree(read_file(config.cdt_path));
    run.db = load_database(config.data_dir, config.manifest_path);
    run.registry = parse_registry(read_file(config.views_path), *run.cdt);
    run.context = parse_context(config.context_text, *run.cdt);
    const ViewBinding& binding = match_binding(run.registry, run.context);
    run.view = materialize(run.db, binding, run.context);
    return run;
}

Json analyze_view(const ContextualView& view, const std::vector<std::string>& affected,
                  double disparity_threshold) {
    Json tables = Json::array();
    std::vector<std::string> resolved;
    for (const auto& [label, table] : view.tables) {
        Json entry{{"table", label}, {"rows", table.row_count()}};
        Json profiles = Json::array();
        Json reports = Json::array();
        for (const auto& attr : affected) {
            if (!table.schema.index_of_ci(attr)) continue;
            resolved.push_back(attr);
            GroupProfile p = group_cardinalities(table, attr);
            profiles.push_back(to_json(p));
            reports.push_back(to_json(disparity(p, disparity_threshold)));
        }
        entry["profiles"] = profiles;
        entry["disparity"] = reports;
        tables.push_back(entry);
    }
    for (const auto& attr : affected)
        if (std::find(resolved.begin(), resolved.end(), attr) == resolved.end())
            fail(ErrorKind::Validation,
                 "affected attribute '" + attr + "' is not a column of any view table");
    return tables;
}

// The group to rebalance in favour of: the min-cardinality group of the
// first flagged disparity on the attribute, else of the target table.
std::string detect_disadvantaged(const Json& analysis, const std::string& target_label,
                                 const std::string& attr) {
    std::string fallback;
    for (const auto& entry : analysis) {
        for (const auto& d : entry["disparity"]) {
            if (d.value("attribute", "") != attr) continue;
            if (d.value("flagged", false))
                return d["min_group"].value("value", "");
            if (entry.value("table", "") == target_label)
                fallback = d["min_group"].value("value", "");
        }
    }
    if (fallback.empty())
        fail(ErrorKind::Validation,
             "cannot determine the disadvantaged group for '" + attr +
                 "'; set 'disadvantaged' in the params file");
    return fallback;
}

std::string require(const std::string& value, const std::string& param,
                    const std::string& kind) {
    if (value.empty())
        fail(ErrorKind::Validation,
             "transform '" + kind + "' needs the '" + param + "' parameter");
    return value;
}

}  // namespace

Json analyze(const RunConfig& config) {
    LoadedRun run = load_and_materialize(config);
    if (config.affected.empty())
        fail(ErrorKind::Validation, "analyze needs at least one affected attribute");
    Json report{{"context", run.context.to_string()},
                {"view", run.view.binding_name},
                {"source_hash", run.view.source_hash}};
    report["tables"] =
        analyze_view(run.view, config.affected, config.disparity_threshold);
    return report;
}

TransformOutcome run_transform(const RunConfig& config) {
    LoadedRun run = load_and_materialize(config);
    NodePtr ert = parse_tree(read_file(config.ert_path));
    EthicalContext ec =
        combine(run.context, make_requirement(config.facet, config.affected, *ert));
    auto rules = parse_rules(read_file(config.rules_path));
    Params params = config.params_path.empty() ? Params{}
                                               : parse_params(read_file(config.params_path));

    std::string run_digest = sha256_hex(run.view.source_hash + "|" +
                                        run.context.to_string() + "|" + config.facet)
                                 .substr(0, 12);
    RunLog log(config.log_path, run_digest);

    ProvenanceRecord record;
    record.ethical_context = to_json(ec);
    record.input_hash = run.view.source_hash;

    Json before = Json::object();
    for (const auto& [label, table] : run.view.tables)
        before[label] = table.row_count();
    record.row_counts["before"] = before;

    TransformOutcome outcome;
    try {
        record.analysis =
            analyze_view(run.view, config.affected, config.disparity_threshold);

        std::string target_label =
            params.target.empty() ? run.view.tables.front().first : params.target;
        const Table& target = run.view.table(target_label);
        const std::string& attr = config.affected.front();

        TransformKind kind = select_transform(ec, rules);
        Json parameters{{"target", target_label},
                        {"disparity_threshold", config.disparity_threshold}};

        Table ev;
        if (!params.shares.empty()) {
            // Multiple facets with priority percentages: fill each facet's
            // share of the N positions in priority order; the diversity
            // facet uses dominant-group tie-breaking, the others the plain
            // score ranking.
            if (!params.n)
                fail(ErrorKind::Validation, "shares given but 'n' is missing");
            std::string score = require(params.score_col, "score", "priority_split");
            Allocation alloc = priority_split(*params.n, params.shares);
            Json alloc_json = Json::array();
            Table remaining = equality_rank(target, score);
            ev.name = target.name;
            ev.schema = target.schema;
            for (std::size_t i = 0; i < alloc.shares.size(); ++i) {
                const std::string& facet = alloc.shares[i].first;
                std::size_t count = std::min(alloc.counts[i], remaining.row_count());
                bool diversity = facet == "diversity" ||
                                 facet.rfind(".diversity") != std::string::npos;
                Table picked = diversity
                                   ? diversity_select(remaining, score, count, attr)
                                   : top_k(remaining, count);
                alloc_json.push_back(Json{{"facet", facet},
                                          {"percentage", alloc.shares[i].second},
                                          {"count", alloc.counts[i]}});
                // drop the picked rows from the remainder (first match wins)
                for (const auto& row : picked.rows) {
                    auto it = std::find_if(
                        remaining.rows.begin(), remaining.rows.end(),
                        [&](const Row& r) { return r == row; });
                    if (it != remaining.rows.end()) remaining.rows.erase(it);
                    ev.rows.push_back(row);
                }
            }
            record.transform = Json{{"kind", "priority_split"},
                                    {"allocation", alloc_json},
                                    {"parameters", parameters}};
            parameters["n"] = *params.n;
            parameters["score"] = score;
            record.transform["parameters"] = parameters;
            record.explanation.push_back(
                "Positions were split across facets by largest-remainder "
                "apportionment of n=" + std::to_string(*params.n) + ".");
        } else {
            switch (kind) {
                case TransformKind::Suppression: {
                    parameters["assoc_threshold"] = config.assoc_threshold;
                    ev = target;
                    for (const auto& a : config.affected)
                        ev = suppress(ev, a, config.assoc_threshold,
                                      &record.columns_removed);
                    if (target.row_count() >= 2) {
                        Json assoc = Json::array();
                        for (const auto& s : correlated_columns(
                                 target, attr, config.assoc_threshold))
                            assoc.push_back(to_json(s));
                        record.analysis.push_back(
                            Json{{"table", target_label}, {"associations", assoc}});
                    }
                    break;
                }
                case TransformKind::RepairOversample: {
                    std::string score =
                        require(params.score_col, "score", "repair_oversample");
                    if (!params.pmin)
                        fail(ErrorKind::Validation,
                             "transform 'repair_oversample' needs the 'pmin' parameter");
                    std::string disadvantaged =
                        params.disadvantaged.value_or(std::string());
                    if (disadvantaged.empty())
                        disadvantaged =
                            detect_disadvantaged(record.analysis, target_label, attr);
                    parameters["score"] = score;
                    parameters["pmin"] = params.pmin->to_string();
                    parameters["disadvantaged"] = disadvantaged;
                    RepairResult r;
                    if (params.manager_ratio) {
                        std::string managers = require(params.manager_label,
                                                       "manager_table", "repair");
                        r = repair_manager_ratio(target, run.view.table(managers), attr,
                                                 disadvantaged, score, *params.pmin,
                                                 params.proportional_ratio);
                        parameters["manager_table"] = managers;
                        parameters["proportional"] = params.proportional_ratio;
                    } else {
                        r = repair_oversample(target, attr, disadvantaged, score,
                                              *params.pmin);
                    }
                    parameters["p"] = r.replications;
                    parameters["BMC"] = r.advantaged;
                    parameters["BFC"] = r.disadvantaged;
                    record.explanation.push_back(
                        "Appended " + std::to_string(r.replications) +
                        " replica(s) of the " + std::to_string(r.disadvantaged) +
                        " qualifying disadvantaged rows.");
                    ev = std::move(r.table);
                    break;
                }
                case TransformKind::Reweighting: {
                    Json weights = Json::array();
                    for (const auto& [col, val, w] : params.weights)
                        weights.push_back(
                            Json{{"column", col}, {"value", val}, {"weight", w.to_string()}});
                    parameters["weights"] = weights;
                    parameters["materialize"] = params.materialize;
                    ev = reweight(target, params.weights);
                    if (params.materialize) {
                        std::size_t dropped = 0;
                        ev = materialize_weights(ev, &dropped);
                        if (dropped > 0)
                            record.explanation.push_back(
                                std::to_string(dropped) +
                                " row(s) had weights rounding to 0 and were dropped.");
                    }
                    break;
                }
                case TransformKind::Massaging: {
                    std::string cls = require(params.class_col, "class", "massaging");
                    std::string disadvantaged =
                        params.disadvantaged.value_or(std::string());
                    if (disadvantaged.empty())
                        disadvantaged =
                            detect_disadvantaged(record.analysis, target_label, attr);
                    parameters["class"] = cls;
                    parameters["disadvantaged"] = disadvantaged;
                    if (!params.score_col.empty()) parameters["score"] = params.score_col;
                    MassageResult m =
                        massage(target, cls, attr, disadvantaged, params.score_col);
                    parameters["k"] = m.k;
                    parameters["rate_gap"] = m.rate_gap;
                    record.explanation.push_back(
                        "Relabeled " + std::to_string(2 * m.k) + " rows (k=" +
                        std::to_string(m.k) + ").");
                    ev = std::move(m.table);
                    break;
                }
                case TransformKind::EqualityRank: {
                    std::string score = require(params.score_col, "score", "equality_rank");
                    parameters["score"] = score;
                    ev = equality_rank(target, score);
                    if (params.k) {
                        parameters["k"] = *params.k;
                        ev = top_k(ev, *params.k);
                    }
                    break;
                }
                case TransformKind::DiversitySelect: {
                    std::string score =
                        require(params.score_col, "score", "diversity_select");
                    std::size_t k = params.k.value_or(target.row_count());
                    parameters["score"] = score;
                    parameters["k"] = k;
                    ev = diversity_select(target, score, k, attr);
                    break;
                }
            }
            record.transform =
                Json{{"kind", transform_kind_to_string(kind)}, {"parameters", parameters}};
        }

        record.row_counts["after"] = Json{{"EV", ev.row_count()}};
        if (!config.out_path.empty()) write_table_csv(ev, config.out_path);
        outcome.ethical_view = std::move(ev);
    } catch (const Error& e) {
        record.error = e.what();
        record.explanation.push_back(std::string("The transform failed: ") + e.what());
        if (!config.log_path.empty()) log.append(std::move(record));
        throw;
    }

    record.timestamp = utc_now_rfc3339();
    if (!config.log_path.empty())
        outcome.record_id = log.append(record);
    record.id = outcome.record_id;
    outcome.record = std::move(record);
    return outcome;
}

}  // namespace ethica
