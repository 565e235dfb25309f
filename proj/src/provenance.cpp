#include "ethica/provenance.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "ethica/error.hpp"

namespace ethica {

Json to_json(const GroupProfile& p) {
    Json groups = Json::object();
    for (const auto& [value, n] : p.groups) groups[value] = n;
    return Json{{"attribute", p.attribute}, {"groups", groups}, {"total", p.total()}};
}

Json to_json(const DisparityReport& r) {
    return Json{{"attribute", r.attribute},
                {"min_group", {{"value", r.min_group.first}, {"cardinality", r.min_group.second}}},
                {"max_group", {{"value", r.max_group.first}, {"cardinality", r.max_group.second}}},
                {"ratio", r.ratio},
                {"threshold", r.threshold},
                {"flagged", r.flagged}};
}

Json to_json(const AssociationScore& s) {
    return Json{{"column_a", s.column_a},
                {"column_b", s.column_b},
                {"metric", s.metric == AssociationMetric::CramersV ? "cramers_v"
                                                                   : "correlation_ratio"},
                {"value", s.value}};
}

Json to_json(const EthicalContext& ec) {
    return Json{{"context", ec.context.to_string()},
                {"facet", ec.requirement.facet_dotted()},
                {"affected_attributes", ec.requirement.affected_attributes}};
}

Json ProvenanceRecord::to_json() const {
    Json j{{"id", id},
           {"timestamp", timestamp},
           {"ethical_context", ethical_context},
           {"input_hash", input_hash},
           {"analysis", analysis},
           {"transform", transform},
           {"row_counts", row_counts},
           {"columns_removed", columns_removed},
           {"explanation", explanation}};
    if (error) j["error"] = *error;
    return j;
}

ProvenanceRecord ProvenanceRecord::from_json(const Json& j) {
    ProvenanceRecord r;
    r.id = j.value("id", "");
    r.timestamp = j.value("timestamp", "");
    r.ethical_context = j.value("ethical_context", Json::object());
    r.input_hash = j.value("input_hash", "");
    r.analysis = j.value("analysis", Json::array());
    r.transform = j.value("transform", Json::object());
    r.row_counts = j.value("row_counts", Json::object());
    r.columns_removed = j.value("columns_removed", std::vector<std::string>{});
    r.explanation = j.value("explanation", std::vector<std::string>{});
    if (j.contains("error")) r.error = j["error"].get<std::string>();
    return r;
}

RunLog::RunLog(std::string path, std::string run_digest)
    : path_(std::move(path)), run_digest_(std::move(run_digest)) {}

std::string RunLog::append(ProvenanceRecord record) {
    record.id = run_digest_ + "-" + std::to_string(++sequence_);
    if (record.timestamp.empty()) record.timestamp = utc_now_rfc3339();
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (out) {
        out << record.to_json().dump() << '\n';
        ok_ = ok_ && static_cast<bool>(out);
    } else {
        ok_ = false;  // recording must not fail the pipeline
    }
    return record.id;
}

std::vector<ProvenanceRecord> read_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read log '" + path + "'");
    std::vector<ProvenanceRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded())
            fail(ErrorKind::Parse, "malformed log line in '" + path + "'");
        records.push_back(ProvenanceRecord::from_json(j));
    }
    return records;
}

std::optional<ProvenanceRecord> find_record(const std::string& path,
                                            const std::string& id) {
    for (auto& r : read_log(path))
        if (r.id == id) return r;
    return std::nullopt;
}

std::string explain(const ProvenanceRecord& r) {
    std::ostringstream out;
    std::string context = r.ethical_context.value("context", "");
    out << "Run " << r.id << " applied to context '"
        << (context.empty() ? "(empty)" : context) << "' with ethical facet '"
        << r.ethical_context.value("facet", "?") << "' on attribute(s) ";
    bool first = true;
    for (const auto& a :
         r.ethical_context.value("affected_attributes", std::vector<std::string>{})) {
        if (!first) out << ", ";
        first = false;
        out << a;
    }
    out << ".\n";

    for (const auto& item : r.analysis) {
        if (!item.contains("disparity")) continue;
        for (const auto& d : item["disparity"]) {
            if (d.value("flagged", false)) {
                out << "Disparity detected on '" << d.value("attribute", "?")
                    << "' in table " << item.value("table", "?") << ": group '"
                    << d["min_group"].value("value", "?") << "' ("
                    << d["min_group"].value("cardinality", 0) << ") vs '"
                    << d["max_group"].value("value", "?") << "' ("
                    << d["max_group"].value("cardinality", 0) << "), ratio "
                    << d.value("ratio", 0.0) << " below threshold "
                    << d.value("threshold", 0.0) << ".\n";
            }
        }
    }

    if (!r.transform.is_null() && r.transform.contains("kind")) {
        out << "Transform '" << r.transform.value("kind", "?") << "' was selected";
        if (r.transform.contains("rule")) out << " by rule '" << r.transform.value("rule", "") << "'";
        out << ".\n";
        if (r.transform.contains("parameters")) {
            out << "Parameters:";
            for (const auto& [key, val] : r.transform["parameters"].items())
                out << " " << key << "=" << val.dump();
            out << ".\n";
        }
    }
    if (!r.columns_removed.empty()) {
        out << "Columns removed:";
        for (const auto& c : r.columns_removed) out << " " << c;
        out << ".\n";
    }
    if (r.row_counts.contains("before") && r.row_counts.contains("after")) {
        out << "Row counts before:";
        for (const auto& [k, v] : r.row_counts["before"].items())
            out << " " << k << "=" << v.dump();
        out << "; after:";
        for (const auto& [k, v] : r.row_counts["after"].items())
            out << " " << k << "=" << v.dump();
        out << ".\n";
    }
    for (const auto& line : r.explanation) out << line << "\n";
    if (r.error) out << "The run failed: " << *r.error << "\n";
    out << "Inputs hash: " << r.input_hash << ".";
    return out.str();
}

std::string utc_now_rfc3339() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace ethica
