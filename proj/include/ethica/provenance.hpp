#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ethica/analysis.hpp"
#include "ethica/tree.hpp"

namespace ethica {

using Json = nlohmann::json;

Json to_json(const GroupProfile& p);
Json to_json(const DisparityReport& r);
Json to_json(const AssociationScore& s);
Json to_json(const EthicalContext& ec);

/// The auditable account of one pipeline run. Everything that influenced
/// the emitted Ethical View is in here: inputs (by hash), the analysis
/// that was seen, the transform and its full parameter set, and the
/// before/after row counts.
struct ProvenanceRecord {
    std::string id;         // "<run digest>-<sequence>"
    std::string timestamp;  // RFC-3339 UTC
    Json ethical_context;
    std::string input_hash;
    Json analysis = Json::array();
    Json transform;  // {"kind": ..., "parameters": {...}}
    Json row_counts; // {"before": {label: n}, "after": {label: n}}
    std::vector<std::string> columns_removed;
    std::vector<std::string> explanation;
    std::optional<std::string> error;

    Json to_json() const;
    static ProvenanceRecord from_json(const Json& j);
};

/// Append-only JSON-Lines writer; ids are strictly increasing within a
/// run ("<digest>-1", "<digest>-2", ...). Recording never throws into the
/// pipeline: I/O failures surface on flush via ok().
class RunLog {
public:
    RunLog(std::string path, std::string run_digest);

    /// Assigns id and timestamp, appends one line, returns the record id.
    std::string append(ProvenanceRecord record);

    bool ok() const { return ok_; }

private:
    std::string path_;
    std::string run_digest_;
    std::size_t sequence_ = 0;
    bool ok_ = true;
};

std::vector<ProvenanceRecord> read_log(const std::string& path);

/// Finds a record by id in a JSON-Lines log.
std::optional<ProvenanceRecord> find_record(const std::string& path,
                                            const std::string& id);

/// Deterministic English rendering: context, facet, detected disparity,
/// chosen transform, parameter values (and the error, for failed runs).
std::string explain(const ProvenanceRecord& r);

/// Current instant as RFC-3339 UTC (seconds resolution).
std::string utc_now_rfc3339();

}  // namespace ethica
