#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ethica/provenance.hpp"
#include "ethica/relation.hpp"
#include "ethica/transforms.hpp"
#include "ethica/tree.hpp"
#include "ethica/views.hpp"

namespace ethica {

/// Runtime parameters of a transform run (the `--params` file plus flags).
struct Params {
    std::string target;  // view label the transform applies to (default: first)
    std::optional<Decimal> pmin;
    std::string score_col;
    std::string class_col;
    std::optional<std::string> disadvantaged;
    std::optional<std::size_t> k;
    std::optional<std::size_t> n;
    std::vector<std::tuple<std::string, std::string, Decimal>> weights;
    std::vector<std::pair<std::string, double>> shares;  // facet -> percentage
    std::string manager_label;  // labeled table driving the manager-ratio repair
    bool materialize = false;
    bool manager_ratio = false;      // use the manager head-count repair variant
    bool proportional_ratio = false; // alternative proportional formula
};

/// `<key> <value...>` lines; `weight Col=value 2.0`, `share facet 60`.
Params parse_params(const std::string& text);

struct RunConfig {
    std::string cdt_path;
    std::string ert_path;
    std::string data_dir;
    std::string manifest_path;
    std::string views_path;
    std::string rules_path;
    std::string context_text;
    std::string facet;
    std::vector<std::string> affected;
    std::string params_path;
    std::string out_path;
    std::string log_path;
    double disparity_threshold = 0.8;
    double assoc_threshold = 0.5;
};

/// Group profiles and disparity reports per affected attribute for every
/// labeled table of the matched contextual view.
Json analyze(const RunConfig& config);

struct TransformOutcome {
    std::string record_id;
    Table ethical_view;
    ProvenanceRecord record;
};

/// Full pipeline: validate, resolve, analyze, transform, report. Writes
/// the Ethical View CSV and appends one provenance record (also on
/// failure, in which case the underlying error is rethrown afterwards).
TransformOutcome run_transform(const RunConfig& config);

}  // namespace ethica
