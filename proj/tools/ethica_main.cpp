#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ethica/error.hpp"
#include "ethica/pipeline.hpp"
#include "ethica/provenance.hpp"

namespace {

using namespace ethica;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int exit_code(const Error& e) { return e.kind() == ErrorKind::Io ? 2 : 1; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ethica: context-aware ethical data tailoring"};
    app.require_subcommand(1);

    RunConfig config;
    std::string log_override;
    if (const char* env = std::getenv("ETHICA_LOG")) log_override = env;

    auto add_data_options = [&](CLI::App* cmd) {
        cmd->add_option("--data", config.data_dir, "data directory")->required();
        cmd->add_option("--manifest", config.manifest_path, "schema manifest")->required();
        cmd->add_option("--views", config.views_path, "view registry file")->required();
        cmd->add_option("--cdt", config.cdt_path, "CDT tree file")->required();
        cmd->add_option("--context", config.context_text, "context string");
        cmd->add_option("--affected", config.affected, "affected attribute(s)")
            ->delimiter(',')
            ->required();
        cmd->add_option("--disparity-threshold", config.disparity_threshold,
                        "min/max group ratio below which a disparity is flagged")
            ->check(CLI::Range(0.0, 1.0));
    };

    auto* validate = app.add_subcommand("validate", "parse and validate the trees");
    validate->add_option("--cdt", config.cdt_path, "CDT tree file")->required();
    validate->add_option("--ert", config.ert_path, "ERT tree file")->required();

    auto* resolve = app.add_subcommand("resolve", "resolve a context against the CDT");
    resolve->add_option("--cdt", config.cdt_path, "CDT tree file")->required();
    resolve->add_option("--context", config.context_text, "context string");

    auto* analyze_cmd =
        app.add_subcommand("analyze", "group cardinalities and disparity report");
    add_data_options(analyze_cmd);

    auto* transform_cmd =
        app.add_subcommand("transform", "produce the Ethical View and its provenance");
    add_data_options(transform_cmd);
    transform_cmd->add_option("--ert", config.ert_path, "ERT tree file")->required();
    transform_cmd->add_option("--facet", config.facet, "ethical facet path")->required();
    transform_cmd->add_option("--rules", config.rules_path, "transform rule table")
        ->required();
    transform_cmd->add_option("--params", config.params_path, "parameters file");
    transform_cmd->add_option("--out", config.out_path, "Ethical View CSV path")
        ->required();
    transform_cmd->add_option("--log", config.log_path, "provenance log (JSON-Lines)")
        ->required();
    transform_cmd->add_option("--assoc-threshold", config.assoc_threshold,
                              "association score above which a column is suppressed")
        ->check(CLI::Range(0.0, 1.0));

    std::string explain_log, explain_id;
    auto* explain_cmd = app.add_subcommand("explain", "render a provenance record");
    explain_cmd->add_option("--log", explain_log, "provenance log")->required();
    explain_cmd->add_option("--id", explain_id, "record id")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            parse_tree(read_file(config.cdt_path));
            parse_tree(read_file(config.ert_path));
            std::cout << "ok\n";
        } else if (*resolve) {
            NodePtr cdt = parse_tree(read_file(config.cdt_path));
            Context c = parse_context(config.context_text, *cdt);
            std::cout << (c.empty() ? "(empty context)" : c.to_string()) << "\n";
        } else if (*analyze_cmd) {
            std::cout << analyze(config).dump(2) << "\n";
        } else if (*transform_cmd) {
            if (!log_override.empty()) config.log_path = log_override;
            TransformOutcome outcome = run_transform(config);
            std::cout << outcome.record_id << "\n";
        } else if (*explain_cmd) {
            auto record = find_record(explain_log, explain_id);
            if (!record)
                fail(ErrorKind::Validation, "no record with id '" + explain_id + "'");
            std::cout << explain(*record) << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
