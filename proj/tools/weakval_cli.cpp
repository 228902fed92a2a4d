// Command-line front end: parse a scenario file, run the weak-value
// pipeline, sweep a parameter, or certify an external series CSV.
//
// Exit codes: 0 success, 1 I/O or validation failure, 2 numerical contract
// violation (e.g. near-orthogonal boundary states).  All diagnostics go to
// standard error; reports go to files only.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weakval/errors.hpp"
#include "weakval/scenario.hpp"

namespace {

int dispatch(int argc, char** argv) {
    CLI::App app{"weak-value scenario runner"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = ".";
    double tolerance_override = -1.0;
    long seed = 0;

    CLI::App* run_cmd = app.add_subcommand("run", "evaluate a scenario file");
    run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run_cmd->add_option("--out", out_dir, "output directory (default: .)");
    run_cmd->add_option("--tolerance", tolerance_override,
                        "override the symmetry classification tolerance");
    run_cmd->add_option("--seed", seed,
                        "reserved for randomized helpers; never affects physics");

    std::string param_name;
    std::vector<double> values;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter");
    sweep_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    sweep_cmd->add_option("--param", param_name, "one of gamma0, epsilon, omega")
        ->required();
    sweep_cmd->add_option("--values", values, "comma-separated sweep values")
        ->delimiter(',');
    sweep_cmd->add_option("--out", out_dir, "output directory (default: .)");
    sweep_cmd->add_option("--tolerance", tolerance_override,
                          "override the symmetry classification tolerance");
    sweep_cmd->add_option("--seed", seed,
                          "reserved for randomized helpers; never affects physics");

    std::string csv_path;
    double t0 = 0.0;
    double classify_tolerance = 1e-9;
    CLI::App* classify_cmd =
        app.add_subcommand("classify", "certify an external series CSV");
    classify_cmd->add_option("series", csv_path, "series CSV file")->required();
    classify_cmd->add_option("--t0", t0, "symmetry center of the time column")
        ->required();
    classify_cmd->add_option("--tolerance", classify_tolerance,
                             "classification tolerance (default 1e-9)");
    classify_cmd->add_option("--out", out_dir, "output directory (default: .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Fold CLI11's usage-error codes into the documented contract:
        // 0 for --help, 1 for any bad invocation.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (classify_cmd->parsed()) {
        weakval::classify_csv(csv_path, t0, classify_tolerance, out_dir);
        return 0;
    }

    weakval::RunConfig config = weakval::parse_scenario(scenario_path);
    for (const std::string& warning : config.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    if (tolerance_override > 0.0) config.tolerance = tolerance_override;

    if (run_cmd->parsed()) {
        weakval::run(config, out_dir);
        return 0;
    }

    weakval::SweepParam param;
    if (param_name == "gamma0") {
        param = weakval::SweepParam::gamma0;
    } else if (param_name == "epsilon") {
        param = weakval::SweepParam::epsilon;
    } else if (param_name == "omega") {
        param = weakval::SweepParam::omega;
    } else {
        throw weakval::validation_error(
            "--param must be one of gamma0, epsilon, omega");
    }
    weakval::sweep(config, param, values, out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const weakval::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const weakval::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
