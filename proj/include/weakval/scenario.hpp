#pragma once

#include <string>
#include <vector>

#include "weakval/pointer.hpp"
#include "weakval/pps.hpp"
#include "weakval/symmetry.hpp"

namespace weakval {

// Pointer wavepacket parameters resolved to a concrete position grid.
struct PointerConfig {
    double var_q;
    double center_q;
    double center_p;
    double mass;
    double grid_min;
    double grid_step;
    int grid_n;
};

struct ClosedFormSpec {
    bool declared = false;
    SymmetryExample example = SymmetryExample::pt;
};

// A fully validated scenario: quantum boundary data, sampling grid, coupling
// envelope, pointer wavepacket, and report options.
struct RunConfig {
    PpsScenario scenario;
    TimeGrid grid;
    CouplingProfile coupling;
    PointerConfig pointer;

    // Reference frequency of the scenario Hamiltonians; omega sweeps rescale
    // both Hamiltonians by value/system_omega.
    double system_omega;

    double tolerance;  // symmetry classification tolerance
    bool out_series;
    bool out_symmetry;
    bool out_pointer;

    std::vector<double> sweep_gamma0;
    std::vector<double> sweep_epsilon;
    std::vector<double> sweep_omega;

    ClosedFormSpec closed_form;

    // True when the sampling grid was refined so boxcar window edges land on
    // grid nodes; recorded in report metadata.
    bool grid_refined;

    // Non-fatal parse notes (e.g. state renormalization); the CLI prints
    // them to standard error.
    std::vector<std::string> warnings;
};

// Parses and fully validates a scenario description file.  Throws
// validation_error naming the offending field.
RunConfig parse_scenario(const std::string& path);

// Executes the pipeline and writes the requested reports (series.csv,
// symmetry.json, pointer.json) into out_dir.  All artifacts are computed
// before anything is written, and already-written files are removed if a
// later write fails, so failures never leave partial output behind.
void run(const RunConfig& config, const std::string& out_dir);

enum class SweepParam { gamma0, epsilon, omega };

// Writes sweep.csv with one row per value, in input order.  When values is
// empty the list declared in the scenario file is used; an empty effective
// list is a validation error.  Sweep points evaluate in parallel workers;
// the report is assembled single-writer in index order.
void sweep(const RunConfig& config, SweepParam param, std::vector<double> values,
           const std::string& out_dir);

// Standalone certifier over an external series CSV (same column layout as
// series.csv).  Validates the time column (uniform, odd count, symmetric
// about t0), classifies the trace, and writes symmetry.json into out_dir.
void classify_csv(const std::string& csv_path, double t0, double tolerance,
                  const std::string& out_dir);

}  // namespace weakval
