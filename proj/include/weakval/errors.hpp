#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace weakval {

// Short %g rendering for diagnostics; std::to_string flattens small
// magnitudes (tolerances, overlaps) to 0.000000.
inline std::string num_str(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

// Raised when inputs violate a constructor or parser contract (bad shapes,
// non-Hermitian matrices, malformed files, ...).  The command-line driver
// maps this family to exit code 1.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a numerical contract fails at run time even though the inputs
// were well formed (near-orthogonal boundary states, uncovered coupling
// support, pointer mass escaping the grid, ...).  Exit code 2 in the driver.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Near-orthogonal pre/post selection.  Weak values diverge as the overlap
// vanishes, so callers get the offending magnitude to report or to widen
// their floor deliberately.
struct near_orthogonality_error : numeric_error {
    near_orthogonality_error(const std::string& what, double overlap)
        : numeric_error(what), overlap_magnitude(overlap) {}

    double overlap_magnitude;
};

}  // namespace weakval
