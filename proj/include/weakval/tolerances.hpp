#pragma once

// Central numerical tolerances.  Every hard-coded threshold in the library
// lives here so the contracts stay consistent across modules.

namespace weakval::tol {

// Accepted deviation from exact unit norm / exact Hermiticity when value
// types are constructed.
inline constexpr double construction = 1e-12;

// Accepted drift after propagation steps (norm preservation, composition of
// evolutions, reversibility).
inline constexpr double propagation = 1e-10;

// Imaginary residue allowed on expectation values of Hermitian observables
// before the residue is discarded.
inline constexpr double expectation_imag = 1e-12;

// Default floor on |<post|pre>| below which weak values are refused.
inline constexpr double default_overlap_floor = 1e-8;

// Default symmetry-classification tolerance on normalized residuals.
inline constexpr double default_symmetry = 1e-9;

// Pointer-state grid contracts: discrete norm deviation and the largest
// amplitude tolerated on the first/last grid sample.
inline constexpr double pointer_norm = 1e-10;
inline constexpr double pointer_boundary = 1e-8;

// Relative slack when deciding whether a boxcar window edge sits on a grid
// node.
inline constexpr double grid_alignment = 1e-9;

// Absolute slack on the uncertainty product check var_q*var_p >= (hbar/2)^2.
inline constexpr double uncertainty_slack = 1e-9;

}  // namespace weakval::tol
