#pragma once

// Symmetry classification of weak-value traces.
//
// A trace A_w sampled symmetrically about a center t0 is
//   PT-like      when A_w(t0-tau)* ==  A_w(t0+tau)   (Re even, Im odd)
//   anti-PT-like when A_w(t0-tau)* == -A_w(t0+tau)   (Re odd,  Im even)
// The classifier works on mirrored sample pairs and reports normalized
// residuals for both the conjugate-mirror tests and the four component
// parity tests.  The two routes are kept numerically identical: the
// conjugate-mirror residuals are defined as the max of the corresponding
// component residuals, so the equivalence (PT <=> Re even and Im odd) holds
// bit-for-bit at any tolerance, not just almost-everywhere.
//
// The verdict predicts which part of an interaction-induced pointer
// translation must vanish: PT kills the imaginary part, anti-PT kills the
// real part.

#include <complex>
#include <vector>

#include "weakval/pps.hpp"

namespace weakval {

enum class Verdict { pt, anti_pt, both, neither };
enum class VanishingPart { imaginary_part, real_part, both, none };

// Which conjugate variable the interaction couples to.  Momentum coupling
// (A x p) translates the pointer position; position coupling (A x q)
// translates the pointer momentum.
enum class Picture { momentum_coupling, position_coupling };

struct SymmetryReport {
    Verdict verdict;
    double pt_residual;
    double anti_pt_residual;
    double re_even_residual;
    double re_odd_residual;
    double im_even_residual;
    double im_odd_residual;
    VanishingPart predicted_vanishing;
    double tolerance;
};

struct EvenOddParts {
    WeakValueSeries even;
    WeakValueSeries odd;
};

// Samplewise split about the grid center: even[k] = (v[k] + v[mirror])/2,
// odd[k] = (v[k] - v[mirror])/2.  even + odd reproduces the input to 1e-15.
EvenOddParts even_odd_decompose(const WeakValueSeries& series);

// Classify against the given tolerance.  An (all-zero) series satisfies both
// symmetries and is reported as Verdict::both with zero residuals.
SymmetryReport classify(const WeakValueSeries& series, double tolerance);

// Weak interaction coefficient gamma(t) * A_w(t) sampled on a grid.  The
// coupling_even_certified flag records whether the gamma factor is known to
// be even about the grid center; the PT transform is only meaningful then.
struct CoefficientSeries {
    TimeGrid grid;
    std::vector<Complex> coeff;
    Picture picture;
    bool coupling_even_certified = false;
};

// Coefficient-level PT transform: c^PT(t0+tau) = conj(c(t0-tau)), same
// picture.  An involution.  Throws validation_error unless the series
// carries the even-coupling certificate.
CoefficientSeries pt_transform(const CoefficientSeries& coeff);

// sup|pt_transform(c) - c| <= tol * sup|c|  (PT), resp. + for anti-PT.
// A zero series satisfies both.
bool is_pt_symmetric(const CoefficientSeries& coeff, double tolerance);
bool is_anti_pt_symmetric(const CoefficientSeries& coeff, double tolerance);

const char* to_string(Verdict v);
const char* to_string(VanishingPart p);
const char* to_string(Picture p);

}  // namespace weakval
