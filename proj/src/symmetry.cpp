#include "weakval/symmetry.hpp"

#include <algorithm>
#include <cmath>

namespace weakval {

EvenOddParts even_odd_decompose(const WeakValueSeries& series) {
    const int n = series.grid.n();
    std::vector<Complex> even(n), odd(n);
    for (int k = 0; k < n; ++k) {
        const Complex here = series.values[k];
        const Complex mirror = series.values[series.grid.mirror_index(k)];
        even[k] = 0.5 * (here + mirror);
        odd[k] = 0.5 * (here - mirror);
    }
    return EvenOddParts{WeakValueSeries(series.grid, std::move(even)),
                        WeakValueSeries(series.grid, std::move(odd))};
}

SymmetryReport classify(const WeakValueSeries& series, double tolerance) {
    if (!(tolerance > 0.0)) {
        throw validation_error("classify: tolerance must be positive");
    }

    double sup = 0.0;
    for (const Complex& v : series.values) sup = std::max(sup, std::abs(v));

    SymmetryReport report{};
    report.tolerance = tolerance;

    if (sup == 0.0) {
        // Identically zero trace: both symmetries hold vacuously.
        report.verdict = Verdict::both;
        report.predicted_vanishing = VanishingPart::both;
        return report;
    }

    double re_even = 0.0, re_odd = 0.0, im_even = 0.0, im_odd = 0.0;
    const int n = series.grid.n();
    for (int k = 0; k < n; ++k) {
        const Complex here = series.values[k];
        const Complex mirror = series.values[series.grid.mirror_index(k)];
        // "even" residual = violation of evenness, i.e. the odd remainder,
        // and vice versa.
        re_even = std::max(re_even, std::abs(here.real() - mirror.real()));
        re_odd = std::max(re_odd, std::abs(here.real() + mirror.real()));
        im_even = std::max(im_even, std::abs(here.imag() - mirror.imag()));
        im_odd = std::max(im_odd, std::abs(here.imag() + mirror.imag()));
    }
    report.re_even_residual = re_even / sup;
    report.re_odd_residual = re_odd / sup;
    report.im_even_residual = im_even / sup;
    report.im_odd_residual = im_odd / sup;

    // conj(v(-tau)) - v(tau) has components (Re(-tau)-Re(tau)) and
    // -(Im(-tau)+Im(tau)): the PT residual is exactly the pair
    // (re_even, im_odd) in the max norm, and mirror-wise for anti-PT.
    report.pt_residual = std::max(report.re_even_residual, report.im_odd_residual);
    report.anti_pt_residual = std::max(report.re_odd_residual, report.im_even_residual);

    const bool pt = report.pt_residual <= tolerance;
    const bool anti = report.anti_pt_residual <= tolerance;
    if (pt && anti) {
        report.verdict = Verdict::both;
        report.predicted_vanishing = VanishingPart::both;
    } else if (pt) {
        report.verdict = Verdict::pt;
        report.predicted_vanishing = VanishingPart::imaginary_part;
    } else if (anti) {
        report.verdict = Verdict::anti_pt;
        report.predicted_vanishing = VanishingPart::real_part;
    } else {
        report.verdict = Verdict::neither;
        report.predicted_vanishing = VanishingPart::none;
    }
    return report;
}

CoefficientSeries pt_transform(const CoefficientSeries& coeff) {
    if (!coeff.coupling_even_certified) {
        throw validation_error(
            "pt_transform: coupling envelope not certified even about the grid center");
    }
    if (static_cast<int>(coeff.coeff.size()) != coeff.grid.n()) {
        throw validation_error("pt_transform: coefficient count does not match grid");
    }
    std::vector<Complex> out(coeff.coeff.size());
    for (int k = 0; k < coeff.grid.n(); ++k) {
        out[k] = std::conj(coeff.coeff[coeff.grid.mirror_index(k)]);
    }
    return CoefficientSeries{coeff.grid, std::move(out), coeff.picture,
                             coeff.coupling_even_certified};
}

namespace {

bool symmetric_within(const CoefficientSeries& coeff, double tolerance, double sign) {
    if (!(tolerance > 0.0)) {
        throw validation_error("symmetry test: tolerance must be positive");
    }
    const CoefficientSeries transformed = pt_transform(coeff);
    double sup = 0.0, residual = 0.0;
    for (std::size_t k = 0; k < coeff.coeff.size(); ++k) {
        sup = std::max(sup, std::abs(coeff.coeff[k]));
        residual = std::max(residual,
                            std::abs(transformed.coeff[k] - sign * coeff.coeff[k]));
    }
    return residual <= tolerance * sup;
}

}  // namespace

bool is_pt_symmetric(const CoefficientSeries& coeff, double tolerance) {
    return symmetric_within(coeff, tolerance, +1.0);
}

bool is_anti_pt_symmetric(const CoefficientSeries& coeff, double tolerance) {
    return symmetric_within(coeff, tolerance, -1.0);
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pt: return "PT";
        case Verdict::anti_pt: return "ANTI_PT";
        case Verdict::both: return "BOTH";
        case Verdict::neither: return "NEITHER";
    }
    return "?";
}

const char* to_string(VanishingPart p) {
    switch (p) {
        case VanishingPart::imaginary_part: return "IMAGINARY_PART";
        case VanishingPart::real_part: return "REAL_PART";
        case VanishingPart::both: return "BOTH";
        case VanishingPart::none: return "NONE";
    }
    return "?";
}

const char* to_string(Picture p) {
    switch (p) {
        case Picture::momentum_coupling: return "MOMENTUM_COUPLING";
        case Picture::position_coupling: return "POSITION_COUPLING";
    }
    return "?";
}

}  // namespace weakval
