#include "weakval/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "weakval/fft.hpp"

namespace weakval {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_width(double width, const char* kind) {
    if (!(width > 0.0)) {
        throw validation_error(std::string(kind) + " coupling: width must be positive");
    }
}

// Envelope value as a function of the *offset* from the center.  Working in
// offsets keeps gamma(center + tau) == gamma(center - tau) bit-exact, which
// the parity cancellations lean on.
double eval_at_offset(const CouplingProfile& c, double tau) {
    switch (c.kind) {
        case CouplingKind::boxcar:
            return std::abs(tau) <= 0.5 * c.width ? c.strength / c.width : 0.0;
        case CouplingKind::gaussian: {
            const double z = tau / c.width;
            return c.strength * std::exp(-0.5 * z * z) /
                   (c.width * std::sqrt(2.0 * kPi));
        }
        case CouplingKind::impulse:
            throw validation_error(
                "coupling_eval: impulse profiles have no pointwise density");
    }
    throw validation_error("coupling_eval: unknown kind");
}

// Composite Simpson over an odd number of uniformly spaced samples.
Complex simpson(const std::vector<Complex>& f, int first, int last, double h) {
    Complex acc = f[first] + f[last];
    for (int k = first + 1; k < last; ++k) {
        acc += f[k] * ((k - first) % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * (h / 3.0);
}

void require_centers_aligned(const TimeGrid& grid, const CouplingProfile& c,
                             const char* who) {
    if (std::abs(grid.center() - c.center) >
        1e-12 * std::max(1.0, std::abs(grid.center()))) {
        throw validation_error(std::string(who) +
                               ": coupling center does not match the grid center");
    }
}

}  // namespace

CouplingProfile CouplingProfile::boxcar(double strength, double center, double width,
                                        Picture picture) {
    require_positive_width(width, "boxcar");
    return CouplingProfile{CouplingKind::boxcar, strength, center, width, picture};
}

CouplingProfile CouplingProfile::gaussian(double strength, double center, double width,
                                          Picture picture) {
    require_positive_width(width, "gaussian");
    return CouplingProfile{CouplingKind::gaussian, strength, center, width, picture};
}

CouplingProfile CouplingProfile::impulse(double strength, double center,
                                         Picture picture) {
    return CouplingProfile{CouplingKind::impulse, strength, center, 0.0, picture};
}

double coupling_eval(const CouplingProfile& c, double t) {
    return eval_at_offset(c, t - c.center);
}

Complex pointer_translation(const WeakValueSeries& series, const CouplingProfile& c) {
    const TimeGrid& grid = series.grid;
    require_centers_aligned(grid, c, "pointer_translation");

    switch (c.kind) {
        case CouplingKind::impulse:
            return c.strength * series.values[grid.center_index()];

        case CouplingKind::boxcar: {
            const double ratio = 0.5 * c.width / grid.step();
            const long m = std::lround(ratio);
            if (m < 1) {
                throw numeric_error(
                    "pointer_translation: boxcar window narrower than the grid step");
            }
            if (std::abs(ratio - static_cast<double>(m)) >
                tol::grid_alignment * std::max(1.0, ratio)) {
                throw numeric_error(
                    "pointer_translation: boxcar window edges do not land on grid "
                    "nodes; refine the grid so that width/2 is a multiple of the step");
            }
            if (m > grid.center_index()) {
                throw numeric_error(
                    "pointer_translation: boxcar window extends beyond the grid");
            }
            const int ci = grid.center_index();
            const Complex integral = simpson(series.values, ci - static_cast<int>(m),
                                             ci + static_cast<int>(m), grid.step());
            return (c.strength / c.width) * integral;
        }

        case CouplingKind::gaussian: {
            if (grid.half_width() < 6.0 * c.width) {
                throw numeric_error(
                    "pointer_translation: grid covers less than six standard "
                    "deviations of the gaussian coupling");
            }
            std::vector<Complex> integrand(series.values.size());
            for (int k = 0; k < grid.n(); ++k) {
                integrand[k] = eval_at_offset(c, grid.offset(k)) * series.values[k];
            }
            return simpson(integrand, 0, grid.n() - 1, grid.step());
        }
    }
    throw validation_error("pointer_translation: unknown coupling kind");
}

Complex closed_form_translation(SymmetryExample example, double gamma0, double omega,
                                double epsilon) {
    if (omega == 0.0) {
        throw validation_error("closed_form_translation: omega must be nonzero");
    }
    if (!(epsilon > 0.0)) {
        throw validation_error("closed_form_translation: epsilon must be positive");
    }
    const double magnitude = gamma0 * std::sin(omega * epsilon) / (omega * epsilon);
    return example == SymmetryExample::pt ? Complex(magnitude, 0.0)
                                          : Complex(0.0, magnitude);
}

PointerState::PointerState(double grid_min, double grid_step, std::vector<Complex> psi,
                           double mass, double hbar)
    : grid_min_(grid_min),
      grid_step_(grid_step),
      psi_(std::move(psi)),
      mass_(mass),
      hbar_(hbar) {
    if (psi_.size() < 16) {
        throw validation_error("PointerState: need at least 16 grid samples");
    }
    if (!(grid_step_ > 0.0)) {
        throw validation_error("PointerState: grid_step must be positive");
    }
    if (!(mass_ > 0.0) || !(hbar_ > 0.0)) {
        throw validation_error("PointerState: mass and hbar must be positive");
    }
    double norm2 = 0.0;
    for (const Complex& v : psi_) norm2 += std::norm(v);
    norm2 *= grid_step_;
    if (std::abs(norm2 - 1.0) > tol::pointer_norm) {
        throw numeric_error("PointerState: discrete norm deviates from 1 by " +
                            num_str(std::abs(norm2 - 1.0)));
    }
    double peak = 0.0;
    for (const Complex& v : psi_) peak = std::max(peak, std::abs(v));
    const double edge = std::max(std::abs(psi_.front()), std::abs(psi_.back()));
    if (edge >= tol::pointer_boundary * peak) {
        throw numeric_error("PointerState: boundary amplitude " + num_str(edge) +
                            " too large; the wavepacket does not fit the grid");
    }
}

PointerState PointerState::normalized(double grid_min, double grid_step,
                                      std::vector<Complex> psi, double mass,
                                      double hbar) {
    double norm2 = 0.0;
    for (const Complex& v : psi) norm2 += std::norm(v);
    norm2 *= grid_step;
    if (norm2 < 1e-300) {
        throw validation_error("PointerState::normalized: zero wavefunction");
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (Complex& v : psi) v *= scale;
    return PointerState(grid_min, grid_step, std::move(psi), mass, hbar);
}

PointerState gaussian_pointer(double center_q, double center_p, double var_q,
                              double grid_min, double grid_step, int n, double mass,
                              double hbar) {
    if (!(var_q > 0.0)) {
        throw validation_error("gaussian_pointer: var_q must be positive");
    }
    if (n < 16 || !(grid_step > 0.0)) {
        throw validation_error("gaussian_pointer: need n >= 16 and a positive step");
    }
    const double sigma = std::sqrt(var_q);
    const double grid_max = grid_min + (n - 1) * grid_step;
    if (center_q - grid_min < 10.0 * sigma || grid_max - center_q < 10.0 * sigma) {
        throw validation_error(
            "gaussian_pointer: grid must cover at least ten standard deviations "
            "on both sides of center_q");
    }
    if (grid_step > sigma / 8.0) {
        throw validation_error("gaussian_pointer: grid_step too coarse for var_q");
    }
    std::vector<Complex> psi(n);
    for (int k = 0; k < n; ++k) {
        const double q = grid_min + k * grid_step;
        const double dq = q - center_q;
        psi[k] = std::exp(Complex(-dq * dq / (4.0 * var_q), center_p * q / hbar));
    }
    return PointerState::normalized(grid_min, grid_step, std::move(psi), mass, hbar);
}

namespace {

struct MomentumDensity {
    std::vector<double> p;       // bin momenta
    std::vector<double> weight;  // |psi~|^2 per bin (unnormalized)
    double total;
};

MomentumDensity momentum_density(const PointerState& state) {
    const std::vector<Complex> spectrum = fft::forward(state.psi());
    MomentumDensity d;
    d.p = fft::momentum_grid(spectrum.size(), state.grid_step(), state.hbar());
    d.weight.resize(spectrum.size());
    d.total = 0.0;
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
        d.weight[j] = std::norm(spectrum[j]);
        d.total += d.weight[j];
    }
    return d;
}

double raw_moment(const MomentumDensity& d, int order) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d.p.size(); ++j) {
        acc += std::pow(d.p[j], order) * d.weight[j];
    }
    return acc / d.total;
}

// <psi| f(q) (p psi)> with the discrete inner product; building block for
// commutator/anticommutator expectations against multiplication operators.
Complex mixed_expectation(const PointerState& state,
                          const std::vector<Complex>& p_psi, int q_power) {
    Complex acc = 0.0;
    for (int k = 0; k < state.n(); ++k) {
        acc += std::conj(state.psi()[k]) * std::pow(state.q(k), q_power) * p_psi[k];
    }
    return acc * state.grid_step();
}

}  // namespace

std::vector<Complex> momentum_apply(const PointerState& state) {
    std::vector<Complex> spectrum = fft::forward(state.psi());
    const std::vector<double> p =
        fft::momentum_grid(spectrum.size(), state.grid_step(), state.hbar());
    for (std::size_t j = 0; j < spectrum.size(); ++j) spectrum[j] *= p[j];
    return fft::inverse(spectrum);
}

PointerMomentReport pointer_moments(const PointerState& state) {
    double norm2 = 0.0;
    for (const Complex& v : state.psi()) norm2 += std::norm(v);
    norm2 *= state.grid_step();
    if (std::abs(norm2 - 1.0) > tol::pointer_norm) {
        throw numeric_error("pointer_moments: state norm invariant violated");
    }

    PointerMomentReport r{};
    double m1 = 0.0;
    for (int k = 0; k < state.n(); ++k) {
        m1 += state.q(k) * std::norm(state.psi()[k]);
    }
    m1 *= state.grid_step() / norm2;
    double v2 = 0.0, v3 = 0.0;
    for (int k = 0; k < state.n(); ++k) {
        const double dq = state.q(k) - m1;
        const double w = std::norm(state.psi()[k]);
        v2 += dq * dq * w;
        v3 += dq * dq * dq * w;
    }
    r.mean_q = m1;
    r.var_q = v2 * state.grid_step() / norm2;
    r.third_q = v3 * state.grid_step() / norm2;

    const MomentumDensity d = momentum_density(state);
    r.mean_p = raw_moment(d, 1);
    double p2 = 0.0, p3 = 0.0;
    for (std::size_t j = 0; j < d.p.size(); ++j) {
        const double dp = d.p[j] - r.mean_p;
        p2 += dp * dp * d.weight[j];
        p3 += dp * dp * dp * d.weight[j];
    }
    r.var_p = p2 / d.total;
    r.third_p = p3 / d.total;

    const std::vector<Complex> p_psi = momentum_apply(state);
    r.anticomm_qp =
        2.0 * mixed_expectation(state, p_psi, 1).real() - 2.0 * r.mean_q * r.mean_p;

    const double bound = 0.25 * state.hbar() * state.hbar();
    if (r.var_q * r.var_p < bound - tol::uncertainty_slack) {
        throw numeric_error("pointer_moments: uncertainty product below hbar^2/4");
    }
    return r;
}

Complex functional_f(const PointerState& state, PointerAxis axis) {
    if (axis == PointerAxis::momentum) {
        // [p^2, p] and [p, p] vanish as operators.
        return Complex(0.0, 0.0);
    }
    const std::vector<Complex> p_psi = momentum_apply(state);
    const PointerMomentReport m = pointer_moments(state);
    const Complex z1 = mixed_expectation(state, p_psi, 1);
    const Complex z2 = mixed_expectation(state, p_psi, 2);
    // <[q^k, p]> = 2i * Im <psi| q^k (p psi)> for Hermitian spectral p.
    return Complex(0.0, 2.0) * Complex(z2.imag() - 2.0 * m.mean_q * z1.imag(), 0.0);
}

double functional_g(const PointerState& state, PointerAxis axis) {
    const PointerMomentReport m = pointer_moments(state);
    if (axis == PointerAxis::momentum) {
        const double p1 = m.mean_p;
        const double p2_raw = m.var_p + p1 * p1;
        const double p3_raw = m.third_p + 3.0 * p1 * p2_raw - 2.0 * p1 * p1 * p1;
        return 2.0 * p3_raw - 6.0 * p1 * p2_raw + 4.0 * p1 * p1 * p1;
    }
    const std::vector<Complex> p_psi = momentum_apply(state);
    const Complex z1 = mixed_expectation(state, p_psi, 1);
    const Complex z2 = mixed_expectation(state, p_psi, 2);
    const double q2_raw = m.var_q + m.mean_q * m.mean_q;
    return 2.0 * z2.real() - 4.0 * m.mean_q * z1.real() -
           2.0 * m.mean_p * (q2_raw - 2.0 * m.mean_q * m.mean_q);
}

double predict_mean(const PointerState& state, PointerAxis axis, double gamma0,
                    Complex aw0) {
    const PointerMomentReport m = pointer_moments(state);
    const double k = gamma0 / state.hbar();
    if (axis == PointerAxis::position) {
        return m.mean_q + gamma0 * aw0.real() + k * aw0.imag() * m.anticomm_qp;
    }
    return m.mean_p + 2.0 * k * aw0.imag() * m.var_p;
}

double predict_variance(const PointerState& state, PointerAxis axis, double gamma0,
                        Complex aw0) {
    const PointerMomentReport m = pointer_moments(state);
    const double base = axis == PointerAxis::position ? m.var_q : m.var_p;
    // The F(M) term of the first-order variance response vanishes
    // identically for both q and p, leaving only the Im-part correction.
    return base + (gamma0 / state.hbar()) * aw0.imag() * functional_g(state, axis);
}

PostSelectedPointer exact_pointer(const PpsScenario& s, double gamma0,
                                  const PointerState& pointer) {
    if (std::abs(s.hbar - pointer.hbar()) > 1e-12 * s.hbar) {
        throw validation_error("exact_pointer: scenario and pointer disagree on hbar");
    }
    const BoundaryStates at_center = evolve_pps(s, 0.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.observable.matrix());
    if (es.info() != Eigen::Success) {
        throw numeric_error("exact_pointer: eigendecomposition failed");
    }
    const Eigen::Index dim = s.observable.dim();
    std::vector<Complex> branch(dim);
    for (Eigen::Index a = 0; a < dim; ++a) {
        const Eigen::VectorXcd vec = es.eigenvectors().col(a);
        branch[a] = at_center.post.amplitudes().dot(vec) *
                    vec.dot(at_center.pre.amplitudes());
    }

    std::vector<Complex> spectrum = fft::forward(pointer.psi());
    const std::vector<double> p =
        fft::momentum_grid(spectrum.size(), pointer.grid_step(), pointer.hbar());
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
        Complex transfer = 0.0;
        for (Eigen::Index a = 0; a < dim; ++a) {
            transfer += branch[a] * std::exp(Complex(0.0, -gamma0 * es.eigenvalues()(a) *
                                                              p[j] / pointer.hbar()));
        }
        spectrum[j] *= transfer;
    }
    const std::vector<Complex> unnormalized = fft::inverse(spectrum);

    double prob = 0.0;
    for (const Complex& v : unnormalized) prob += std::norm(v);
    prob *= pointer.grid_step();
    if (prob < s.overlap_floor * s.overlap_floor) {
        throw near_orthogonality_error(
            "exact_pointer: post-selection probability " + num_str(prob) +
                " below the squared overlap floor",
            std::sqrt(prob));
    }

    std::vector<Complex> psi = unnormalized;
    const double scale = 1.0 / std::sqrt(prob);
    for (Complex& v : psi) v *= scale;
    double peak = 0.0;
    for (const Complex& v : psi) peak = std::max(peak, std::abs(v));
    const double edge = std::max(std::abs(psi.front()), std::abs(psi.back()));
    if (edge >= tol::pointer_boundary * peak) {
        throw numeric_error(
            "exact_pointer: shifted pointer reaches the grid boundary; widen the "
            "grid or reduce gamma0");
    }
    return PostSelectedPointer{
        PointerState(pointer.grid_min(), pointer.grid_step(), std::move(psi),
                     pointer.mass(), pointer.hbar()),
        prob};
}

PointerState weak_approx_pointer(Complex aw0, double gamma0,
                                 const PointerState& pointer) {
    std::vector<Complex> spectrum = fft::forward(pointer.psi());
    const std::vector<double> p =
        fft::momentum_grid(spectrum.size(), pointer.grid_step(), pointer.hbar());

    // |exp(-i*gamma0*aw0*p/hbar)| = exp(gamma0*Im(aw0)*p/hbar): bail out in
    // log space before the reweighting can overflow.
    double p_max = 0.0;
    for (double v : p) p_max = std::max(p_max, std::abs(v));
    if (std::abs(gamma0 * aw0.imag()) * p_max / pointer.hbar() > 600.0) {
        throw numeric_error(
            "weak_approx_pointer: momentum reweighting overflows the grid band");
    }
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
        spectrum[j] *= std::exp(Complex(0.0, -1.0) * gamma0 * aw0 * p[j] / pointer.hbar());
    }

    // The reweighted distribution must still vanish near the band edge,
    // otherwise the grid aliases it.
    double peak = 0.0, edge = 0.0;
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
        const double a = std::abs(spectrum[j]);
        peak = std::max(peak, a);
        if (std::abs(p[j]) > 0.9 * p_max) edge = std::max(edge, a);
    }
    if (edge > tol::pointer_boundary * peak) {
        throw numeric_error(
            "weak_approx_pointer: reweighted momentum distribution escapes the "
            "resolvable band");
    }

    return PointerState::normalized(pointer.grid_min(), pointer.grid_step(),
                                    fft::inverse(spectrum), pointer.mass(),
                                    pointer.hbar());
}

CoefficientSeries coefficient_series(const WeakValueSeries& series,
                                     const CouplingProfile& c) {
    if (c.kind == CouplingKind::impulse) {
        throw validation_error(
            "coefficient_series: impulse profiles have no pointwise coefficient");
    }
    require_centers_aligned(series.grid, c, "coefficient_series");
    std::vector<Complex> coeff(series.values.size());
    for (int k = 0; k < series.grid.n(); ++k) {
        coeff[k] = eval_at_offset(c, series.grid.offset(k)) * series.values[k];
    }
    return CoefficientSeries{series.grid, std::move(coeff), c.picture,
                             /*coupling_even_certified=*/true};
}

}  // namespace weakval
