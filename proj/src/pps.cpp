#include "weakval/pps.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace weakval {

PpsScenario PpsScenario::make(StateVector pre, StateVector post, Observable h_pre,
                              Observable h_post, Observable obs, double pre_offset,
                              double post_offset, double hbar, double overlap_floor) {
    const Eigen::Index dim = pre.dim();
    if (post.dim() != dim || h_pre.dim() != dim || h_post.dim() != dim ||
        obs.dim() != dim) {
        throw validation_error("PpsScenario: states and operators must share one dimension");
    }
    if (pre_offset < 0.0 || post_offset < 0.0) {
        throw validation_error("PpsScenario: selection offsets must be >= 0");
    }
    if (!(hbar > 0.0)) {
        throw validation_error("PpsScenario: hbar must be positive");
    }
    if (!(overlap_floor > 0.0)) {
        throw validation_error("PpsScenario: overlap_floor must be positive");
    }
    return PpsScenario{std::move(pre),    std::move(post), std::move(h_pre),
                       std::move(h_post), std::move(obs),  pre_offset,
                       post_offset,       hbar,            overlap_floor};
}

TimeGrid::TimeGrid(double center, double half_width, int n)
    : center_(center), half_width_(half_width), n_(n) {
    if (!(half_width > 0.0)) {
        throw validation_error("TimeGrid: half_width must be positive");
    }
    if (n < 3 || n % 2 == 0) {
        throw validation_error("TimeGrid: n must be an odd integer >= 3, got " +
                               std::to_string(n));
    }
    step_ = 2.0 * half_width / (n - 1);
}

WeakValueSeries::WeakValueSeries(TimeGrid g, std::vector<Complex> v)
    : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.n()) {
        throw validation_error("WeakValueSeries: value count does not match grid");
    }
}

std::vector<double> WeakValueSeries::re_profile() const {
    std::vector<double> out(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) out[k] = values[k].real();
    return out;
}

std::vector<double> WeakValueSeries::im_profile() const {
    std::vector<double> out(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) out[k] = values[k].imag();
    return out;
}

BoundaryStates evolve_pps(const PpsScenario& s, double t) {
    return BoundaryStates{
        evolve(s.pre_state, s.pre_hamiltonian, t + s.pre_offset, s.hbar),
        evolve(s.post_state, s.post_hamiltonian, t - s.post_offset, s.hbar)};
}

namespace {

// <post(t)|X|pre(t)> / <post(t)|pre(t)> for an arbitrary (not necessarily
// Hermitian) matrix X.  Shared by the weak value, the weak energy, and the
// derivative, so the overlap-floor contract is enforced in one place.
Complex weak_ratio(const BoundaryStates& at_t, const Eigen::MatrixXcd& x, double t,
                   double overlap_floor) {
    const Complex denom = inner(at_t.post, at_t.pre);
    if (std::abs(denom) < overlap_floor) {
        throw near_orthogonality_error(
            "weak value undefined: |<post|pre>| = " + num_str(std::abs(denom)) +
                " < overlap floor " + num_str(overlap_floor) + " at t = " +
                num_str(t),
            std::abs(denom));
    }
    const Complex numer = at_t.post.amplitudes().dot(x * at_t.pre.amplitudes());
    return numer / denom;
}

}  // namespace

Complex weak_value(const PpsScenario& s, double t) {
    return weak_ratio(evolve_pps(s, t), s.observable.matrix(), t, s.overlap_floor);
}

WeakValueSeries weak_value_series(const PpsScenario& s, const TimeGrid& grid) {
    std::vector<Complex> values(grid.n());
    for (int k = 0; k < grid.n(); ++k) {
        values[k] = weak_value(s, grid.offset(k));
    }
    return WeakValueSeries(grid, std::move(values));
}

Complex weak_energy(const PpsScenario& s, double t) {
    const Eigen::MatrixXcd mismatch =
        s.post_hamiltonian.matrix() - s.pre_hamiltonian.matrix();
    return weak_ratio(evolve_pps(s, t), mismatch, t, s.overlap_floor);
}

Complex weak_value_derivative(const PpsScenario& s, double t) {
    const BoundaryStates at_t = evolve_pps(s, t);
    const Eigen::MatrixXcd& a = s.observable.matrix();
    const Eigen::MatrixXcd& h_pre = s.pre_hamiltonian.matrix();
    const Eigen::MatrixXcd& h_post = s.post_hamiltonian.matrix();

    const Complex cross = weak_ratio(at_t, h_post * a - a * h_pre, t, s.overlap_floor);
    const Complex energy = weak_ratio(at_t, h_post - h_pre, t, s.overlap_floor);
    const Complex aw = weak_ratio(at_t, a, t, s.overlap_floor);
    return Complex(0.0, 1.0 / s.hbar) * (cross - energy * aw);
}

}  // namespace weakval
