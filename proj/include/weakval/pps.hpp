#pragma once

// Pre/post-selected (PPS) two-state scenarios and time-dependent weak
// values.
//
// Time convention: a scenario is anchored at the measurement center.  The
// stored pre_state is the boundary state selected pre_offset before the
// center, the stored post_state is selected post_offset after it, and every
// operation below takes the measurement time t *relative to that center*.
// Both boundary states propagate forward in time under the standard
// Schrodinger sign (-i/hbar) with their own generators, so the state pair at
// measurement time t is
//
//   pre_at(t)  = exp(-i*H_pre *(t + pre_offset) /hbar) |pre>
//   post_at(t) = exp(-i*H_post*(t - post_offset)/hbar) |post>
//
// i.e. the post-selected state is carried *backward* from its later
// selection.  Sweeping t re-selects the pair at every sample, which is what
// makes the weak value genuinely time dependent even for fixed offsets.

#include <complex>
#include <vector>

#include "weakval/quantum.hpp"

namespace weakval {

struct PpsScenario {
    StateVector pre_state;
    StateVector post_state;
    Observable pre_hamiltonian;   // generates the pre-selected branch
    Observable post_hamiltonian;  // generates the post-selected branch
    Observable observable;        // the weakly measured operator
    double pre_offset = 0.0;      // >= 0, selection happens this long before t
    double post_offset = 0.0;     // >= 0, selection happens this long after t
    double hbar = 1.0;
    double overlap_floor = tol::default_overlap_floor;

    // Validates dimensions and parameter signs; throws validation_error.
    static PpsScenario make(StateVector pre, StateVector post, Observable h_pre,
                            Observable h_post, Observable obs, double pre_offset,
                            double post_offset, double hbar,
                            double overlap_floor = tol::default_overlap_floor);
};

// Uniform, mirror-symmetric sampling window: n odd samples centered on
// `center`, spanning [center - half_width, center + half_width].  Sample
// offsets are computed as integer multiples of step so that every sample
// center + tau has an exact mirror partner center - tau.
class TimeGrid {
  public:
    TimeGrid(double center, double half_width, int n);

    double center() const { return center_; }
    double half_width() const { return half_width_; }
    int n() const { return n_; }
    double step() const { return step_; }
    int center_index() const { return (n_ - 1) / 2; }
    int mirror_index(int k) const { return n_ - 1 - k; }

    // Signed offset from the center; exact negation across mirror pairs.
    double offset(int k) const { return (k - center_index()) * step_; }
    double time(int k) const { return center_ + offset(k); }

  private:
    double center_;
    double half_width_;
    int n_;
    double step_;
};

// A complex-valued trace sampled on a TimeGrid.
struct WeakValueSeries {
    TimeGrid grid;
    std::vector<Complex> values;

    WeakValueSeries(TimeGrid g, std::vector<Complex> v);

    std::vector<double> re_profile() const;
    std::vector<double> im_profile() const;
};

struct BoundaryStates {
    StateVector pre;
    StateVector post;
};

// The boundary pair carried to measurement time t (relative to the anchor).
BoundaryStates evolve_pps(const PpsScenario& s, double t);

// <post(t)|A|pre(t)> / <post(t)|pre(t)>.  Throws near_orthogonality_error
// when |<post(t)|pre(t)>| < overlap_floor.
Complex weak_value(const PpsScenario& s, double t);

// weak_value at every grid sample (offsets relative to the grid center).
WeakValueSeries weak_value_series(const PpsScenario& s, const TimeGrid& grid);

// Weak expectation of the generator mismatch H_post - H_pre.
Complex weak_energy(const PpsScenario& s, double t);

// Analytic time derivative of the weak value:
//   (i/hbar) * [ W(H_post*A - A*H_pre) - W(H_post - H_pre) * A_w(t) ]
// where W(X) = <post(t)|X|pre(t)> / <post(t)|pre(t)>.  Reduces to
// (i/hbar)<[H,A]> when both generators coincide and pre == post.
Complex weak_value_derivative(const PpsScenario& s, double t);

}  // namespace weakval
