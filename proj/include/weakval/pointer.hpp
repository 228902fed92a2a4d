#pragma once

// Measurement-pointer dynamics for weak PPS interactions.
//
// The interaction model is impulsive von Neumann coupling gamma(t) * A x p
// (momentum picture; position coupling mirrors it with roles swapped).  The
// module provides
//   * coupling envelopes (boxcar / gaussian / impulse) and the induced
//     pointer translation integral of gamma(t) * A_w(t),
//   * a 1-d wavepacket pointer on a uniform grid with spectral momentum
//     handling,
//   * first-order predictions for post-selected pointer means and variances
//     driven by Re/Im of the weak value,
//   * the exact post-selected pointer (spectral expansion over the coupled
//     observable) used as the oracle the predictions are tested against.

#include <complex>
#include <vector>

#include "weakval/pps.hpp"
#include "weakval/symmetry.hpp"

namespace weakval {

enum class CouplingKind { boxcar, gaussian, impulse };

// Even envelope gamma(t) centered at `center`, integrating to `strength`.
//   boxcar:   strength/width inside [center - width/2, center + width/2]
//   gaussian: strength * N(t; center, width^2)  (width = standard deviation)
//   impulse:  strength * delta(t - center)
// Evenness about the center is structural: evaluation only ever sees |t -
// center|, which is what makes the symmetry predictions exact.
struct CouplingProfile {
    CouplingKind kind;
    double strength;  // integrated coupling gamma_0 (any sign)
    double center;
    double width;  // boxcar full width / gaussian sigma; unused for impulse
    Picture picture;

    static CouplingProfile boxcar(double strength, double center, double width,
                                  Picture picture);
    static CouplingProfile gaussian(double strength, double center, double width,
                                    Picture picture);
    static CouplingProfile impulse(double strength, double center, Picture picture);
};

// Pointwise gamma(t).  Throws validation_error for impulse profiles, which
// have no pointwise density.
double coupling_eval(const CouplingProfile& c, double t);

// integral gamma(t) * A_w(t) dt over the series grid: the first-order
// complex pointer translation (of position for momentum coupling, of
// momentum for position coupling).  Boxcar windows must land on grid nodes
// (composite Simpson needs the discontinuity at a node); gaussian envelopes
// need the grid to cover at least six standard deviations.
Complex pointer_translation(const WeakValueSeries& series, const CouplingProfile& c);

// Closed-form boxcar translations of the two unit-modulus reference traces
//   PT:      A_w(t) = cos 2w(t-t0) + i sin 2w(t-t0)  ->  gamma0*sin(w*eps)/(w*eps)
//   anti-PT: A_w(t) = sin 2w(t-t0) + i cos 2w(t-t0)  ->  i*gamma0*sin(w*eps)/(w*eps)
enum class SymmetryExample { pt, anti_pt };
Complex closed_form_translation(SymmetryExample example, double gamma0, double omega,
                                double epsilon);

// 1-d wavepacket on a uniform position grid q_k = grid_min + k*grid_step.
// Invariants enforced at construction: unit discrete norm (sum |psi|^2 *
// step within tol::pointer_norm of 1) and negligible boundary amplitude
// (< tol::pointer_boundary relative to the peak), so spectral momentum
// operations see a wavepacket that genuinely lives inside the box.
class PointerState {
  public:
    PointerState(double grid_min, double grid_step, std::vector<Complex> psi,
                 double mass, double hbar);

    // Rescales to unit discrete norm first.
    static PointerState normalized(double grid_min, double grid_step,
                                   std::vector<Complex> psi, double mass, double hbar);

    int n() const { return static_cast<int>(psi_.size()); }
    double grid_min() const { return grid_min_; }
    double grid_step() const { return grid_step_; }
    double q(int k) const { return grid_min_ + k * grid_step_; }
    const std::vector<Complex>& psi() const { return psi_; }
    double mass() const { return mass_; }
    double hbar() const { return hbar_; }

  private:
    double grid_min_;
    double grid_step_;
    std::vector<Complex> psi_;
    double mass_;
    double hbar_;
};

// Normalized Gaussian wavepacket with the given position mean/variance and
// momentum mean.  The grid must cover at least ten standard deviations on
// both sides of center_q and resolve the packet (grid_step <= sigma/8).
PointerState gaussian_pointer(double center_q, double center_p, double var_q,
                              double grid_min, double grid_step, int n, double mass,
                              double hbar);

struct PointerMomentReport {
    double mean_q;
    double mean_p;
    double var_q;
    double var_p;
    double third_q;  // third central moments
    double third_p;
    double anticomm_qp;  // <{q,p}> - 2<q><p>
};

// Grid moments: position from |psi|^2, momentum from the FFT density,
// mixed moment via spectral application of p.  Checks the norm invariant
// and the uncertainty product.
PointerMomentReport pointer_moments(const PointerState& state);

// (p_op psi) sampled on the grid (spectral differentiation).
std::vector<Complex> momentum_apply(const PointerState& state);

enum class PointerAxis { position, momentum };

// The commutator/anticommutator functionals entering the first-order
// variance response:
//   F(M) = <[M^2,p]> - 2<M><[M,p]>          (imaginary; identically 0 for q,p)
//   G(M) = <{M^2,p}> - 2<M><{M,p}> - 2<p>(<M^2> - 2<M>^2)
Complex functional_f(const PointerState& state, PointerAxis axis);
double functional_g(const PointerState& state, PointerAxis axis);

// First-order post-selected moments for impulsive momentum coupling with
// integrated strength gamma0 and central weak value aw0:
//   mean q -> mean_q + gamma0*Re(aw0) + (gamma0/hbar)*Im(aw0)*anticomm_qp
//   mean p -> mean_p + 2*(gamma0/hbar)*Im(aw0)*var_p
//   var M  -> var_M + (gamma0/hbar)*Im(aw0)*G(M)
double predict_mean(const PointerState& state, PointerAxis axis, double gamma0,
                    Complex aw0);
double predict_variance(const PointerState& state, PointerAxis axis, double gamma0,
                        Complex aw0);

struct PostSelectedPointer {
    PointerState state;
    double probability;  // post-selection probability (squared norm before renormalizing)
};

// Exact post-selected pointer for the impulsive coupling at the scenario's
// measurement center: expand the initial packet over the eigenstates of the
// coupled observable, shift each branch by gamma0 * eigenvalue (applied in
// momentum space), weight by <post|a><a|pre>, and renormalize.
PostSelectedPointer exact_pointer(const PpsScenario& s, double gamma0,
                                  const PointerState& pointer);

// Weak-approximation pointer: multiply the momentum amplitudes by
// exp(-i*gamma0*aw0*p/hbar) and renormalize.  Complex aw0 reweights the
// momentum distribution; if the reweighted mass reaches the band edge the
// grid cannot represent the result and a numeric_error is thrown.
PointerState weak_approx_pointer(Complex aw0, double gamma0,
                                 const PointerState& pointer);

// gamma(t_k) * A_w(t_k) on the series grid.  The envelope is even about the
// grid center by construction, so the result is certified for pt_transform.
// Impulse profiles have no pointwise coefficient series.
CoefficientSeries coefficient_series(const WeakValueSeries& series,
                                     const CouplingProfile& c);

}  // namespace weakval
