#pragma once

// Finite-dimensional Hilbert-space primitives: normalized state vectors,
// Hermitian observables, inner products, expectation values, and unitary
// evolution.  Evolution goes through the eigendecomposition of the
// (Hermitian) generator, which is exact up to rounding for the small
// dimensions this library targets.
//
// All types are immutable after construction and all functions are pure, so
// everything here can be called from concurrent workers without locking.

#include <complex>

#include <Eigen/Dense>

#include "weakval/errors.hpp"
#include "weakval/tolerances.hpp"

namespace weakval {

using Complex = std::complex<double>;

// Unit-norm complex vector, dimension >= 2.  The constructor enforces the
// norm to tol::construction; use normalized() to rescale arbitrary
// amplitudes first.  Global phase is meaningful and never stripped: weak
// values are ratios and downstream code relies on phase covariance.
class StateVector {
  public:
    explicit StateVector(Eigen::VectorXcd amplitudes);

    // Rescales to unit norm, then constructs.  Throws on (near-)zero input.
    static StateVector normalized(Eigen::VectorXcd amplitudes);

    Eigen::Index dim() const { return amps_.size(); }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    Complex operator[](Eigen::Index i) const { return amps_(i); }

  private:
    Eigen::VectorXcd amps_;
};

// Hermitian matrix, dimension >= 2.  Hermiticity is checked elementwise at
// construction (max |M - M^dagger| <= tol::construction), so any Observable
// handed around later is safe to diagonalize with a self-adjoint solver.
class Observable {
  public:
    explicit Observable(Eigen::MatrixXcd matrix);

    Eigen::Index dim() const { return mat_.rows(); }
    const Eigen::MatrixXcd& matrix() const { return mat_; }

  private:
    Eigen::MatrixXcd mat_;
};

// <bra|ket> with the conjugation on the bra argument.
Complex inner(const StateVector& bra, const StateVector& ket);

// <psi|A|psi>.  The value is real for Hermitian A; the imaginary residue is
// checked against tol::expectation_imag (scaled by the matrix magnitude) and
// discarded.
double expectation(const StateVector& state, const Observable& obs);

// exp(-i*H*dt/hbar)|psi> via the eigendecomposition of H.  dt of either sign
// is allowed; hbar must be positive.  dt == 0 and H == 0 return the input
// amplitudes unchanged.
StateVector evolve(const StateVector& state, const Observable& hamiltonian,
                   double dt, double hbar = 1.0);

}  // namespace weakval
