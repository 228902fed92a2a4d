#include "weakval/quantum.hpp"

#include <cmath>
#include <string>

namespace weakval {

StateVector::StateVector(Eigen::VectorXcd amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 2) {
        throw validation_error("StateVector: dimension must be >= 2, got " +
                               std::to_string(amps_.size()));
    }
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > tol::construction) {
        throw validation_error("StateVector: amplitudes not unit-norm (|norm - 1| = " +
                               num_str(std::abs(norm - 1.0)) +
                               "); use StateVector::normalized to rescale");
    }
}

StateVector StateVector::normalized(Eigen::VectorXcd amplitudes) {
    const double norm = amplitudes.norm();
    if (norm < 1e-300) {
        throw validation_error("StateVector::normalized: zero vector cannot be normalized");
    }
    return StateVector(amplitudes / norm);
}

Observable::Observable(Eigen::MatrixXcd matrix) : mat_(std::move(matrix)) {
    if (mat_.rows() != mat_.cols()) {
        throw validation_error("Observable: matrix must be square");
    }
    if (mat_.rows() < 2) {
        throw validation_error("Observable: dimension must be >= 2, got " +
                               std::to_string(mat_.rows()));
    }
    const double dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (dev > tol::construction) {
        throw validation_error("Observable: matrix not Hermitian (max |M - M^H| = " +
                               num_str(dev) + ")");
    }
}

Complex inner(const StateVector& bra, const StateVector& ket) {
    if (bra.dim() != ket.dim()) {
        throw validation_error("inner: dimension mismatch (" + std::to_string(bra.dim()) +
                               " vs " + std::to_string(ket.dim()) + ")");
    }
    return bra.amplitudes().dot(ket.amplitudes());  // Eigen's dot conjugates the lhs
}

double expectation(const StateVector& state, const Observable& obs) {
    if (state.dim() != obs.dim()) {
        throw validation_error("expectation: dimension mismatch");
    }
    const Complex value = state.amplitudes().dot(obs.matrix() * state.amplitudes());
    const double scale = std::max(1.0, obs.matrix().cwiseAbs().maxCoeff());
    if (std::abs(value.imag()) > tol::expectation_imag * scale) {
        throw numeric_error("expectation: imaginary residue " +
                            num_str(value.imag()) + " exceeds tolerance");
    }
    return value.real();
}

StateVector evolve(const StateVector& state, const Observable& hamiltonian,
                   double dt, double hbar) {
    if (state.dim() != hamiltonian.dim()) {
        throw validation_error("evolve: dimension mismatch");
    }
    if (!(hbar > 0.0)) {
        throw validation_error("evolve: hbar must be positive");
    }
    if (dt == 0.0 || hamiltonian.matrix().cwiseAbs().maxCoeff() == 0.0) {
        return state;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian.matrix());
    if (es.info() != Eigen::Success) {
        throw numeric_error("evolve: eigendecomposition failed");
    }
    // exp(-i H dt / hbar) |psi> = V exp(-i diag dt / hbar) V^H |psi>
    Eigen::VectorXcd in_eigenbasis = es.eigenvectors().adjoint() * state.amplitudes();
    for (Eigen::Index k = 0; k < in_eigenbasis.size(); ++k) {
        in_eigenbasis(k) *= std::exp(Complex(0.0, -es.eigenvalues()(k) * dt / hbar));
    }
    return StateVector(es.eigenvectors() * in_eigenbasis);
}

}  // namespace weakval
