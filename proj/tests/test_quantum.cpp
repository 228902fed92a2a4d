#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "weakval/errors.hpp"
#include "weakval/quantum.hpp"

using namespace weakval;
using namespace testsupport;

TEST_CASE("state vectors enforce unit norm and minimum dimension") {
    Eigen::VectorXcd v(2);
    v << 1, 1;
    CHECK_THROWS_AS(StateVector{v}, validation_error);
    CHECK_NOTHROW(StateVector::normalized(v));

    const StateVector s = StateVector::normalized(v);
    CHECK(s.dim() == 2);
    CHECK(std::abs(s[0] - Complex(1.0 / std::sqrt(2.0), 0)) < 1e-15);

    Eigen::VectorXcd scalar(1);
    scalar << 1;
    CHECK_THROWS_AS(StateVector{scalar}, validation_error);

    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(3);
    CHECK_THROWS_AS(StateVector::normalized(zero), validation_error);
}

TEST_CASE("observables must be square and Hermitian") {
    CHECK_NOTHROW(Observable{pauli_y()});

    Eigen::MatrixXcd skew(2, 2);
    skew << 0, 1, -1, 0;
    CHECK_THROWS_AS(Observable{skew}, validation_error);

    Eigen::MatrixXcd rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(Observable{rect}, validation_error);
}

TEST_CASE("inner products conjugate the bra side") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const StateVector a = random_state(rng, 4);
        const StateVector b = random_state(rng, 4);
        CHECK(std::abs(inner(a, b) - std::conj(inner(b, a))) < 1e-14);
        CHECK(std::abs(inner(a, a) - Complex(1, 0)) < 1e-13);
    }

    Eigen::VectorXcd e0(2), plus(2);
    e0 << 1, 0;
    plus << 1, 1;
    const Complex ov = inner(StateVector(e0), StateVector::normalized(plus));
    CHECK(std::abs(ov - Complex(1.0 / std::sqrt(2.0), 0)) < 1e-15);
}

TEST_CASE("expectation values of known qubit states") {
    Eigen::VectorXcd e0(2), plus(2);
    e0 << 1, 0;
    plus << 1, 1;
    CHECK(expectation(StateVector(e0), Observable(pauli_z())) == doctest::Approx(1.0));
    CHECK(expectation(StateVector::normalized(plus), Observable(pauli_x())) ==
          doctest::Approx(1.0));
    CHECK(std::abs(expectation(StateVector(e0), Observable(pauli_x()))) < 1e-15);
}

TEST_CASE("evolution is unitary, composes, and reverses") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> dt(-10.0, 10.0);
    std::uniform_int_distribution<int> dims(2, 6);
    for (int i = 0; i < 200; ++i) {
        const int dim = dims(rng);
        const StateVector s = random_state(rng, dim);
        const Observable h = random_hermitian(rng, dim);
        const double t1 = dt(rng), t2 = dt(rng);

        const StateVector a = evolve(s, h, t1);
        CHECK(std::abs(a.amplitudes().norm() - 1.0) < 1e-12);

        const StateVector ab = evolve(a, h, t2);
        const StateVector direct = evolve(s, h, t1 + t2);
        CHECK((ab.amplitudes() - direct.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);

        const StateVector back = evolve(a, h, -t1);
        CHECK((back.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("evolution under sigma_z applies the expected phases") {
    Eigen::VectorXcd v(2);
    v << 1, 1;
    const StateVector s = StateVector::normalized(v);
    const double t = 0.7;
    const StateVector out = evolve(s, Observable(pauli_z()), t);
    const Complex expected0 = std::exp(Complex(0, -t)) / std::sqrt(2.0);
    const Complex expected1 = std::exp(Complex(0, t)) / std::sqrt(2.0);
    CHECK(std::abs(out[0] - expected0) < 1e-14);
    CHECK(std::abs(out[1] - expected1) < 1e-14);
}

TEST_CASE("evolution under sigma_x for a quarter period flips the basis state") {
    Eigen::VectorXcd e0(2);
    e0 << 1, 0;
    const double t = std::acos(-1.0) / 2.0;  // pi/2
    const StateVector out = evolve(StateVector(e0), Observable(pauli_x()), t);
    // exp(-i*sigma_x*pi/2) = -i*sigma_x
    CHECK(std::abs(out[0]) < 1e-14);
    CHECK(std::abs(out[1] - Complex(0, -1)) < 1e-14);
}

TEST_CASE("hbar rescales evolution time") {
    std::mt19937_64 rng(13);
    const StateVector s = random_state(rng, 3);
    const Observable h = random_hermitian(rng, 3);
    const StateVector a = evolve(s, h, 1.3, 2.0);
    const StateVector b = evolve(s, h, 0.65, 1.0);
    CHECK((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("zero generator and zero time are exact no-ops") {
    std::mt19937_64 rng(14);
    const StateVector s = random_state(rng, 4);
    const Observable h = random_hermitian(rng, 4);
    const Observable zero(Eigen::MatrixXcd::Zero(4, 4));

    const StateVector a = evolve(s, zero, 3.7);
    CHECK(a.amplitudes() == s.amplitudes());

    const StateVector b = evolve(s, h, 0.0);
    CHECK(b.amplitudes() == s.amplitudes());
}

TEST_CASE("evolution is phase-covariant under constant Hamiltonian shifts") {
    // H -> H + c*I multiplies the evolved state by a global phase
    // exp(-i*c*t/hbar) and leaves every expectation value unchanged.
    std::mt19937_64 rng(15);
    const StateVector s = random_state(rng, 3);
    const Observable h = random_hermitian(rng, 3);
    const Observable a = random_hermitian(rng, 3);
    const double c = 0.9, t = 2.1;
    const Observable shifted(h.matrix() +
                             c * Eigen::MatrixXcd::Identity(3, 3));

    const StateVector base = evolve(s, h, t);
    const StateVector moved = evolve(s, shifted, t);
    const Complex phase = std::exp(Complex(0, -c * t));
    CHECK((moved.amplitudes() - phase * base.amplitudes()).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK(expectation(moved, a) == doctest::Approx(expectation(base, a)).epsilon(1e-12));
}
