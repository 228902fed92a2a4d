#pragma once

// Thin FFTW wrapper plus the momentum-grid bookkeeping used by the pointer
// module.
//
// Conventions: for n position samples q_k = q_min + k*step, the forward
// transform is the plain unnormalized DFT sum_k f_k exp(-2*pi*i*j*k/n).  Bin
// j corresponds to physical momentum
//
//   p_j = (2*pi*hbar / (n*step)) * j~ ,   j~ = j for j < (n+1)/2, else j - n
//
// (signed frequencies, standard FFT layout).  |F_j|^2 is then proportional
// to the momentum density at p_j, and multiplying bin j by g(p_j) applies
// g(p_op) to the band-limited interpolant of f.

#include <complex>
#include <span>
#include <vector>

namespace weakval::fft {

using Complex = std::complex<double>;

// Unnormalized forward DFT (exponent -2*pi*i*j*k/n).
std::vector<Complex> forward(std::span<const Complex> in);

// Inverse DFT including the 1/n factor, so inverse(forward(x)) == x up to
// rounding.
std::vector<Complex> inverse(std::span<const Complex> in);

// Signed physical momenta per FFT bin, in bin order.
std::vector<double> momentum_grid(std::size_t n, double grid_step, double hbar);

}  // namespace weakval::fft
