#include "weakval/fft.hpp"

#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "weakval/errors.hpp"

namespace weakval::fft {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution of separate
// plans is.  Sweep workers transform concurrently, so serialize the planner.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<Complex> transform(std::span<const Complex> in, int direction) {
    if (in.empty()) {
        throw validation_error("fft: empty input");
    }
    std::vector<Complex> out(in.size());
    // std::complex<double> is layout-compatible with fftw_complex.
    auto* in_ptr = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
    auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        // FFTW_ESTIMATE keeps the input untouched during planning.
        plan = fftw_plan_dft_1d(static_cast<int>(in.size()), in_ptr, out_ptr,
                                direction, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    if (plan == nullptr) {
        throw numeric_error("fft: planner failed");
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

std::vector<Complex> forward(std::span<const Complex> in) {
    return transform(in, FFTW_FORWARD);
}

std::vector<Complex> inverse(std::span<const Complex> in) {
    std::vector<Complex> out = transform(in, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(in.size());
    for (Complex& v : out) v *= scale;
    return out;
}

std::vector<double> momentum_grid(std::size_t n, double grid_step, double hbar) {
    if (n == 0 || !(grid_step > 0.0) || !(hbar > 0.0)) {
        throw validation_error("momentum_grid: need n > 0, grid_step > 0, hbar > 0");
    }
    const double unit = 2.0 * std::numbers::pi * hbar / (static_cast<double>(n) * grid_step);
    std::vector<double> p(n);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>((n + 1) / 2);
    for (std::size_t j = 0; j < n; ++j) {
        const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(j);
        p[j] = unit * static_cast<double>(idx < half ? idx : idx - static_cast<std::ptrdiff_t>(n));
    }
    return p;
}

}  // namespace weakval::fft
