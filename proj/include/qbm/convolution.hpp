// convolution.hpp: causal memory integrals and cumulative quadrature on a uniform grid

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qbm {

// c_n = int_0^{t_n} K(t_n - s) a(s) ds for n = 0..N.
// Trapezoid with the first Euler-Maclaurin endpoint correction, which needs the
// derivatives K' and a'. Kernel samples at index >= memory are treated as zero.
// Long memories go through FFTW, short ones are summed directly.
std::vector<double> causal_convolution(std::span<const double> kernel, std::span<const double> kernel_rate,
                                       std::size_t memory, std::span<const double> a,
                                       std::span<const double> a_rate, double dt);

// Drives a causal recurrence x_n = step(n, h_n) with h_n = sum_{d=1}^{n} k_d x_{n-d}
// (kernel zero from index memory on). step(n, h_n) must store x[n] before returning.
// Long memories use a divide-and-conquer blocking with FFT block products, O(N log^2 N).
void online_convolution(std::span<const double> kernel, std::size_t memory, std::vector<double>& x,
                        const std::function<void(std::size_t, double)>& step);

// F_n = int_0^{t_n} f, fourth order (cubic through the four nearest samples per cell).
std::vector<double> cumulative_integral(std::span<const double> f, double dt);

}  // namespace qbm
