// kernels.hpp: the bath two-point kernels sampled once on the time grid

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qbm/bath.hpp"
#include "qbm/grid.hpp"

namespace qbm {

// Samples below this fraction of the kernel maximum count as zero memory.
inline constexpr double kMemoryCutoff = 1e-12;

// spectral: trapezoid in frequency folded into one real FFT per series, for integer s.
// quadrature: adaptive oscillatory quadrature per sample.
// automatic: spectral for integer s, quadrature otherwise.
enum class KernelMethod { automatic, spectral, quadrature };

std::string to_string(KernelMethod m);
KernelMethod parse_kernel_method(std::string_view text);

struct KernelTable {
    SpectralDensityParams params;
    TimeGrid grid;
    std::vector<double> re;       // D_re(t_n)
    std::vector<double> re_rate;  // d/dt D_re
    std::vector<double> im;       // D_im(t_n), D_im(0) = 0
    std::vector<double> im_rate;  // d/dt D_im
    // Number of leading samples that carry the memory; later ones are below kMemoryCutoff.
    std::size_t re_memory{0};
    std::size_t im_memory{0};

    static KernelTable build(const SpectralDensityParams& p, const TimeGrid& grid,
                             KernelMethod method = KernelMethod::automatic);
};

// Index one past the last sample whose magnitude reaches cutoff * max over both series.
std::size_t memory_length(const std::vector<double>& a, const std::vector<double>& b, double cutoff);

}  // namespace qbm
