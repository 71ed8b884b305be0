// greens.hpp: memory Green's function G, the six propagators, the averaged Green's
// function and the F, H1, H2 combinations built from them

#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qbm/conventions.hpp"
#include "qbm/grid.hpp"
#include "qbm/kernels.hpp"

namespace qbm {

// |F| below this marks a grid time as singular for the master-equation coefficients.
inline constexpr double kSingularF = 1e-6;

struct GreensFunctions {
    TimeGrid grid;
    SystemConstants consts;

    std::vector<double> G, G_dot, G_ddot;
    // I = int_0^t sign*D_im(t-s) G(s) ds, the memory term shared by G1, G2, G4, G5.
    std::vector<double> I, I_dot;

    std::vector<double> G1, G2, G3, G4, G5, G6;
    std::vector<double> G1_dot, G2_dot, G3_dot, G4_dot, G5_dot, G6_dot;

    std::vector<std::complex<double>> Gbar, Gbar_dot;
    std::vector<double> F;
    std::vector<std::complex<double>> H1, H2;
    std::vector<std::uint8_t> singular;

    // H1, H2 rebuilt from the dissipative average -2 * int sign*D_im G, the part of
    // the averaged Green's function that enters the drift of the moments.
    double dissipative_H1(std::size_t n) const;
    double dissipative_H2(std::size_t n) const;
};

// G on the grid from G'' + w^2 G + (2/m') int_0^t sign*D_im(t-s) G(s) ds = 0, G(0) = 0,
// G'(0) = 1. Implicit fourth-order Adams-Moulton steps, the memory integral by the
// corrected trapezoid rule, a power-series start and G'' taken from the equation.
GreensFunctions solve_memory_green(const KernelTable& kernels, const SystemConstants& consts);

void build_propagators(GreensFunctions& g, const KernelTable& kernels);
void average_green(GreensFunctions& g, const KernelTable& kernels);
void auxiliary_functions(GreensFunctions& g);

// All of the above in order.
GreensFunctions compute_greens(const KernelTable& kernels, const SystemConstants& consts);

// Largest relative change of G, G' and G1..G6 (max-norm over the run) when dt is halved,
// taken over two successive halvings. Throws ConvergenceError above tolerance.
double verify_green_convergence(const SpectralDensityParams& p, const SystemConstants& consts,
                                const TimeGrid& grid, double tolerance = 1e-3);

// One row per grid time: t, G, G', G'', G1..G6, Re/Im Gbar, F, Re/Im H1, Re/Im H2, singular.
void write_greens_csv(std::ostream& out, const GreensFunctions& g);

}  // namespace qbm
