// moments.hpp: first and second moments of Gaussian states and the bath double integrals

#pragma once

#include <cstddef>
#include <vector>

#include "qbm/conventions.hpp"
#include "qbm/greens.hpp"
#include "qbm/kernels.hpp"

namespace qbm {

// Slack allowed below the Heisenberg bound var_q var_p - cov_qp^2 >= 1/4.
inline constexpr double kHeisenbergSlack = 1e-9;

struct GaussianState {
    double q_a{1.0};
    double p_a{0.01};
    double var_q{0.5};
    double var_p{0.5};
    double cov_qp{0.0};

    // var_q var_p - cov_qp^2 - 1/4
    double heisenberg_margin() const noexcept { return var_q * var_p - cov_qp * cov_qp - 0.25; }
    void validate() const;

    // Uncorrelated minimum-uncertainty state with the given position variance.
    static GaussianState minimum_uncertainty(double q_a, double p_a, double var_q);
};

// g_i(t) = -w_i N_i(t) with N the double integrals
//   N11 = int int K(u - v) G3(u) G3(v), N22 with G6 G6, N12 with G3(u) G6(v),
// u, v in [0, t] and K(v - u) in N12.
struct NoiseIntegrals {
    TimeGrid grid;
    NoiseConvention convention{NoiseConvention::noise};
    std::vector<double> g1, g2, g3;
    std::vector<double> g1_dot, g2_dot, g3_dot;
};

NoiseIntegrals noise_integrals(const GreensFunctions& g, const KernelTable& kernels, NoiseConvention convention);

struct Means {
    double q_a;
    double p_a;
};

Means evolve_means(const GaussianState& state0, const GreensFunctions& g, std::size_t n);

// Full state at grid index n: means plus the covariance including the bath terms.
GaussianState evolve_state(const GaussianState& state0, const GreensFunctions& g, const NoiseIntegrals& noise,
                           std::size_t n);

struct Trajectory {
    TimeGrid grid;
    std::vector<GaussianState> states;
    double min_heisenberg_margin{0.0};
    std::size_t worst_index{0};

    bool physical() const noexcept { return min_heisenberg_margin >= -kHeisenbergSlack; }
};

Trajectory trajectory(const GaussianState& state0, const GreensFunctions& g, const NoiseIntegrals& noise);

// Throws ConvergenceError naming the time of the worst Heisenberg-bound violation.
void require_physical(const Trajectory& traj);

struct AsymptoticReport {
    GaussianState state;  // averages over the final window
    double drift{0.0};    // largest relative variation of any moment inside the window
    std::size_t window_start{0};
};

// Window averages over the final window_fraction of the run. The drift of a moment is
// (max - min) over the window divided by its scale: sqrt(var) for the means, |average|
// for the variances, sqrt(var_q var_p) for cov_qp. Throws ConvergenceError when the
// drift exceeds tolerance.
AsymptoticReport asymptotic_state(const Trajectory& traj, double window_fraction = 0.1,
                                  double tolerance = 1e-3);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace qbm
