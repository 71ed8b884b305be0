// oracle.hpp: exact finite-bath reference dynamics
//
// The continuum bath is replaced by N oscillators on equal-width frequency bins and the
// total quadratic Hamiltonian
//   H = p^2/2m + m w_S^2 q^2/2 + sum_k (p_k^2/2m_k + m_k w_k^2 q_k^2/2) + (q - mu p) sum_k c_k q_k
// is propagated exactly by its linear flow. Phase-space ordering is
// (q, p, q_1, p_1, ..., q_N, p_N).

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qbm/bath.hpp"
#include "qbm/conventions.hpp"
#include "qbm/grid.hpp"
#include "qbm/moments.hpp"

namespace qbm {

inline constexpr std::size_t kOracleModes = 600;
inline constexpr double kOracleCutoffFactor = 3.0;  // omega_max = 3 Omega
inline constexpr double kBinTolerance = 1e-3;

struct DiscreteBath {
    SpectralDensityParams params;
    std::vector<double> omegas;
    std::vector<double> couplings;
    std::vector<double> masses;
    double bin_width{0.0};
    double max_bin_error{0.0};  // worst relative midpoint-rule error of a bin weight

    std::size_t size() const noexcept { return omegas.size(); }
    // 2 pi / bin width; past it the discrete bath revives.
    double recurrence_time() const;
    // coth(beta w_k / 2), 2/(beta w_k) in the classical limit, 1 at T = 0.
    double thermal_factor(std::size_t k) const;
};

// Equal bins on (0, omega_max], mode at each midpoint with c_k^2 = 2 m_k w_k int_bin J.
// Throws ConvergenceError when a bin weight differs from its midpoint estimate
// J(w_k) dw by more than tolerance (relative), i.e. the bins are too coarse.
// N = 0 gives an empty bath.
DiscreteBath discretize_bath(const SpectralDensityParams& p, std::size_t modes, double omega_max,
                             double tolerance = kBinTolerance);

struct TotalGaussianState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // symmetrized: cov_ij = <{z_i, z_j}>/2 - <z_i><z_j>

    std::size_t modes() const noexcept { return static_cast<std::size_t>(mean.size() / 2 - 1); }
    // Throws DomainError unless cov is symmetric and cov + i Omega/2 is positive semidefinite.
    void validate(double tolerance = 1e-9) const;

    // System state times thermal modes, no initial correlations.
    static TotalGaussianState product(const GaussianState& system, const DiscreteBath& bath);
};

// Symplectic form for the interleaved ordering, blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(std::size_t modes);

// Generator A of the classical equations dz/dt = A z.
Eigen::MatrixXd flow_generator(const DiscreteBath& bath, const SystemConstants& consts);

// S(t) = exp(A t). Refuses t beyond the recurrence time.
Eigen::MatrixXd flow_matrix(const DiscreteBath& bath, const SystemConstants& consts, double t);

TotalGaussianState symplectic_evolve(const DiscreteBath& bath, const SystemConstants& consts,
                                     const TotalGaussianState& state0, double t);

// Partial trace over the bath: the system block of mean and covariance.
GaussianState reduced_moments(const TotalGaussianState& state);

// Reduced trajectory on a grid. Only the two system rows of S(t) are carried, advanced
// by right-multiplying with one exactly exponentiated step S(dt).
Trajectory oracle_trajectory(const DiscreteBath& bath, const SystemConstants& consts,
                             const GaussianState& system0, const TimeGrid& grid);

// max_n |a_n - b_n| / max_n |b_n| per moment (q_a, p_a, var_q, var_p, cov_qp), b the
// reference. Moments whose reference scale is below floor compare absolutely.
struct MomentDiscrepancy {
    double q_a{0.0}, p_a{0.0}, var_q{0.0}, var_p{0.0}, cov_qp{0.0};
    double worst() const noexcept;
};

MomentDiscrepancy compare_trajectories(const Trajectory& a, const Trajectory& reference, double floor = 1e-12);

}  // namespace qbm
