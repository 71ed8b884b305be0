#include "qbm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qbm/errors.hpp"

namespace qbm {

double DiscreteBath::recurrence_time() const {
    return bin_width > 0.0 ? 2.0 * std::numbers::pi / bin_width : std::numeric_limits<double>::infinity();
}

double DiscreteBath::thermal_factor(std::size_t k) const {
    const double w = omegas.at(k);
    if (params.zero_temperature()) return 1.0;
    if (params.infinite_temperature) return 2.0 / (params.beta * w);
    return 1.0 / std::tanh(0.5 * params.beta * w);
}

DiscreteBath discretize_bath(const SpectralDensityParams& p, std::size_t modes, double omega_max,
                             double tolerance) {
    p.validate();
    if (!(omega_max > 0.0)) throw DomainError("omega_max must be positive");
    DiscreteBath bath;
    bath.params = p;
    if (modes == 0) return bath;
    bath.bin_width = omega_max / static_cast<double>(modes);
    const double total = spectral_weight(0.0, omega_max, p);
    for (std::size_t k = 0; k < modes; ++k) {
        const double lo = static_cast<double>(k) * bath.bin_width;
        const double hi = lo + bath.bin_width;
        const double w = 0.5 * (lo + hi);
        const double weight = p.gamma > 0.0 ? spectral_weight(lo, hi, p) : 0.0;
        if (weight > 1e-12 * total) {
            const double midpoint = spectral_density(w, p) * bath.bin_width;
            bath.max_bin_error = std::max(bath.max_bin_error, std::abs(midpoint - weight) / weight);
        }
        bath.omegas.push_back(w);
        bath.masses.push_back(1.0);
        bath.couplings.push_back(std::sqrt(2.0 * w * weight));
    }
    if (bath.max_bin_error > tolerance) {
        throw ConvergenceError("bath discretization too coarse: bin weight error " +
                                   std::to_string(bath.max_bin_error) + " with N = " + std::to_string(modes),
                               bath.max_bin_error);
    }
    return bath;
}

void TotalGaussianState::validate(double tolerance) const {
    const auto dim = mean.size();
    if (dim < 2 || dim % 2 != 0 || cov.rows() != dim || cov.cols() != dim) {
        throw DomainError("total state dimensions are inconsistent");
    }
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > tolerance * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
        throw DomainError("total covariance is not symmetric");
    }
    const Eigen::MatrixXd omega = symplectic_form(modes());
    const Eigen::MatrixXcd h = cov.cast<std::complex<double>>() + std::complex<double>(0.0, 0.5) * omega;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -tolerance) {
        throw DomainError("total covariance violates the uncertainty relation");
    }
}

TotalGaussianState TotalGaussianState::product(const GaussianState& system, const DiscreteBath& bath) {
    system.validate();
    const auto dim = static_cast<Eigen::Index>(2 * bath.size() + 2);
    TotalGaussianState s;
    s.mean = Eigen::VectorXd::Zero(dim);
    s.cov = Eigen::MatrixXd::Zero(dim, dim);
    s.mean(0) = system.q_a;
    s.mean(1) = system.p_a;
    s.cov(0, 0) = system.var_q;
    s.cov(1, 1) = system.var_p;
    s.cov(0, 1) = s.cov(1, 0) = system.cov_qp;
    for (std::size_t k = 0; k < bath.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k + 2);
        const double w = bath.omegas[k];
        const double m = bath.masses[k];
        const double f = bath.thermal_factor(k);
        s.cov(i, i) = f / (2.0 * m * w);
        s.cov(i + 1, i + 1) = f * m * w / 2.0;
    }
    return s;
}

Eigen::MatrixXd symplectic_form(std::size_t modes) {
    const auto dim = static_cast<Eigen::Index>(2 * modes + 2);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; i += 2) {
        omega(i, i + 1) = 1.0;
        omega(i + 1, i) = -1.0;
    }
    return omega;
}

Eigen::MatrixXd flow_generator(const DiscreteBath& bath, const SystemConstants& consts) {
    const auto dim = static_cast<Eigen::Index>(2 * bath.size() + 2);
    const double m = consts.mass;
    const double mu = consts.mu;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    // dq/dt = p/m - mu sum c_k q_k, dp/dt = -m w^2 q - sum c_k q_k
    a(0, 1) = 1.0 / m;
    a(1, 0) = -m * consts.omega_s * consts.omega_s;
    for (std::size_t k = 0; k < bath.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k + 2);
        const double c = bath.couplings[k];
        const double mk = bath.masses[k];
        const double wk = bath.omegas[k];
        a(0, i) = -mu * c;
        a(1, i) = -c;
        // dq_k/dt = p_k/m_k, dp_k/dt = -m_k w_k^2 q_k - c_k (q - mu p)
        a(i, i + 1) = 1.0 / mk;
        a(i + 1, i) = -mk * wk * wk;
        a(i + 1, 0) = -c;
        a(i + 1, 1) = mu * c;
    }
    return a;
}

namespace {

void check_recurrence(const DiscreteBath& bath, double t) {
    if (t < 0.0) throw DomainError("oracle time must be non-negative");
    if (t > bath.recurrence_time()) {
        throw RecurrenceError("t = " + std::to_string(t) + " exceeds the recurrence time " +
                              std::to_string(bath.recurrence_time()) + " of the discrete bath");
    }
}

}  // namespace

Eigen::MatrixXd flow_matrix(const DiscreteBath& bath, const SystemConstants& consts, double t) {
    check_recurrence(bath, t);
    const Eigen::MatrixXd a = flow_generator(bath, consts) * t;
    return a.exp();
}

TotalGaussianState symplectic_evolve(const DiscreteBath& bath, const SystemConstants& consts,
                                     const TotalGaussianState& state0, double t) {
    if (state0.modes() != bath.size()) throw DomainError("state and bath mode counts differ");
    const Eigen::MatrixXd s = flow_matrix(bath, consts, t);
    TotalGaussianState out;
    out.mean = s * state0.mean;
    out.cov = s * state0.cov * s.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

GaussianState reduced_moments(const TotalGaussianState& state) {
    GaussianState s;
    s.q_a = state.mean(0);
    s.p_a = state.mean(1);
    s.var_q = state.cov(0, 0);
    s.var_p = state.cov(1, 1);
    s.cov_qp = state.cov(0, 1);
    return s;
}

Trajectory oracle_trajectory(const DiscreteBath& bath, const SystemConstants& consts,
                             const GaussianState& system0, const TimeGrid& grid) {
    check_recurrence(bath, grid.end());
    const TotalGaussianState s0 = TotalGaussianState::product(system0, bath);
    const Eigen::MatrixXd step = (flow_generator(bath, consts) * grid.dt).exp();
    const Eigen::VectorXd var0 = s0.cov.diagonal();

    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(2, s0.mean.size());
    rows(0, 0) = 1.0;
    rows(1, 1) = 1.0;
    Trajectory traj;
    traj.grid = grid;
    traj.states.reserve(grid.size());
    traj.min_heisenberg_margin = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (n > 0) rows = (rows * step).eval();
        const Eigen::Vector2d mean = rows * s0.mean;
        // Initial covariance is diagonal apart from the system (q, p) entry.
        Eigen::Matrix2d cov = rows * var0.asDiagonal() * rows.transpose();
        const double x = s0.cov(0, 1);
        cov(0, 0) += 2.0 * x * rows(0, 0) * rows(0, 1);
        cov(1, 1) += 2.0 * x * rows(1, 0) * rows(1, 1);
        const double cross = x * (rows(0, 0) * rows(1, 1) + rows(0, 1) * rows(1, 0));
        GaussianState st{mean(0), mean(1), cov(0, 0), cov(1, 1), cov(0, 1) + cross};
        const double margin = st.heisenberg_margin();
        if (margin < traj.min_heisenberg_margin) {
            traj.min_heisenberg_margin = margin;
            traj.worst_index = n;
        }
        traj.states.push_back(st);
    }
    return traj;
}

double MomentDiscrepancy::worst() const noexcept { return std::max({q_a, p_a, var_q, var_p, cov_qp}); }

MomentDiscrepancy compare_trajectories(const Trajectory& a, const Trajectory& reference, double floor) {
    if (a.states.size() != reference.states.size()) {
        throw DomainError("trajectories have different lengths");
    }
    auto measure = [&](double GaussianState::*member) {
        double diff = 0.0;
        double scale = 0.0;
        for (std::size_t n = 0; n < a.states.size(); ++n) {
            diff = std::max(diff, std::abs(a.states[n].*member - reference.states[n].*member));
            scale = std::max(scale, std::abs(reference.states[n].*member));
        }
        return scale > floor ? diff / scale : diff;
    };
    MomentDiscrepancy d;
    d.q_a = measure(&GaussianState::q_a);
    d.p_a = measure(&GaussianState::p_a);
    d.var_q = measure(&GaussianState::var_q);
    d.var_p = measure(&GaussianState::var_p);
    d.cov_qp = measure(&GaussianState::cov_qp);
    return d;
}

}  // namespace qbm
