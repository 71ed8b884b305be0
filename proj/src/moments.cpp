#include "qbm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "qbm/convolution.hpp"
#include "qbm/errors.hpp"

namespace qbm {

void GaussianState::validate() const {
    if (!(var_q > 0.0) || !(var_p > 0.0)) throw DomainError("Gaussian state needs positive variances");
    if (heisenberg_margin() < -kHeisenbergSlack) {
        throw DomainError("Gaussian state violates var_q var_p - cov_qp^2 >= 1/4");
    }
}

GaussianState GaussianState::minimum_uncertainty(double q_a, double p_a, double var_q) {
    GaussianState s{q_a, p_a, var_q, 0.25 / var_q, 0.0};
    s.validate();
    return s;
}

NoiseIntegrals noise_integrals(const GreensFunctions& g, const KernelTable& kernels, NoiseConvention convention) {
    if (!(kernels.grid == g.grid)) throw DomainError("kernel table and Green's function grids differ");
    const std::size_t size = g.grid.size();
    const double h = g.grid.dt;
    const double m = g.consts.mass;
    const double mu = g.consts.mu;

    const bool odd = convention == NoiseConvention::printed;
    const double w_diag = convention == NoiseConvention::noise ? 0.5 : 0.25;
    const double w_cross = convention == NoiseConvention::noise ? 1.0 : 0.5;

    const auto& K = odd ? kernels.im : kernels.re;
    const auto& Kr = odd ? kernels.im_rate : kernels.re_rate;
    const std::size_t memory = odd ? kernels.im_memory : kernels.re_memory;

    const auto c3 = causal_convolution(K, Kr, memory, g.G3, g.G3_dot, h);
    const auto c6 = causal_convolution(K, Kr, memory, g.G6, g.G6_dot, h);

    std::vector<double> n11_dot(size, 0.0), n22_dot(size, 0.0), n12_dot(size, 0.0);
    std::vector<double> n12(size, 0.0);
    if (odd) {
        for (std::size_t n = 0; n < size; ++n) n12_dot[n] = g.G6[n] * c3[n] - g.G3[n] * c6[n];
        n12 = cumulative_integral(n12_dot, h);
    } else {
        // N12 = m G3 c3 + R keeps the mu = 0 reduction exact: there r = G6 - m G3' vanishes
        // identically and so does R.
        const double w2 = g.consts.omega_green * g.consts.omega_green;
        const double coupling = 2.0 / g.consts.m_prime;
        std::vector<double> r(size), r_dot(size);
        for (std::size_t n = 0; n < size; ++n) {
            const double G_dddot = -w2 * g.G_dot[n] - coupling * g.I_dot[n];
            const double G3_ddot = g.G_ddot[n] / m + mu * G_dddot;
            r[n] = g.G6[n] - m * g.G3_dot[n];
            r_dot[n] = g.G6_dot[n] - m * G3_ddot;
        }
        const auto cr = causal_convolution(K, Kr, memory, r, r_dot, h);
        std::vector<double> rest_dot(size);
        for (std::size_t n = 0; n < size; ++n) {
            const double k = n < memory ? K[n] : 0.0;
            n11_dot[n] = 2.0 * g.G3[n] * c3[n];
            n22_dot[n] = 2.0 * g.G6[n] * c6[n];
            n12_dot[n] = g.G3[n] * c6[n] + g.G6[n] * c3[n];
            rest_dot[n] = g.G3[n] * cr[n] + r[n] * c3[n] - m * mu * k * g.G3[n];
        }
        const auto rest = cumulative_integral(rest_dot, h);
        for (std::size_t n = 0; n < size; ++n) n12[n] = m * g.G3[n] * c3[n] + rest[n];
    }
    const auto n11 = cumulative_integral(n11_dot, h);
    const auto n22 = cumulative_integral(n22_dot, h);

    NoiseIntegrals out;
    out.grid = g.grid;
    out.convention = convention;
    out.g1.resize(size);
    out.g2.resize(size);
    out.g3.resize(size);
    out.g1_dot.resize(size);
    out.g2_dot.resize(size);
    out.g3_dot.resize(size);
    for (std::size_t n = 0; n < size; ++n) {
        out.g1[n] = -w_diag * n11[n];
        out.g2[n] = -w_diag * n22[n];
        out.g3[n] = -w_cross * n12[n];
        out.g1_dot[n] = -w_diag * n11_dot[n];
        out.g2_dot[n] = -w_diag * n22_dot[n];
        out.g3_dot[n] = -w_cross * n12_dot[n];
    }
    return out;
}

Means evolve_means(const GaussianState& s, const GreensFunctions& g, std::size_t n) {
    return {g.G1[n] * s.q_a + g.G2[n] * s.p_a, g.G4[n] * s.q_a + g.G5[n] * s.p_a};
}

GaussianState evolve_state(const GaussianState& s, const GreensFunctions& g, const NoiseIntegrals& noise,
                           std::size_t n) {
    const double G1 = g.G1[n], G2 = g.G2[n], G4 = g.G4[n], G5 = g.G5[n];
    const Means m = evolve_means(s, g, n);
    GaussianState out;
    out.q_a = m.q_a;
    out.p_a = m.p_a;
    out.var_q = G1 * G1 * s.var_q + G2 * G2 * s.var_p + 2.0 * G1 * G2 * s.cov_qp - 2.0 * noise.g1[n];
    out.var_p = G4 * G4 * s.var_q + G5 * G5 * s.var_p + 2.0 * G4 * G5 * s.cov_qp - 2.0 * noise.g2[n];
    out.cov_qp = G1 * G4 * s.var_q + G2 * G5 * s.var_p + (G1 * G5 + G2 * G4) * s.cov_qp - noise.g3[n];
    return out;
}

Trajectory trajectory(const GaussianState& state0, const GreensFunctions& g, const NoiseIntegrals& noise) {
    state0.validate();
    if (!(noise.grid == g.grid)) throw DomainError("noise integrals and Green's function grids differ");
    Trajectory traj;
    traj.grid = g.grid;
    traj.states.reserve(g.grid.size());
    traj.min_heisenberg_margin = INFINITY;
    for (std::size_t n = 0; n < g.grid.size(); ++n) {
        traj.states.push_back(evolve_state(state0, g, noise, n));
        const double margin = traj.states.back().heisenberg_margin();
        if (margin < traj.min_heisenberg_margin) {
            traj.min_heisenberg_margin = margin;
            traj.worst_index = n;
        }
    }
    return traj;
}

void require_physical(const Trajectory& traj) {
    if (!traj.physical()) {
        throw ConvergenceError("Heisenberg bound violated by " + std::to_string(-traj.min_heisenberg_margin) +
                                   " at t = " + std::to_string(traj.grid.t(traj.worst_index)) +
                                   " (kernel convention failure)",
                               traj.min_heisenberg_margin);
    }
}

AsymptoticReport asymptotic_state(const Trajectory& traj, double window_fraction, double tolerance) {
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) throw DomainError("window fraction must be in (0, 1]");
    const std::size_t size = traj.states.size();
    if (size == 0) throw DomainError("empty trajectory");
    const std::size_t count =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(size))));
    const std::size_t start = size - std::min(count, size);

    GaussianState avg{0, 0, 0, 0, 0};
    GaussianState lo{INFINITY, INFINITY, INFINITY, INFINITY, INFINITY};
    GaussianState hi{-INFINITY, -INFINITY, -INFINITY, -INFINITY, -INFINITY};
    for (std::size_t n = start; n < size; ++n) {
        const auto& s = traj.states[n];
        avg.q_a += s.q_a;
        avg.p_a += s.p_a;
        avg.var_q += s.var_q;
        avg.var_p += s.var_p;
        avg.cov_qp += s.cov_qp;
        lo = {std::min(lo.q_a, s.q_a), std::min(lo.p_a, s.p_a), std::min(lo.var_q, s.var_q),
              std::min(lo.var_p, s.var_p), std::min(lo.cov_qp, s.cov_qp)};
        hi = {std::max(hi.q_a, s.q_a), std::max(hi.p_a, s.p_a), std::max(hi.var_q, s.var_q),
              std::max(hi.var_p, s.var_p), std::max(hi.cov_qp, s.cov_qp)};
    }
    const double inv = 1.0 / static_cast<double>(size - start);
    avg = {avg.q_a * inv, avg.p_a * inv, avg.var_q * inv, avg.var_p * inv, avg.cov_qp * inv};

    const double sq = std::sqrt(std::abs(avg.var_q));
    const double sp = std::sqrt(std::abs(avg.var_p));
    double drift = 0.0;
    drift = std::max(drift, (hi.q_a - lo.q_a) / sq);
    drift = std::max(drift, (hi.p_a - lo.p_a) / sp);
    drift = std::max(drift, (hi.var_q - lo.var_q) / std::abs(avg.var_q));
    drift = std::max(drift, (hi.var_p - lo.var_p) / std::abs(avg.var_p));
    drift = std::max(drift, (hi.cov_qp - lo.cov_qp) / (sq * sp));

    AsymptoticReport report{avg, drift, start};
    if (!(drift <= tolerance)) {
        throw ConvergenceError("asymptotic state not reached: relative drift " + std::to_string(drift) +
                                   " over the final window exceeds " + std::to_string(tolerance),
                               drift);
    }
    return report;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,q_a,p_a,var_q,var_p,cov_qp\n";
    out.precision(17);
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        const auto& s = traj.states[n];
        out << traj.grid.t(n) << ',' << s.q_a << ',' << s.p_a << ',' << s.var_q << ',' << s.var_p << ','
            << s.cov_qp << '\n';
    }
}

}  // namespace qbm
