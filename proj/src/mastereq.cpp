#include "qbm/mastereq.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "qbm/errors.hpp"

namespace qbm {

std::array<double, 4> MasterEqCoefficients::drift(std::size_t n) const {
    const double a11 = 2.0 * H_qp[n];
    const double a12 = 1.0 / mass + 2.0 * H_p2[n];
    const double a21 = -mass * omega_s * omega_s + 2.0 * Xi[n];
    const double a22 = -2.0 * H_qp[n] + 2.0 * Upsilon[n];
    return {a11, a12, a21, a22};
}

std::array<double, 3> MasterEqCoefficients::diffusion(std::size_t n) const {
    return {-2.0 * gamma_small[n], -2.0 * Gamma[n], Theta[n]};
}

MasterEqCoefficients compute_coefficients(const GreensFunctions& g, const NoiseIntegrals& noise,
                                          CoefficientForm form) {
    if (!(noise.grid == g.grid)) throw DomainError("noise integrals and Green's function grids differ");
    const auto& c = g.consts;
    const double m = c.mass;
    const double mu = c.mu;
    const double mw2 = m * c.omega_propagator * c.omega_propagator;
    const double mws2 = m * c.omega_s * c.omega_s;
    const bool exact = form == CoefficientForm::exact;
    const std::size_t size = g.grid.size();

    MasterEqCoefficients out;
    out.grid = g.grid;
    out.form = form;
    out.mass = m;
    out.omega_s = c.omega_s;
    out.mu = mu;
    for (auto* v : {&out.Xi, &out.Upsilon, &out.Gamma, &out.Theta, &out.gamma_small, &out.H_p2, &out.H_qp}) {
        v->assign(size, 0.0);
    }
    out.masked.assign(size, 0);

    std::size_t masked = 0;
    for (std::size_t n = 0; n < size; ++n) {
        const double F = g.F[n];
        if (std::abs(F) < kSingularF) {
            out.masked[n] = 1;
            ++masked;
            for (auto* v : {&out.Xi, &out.Upsilon, &out.Gamma, &out.Theta, &out.gamma_small, &out.H_p2, &out.H_qp}) {
                (*v)[n] = NAN;
            }
            continue;
        }
        const double h1 = g.dissipative_H1(n) / F;
        const double h2 = g.dissipative_H2(n) / F;

        const double K1 = 1.0 / m + mu * h1 / m - (exact ? mu * mu * h2 : 0.0);
        const double K2 = h1 / m - mu * h2;
        const double K3 = mw2 * mu * mu * h1 + mu * h2;
        const double K4 = -mw2 + h2 + (exact ? mu * mw2 * h1 : 0.0);
        const double K5 = (0.5 / m + 0.5 * mw2 * mu * mu) * h1;

        const double g1 = noise.g1[n], g2 = noise.g2[n], g3 = noise.g3[n];
        out.Gamma[n] = noise.g2_dot[n] - K4 * g3 - 2.0 * K2 * g2;
        out.gamma_small[n] = noise.g1_dot[n] - K1 * g3 - 2.0 * K3 * g1;
        out.Theta[n] = exact ? -noise.g3_dot[n] + 2.0 * K1 * g2 + 2.0 * K4 * g1 + 2.0 * K5 * g3
                             : -noise.g3_dot[n] + 2.0 * K1 * g2 + K5 * g3;
        out.Upsilon[n] = K5;
        out.Xi[n] = exact ? 0.5 * (K4 + mws2) : 0.5 * h2;
        out.H_p2[n] = exact ? 0.5 * (K1 - 1.0 / m) : 0.5 * mu * h1 / m;
        out.H_qp[n] = 0.5 * K3;
    }
    out.masked_fraction = size ? static_cast<double>(masked) / static_cast<double>(size) : 0.0;
    return out;
}

std::array<double, 2> KossakowskiMatrix::eigenvalues() const {
    const double mean = 0.5 * (a11 + a22);
    const double half = 0.5 * (a11 - a22);
    const double radius = std::sqrt(half * half + std::norm(a12));
    return {mean - radius, mean + radius};
}

KossakowskiMatrix kossakowski(const MasterEqCoefficients& c, std::size_t n) {
    if (n >= c.grid.size()) throw DomainError("grid index out of range");
    if (c.masked[n]) {
        throw SingularityError("coefficients are singular at t = " + std::to_string(c.grid.t(n)));
    }
    return {-2.0 * c.Gamma[n], -2.0 * c.gamma_small[n], {-c.Theta[n], c.Upsilon[n]}};
}

WitnessSeries nonmarkov_witness(const MasterEqCoefficients& c, double tolerance) {
    const std::size_t size = c.grid.size();
    WitnessSeries w;
    w.grid = c.grid;
    w.det.assign(size, NAN);
    w.det_identity.assign(size, NAN);
    w.discrepancy.assign(size, NAN);
    w.masked = c.masked;
    w.min_det = INFINITY;
    w.max_det = -INFINITY;
    for (std::size_t n = 0; n < size; ++n) {
        if (c.masked[n]) continue;
        const double G = c.Gamma[n], g = c.gamma_small[n], T = c.Theta[n], U = c.Upsilon[n];
        w.det[n] = 4.0 * G * g - (T * T + U * U);
        const double shifted = T + c.mu * G;
        w.det_identity[n] = -(shifted * shifted + U * U);
        w.discrepancy[n] = w.det[n] - w.det_identity[n];
        w.min_det = std::min(w.min_det, w.det[n]);
        w.max_det = std::max(w.max_det, w.det[n]);
        w.max_abs_det = std::max(w.max_abs_det, std::abs(w.det[n]));
    }
    w.non_markovian = w.min_det < -tolerance;
    return w;
}

KossakowskiMatrix LindbladLimit::kossakowski() const {
    return {-2.0 * Gamma, -2.0 * gamma_small, {-Theta, 0.0}};
}

LindbladLimit markov_limit(double C, double mu) {
    if (!(C > 0.0)) throw DomainError("delta-kernel weight C must be > 0");
    LindbladLimit l;
    l.rate = 2.0 * C;
    l.L_q = 1.0;
    l.L_p = -mu;
    l.Gamma = -C;
    l.Theta = 2.0 * mu * C;
    l.gamma_small = -mu * mu * C;
    l.H_q2 = -C;
    l.H_p2 = -C * mu * mu;
    l.H_qp = C * mu;
    return l;
}

double markov_weight(const SpectralDensityParams& p) {
    if (p.zero_temperature()) throw DomainError("the delta-kernel weight needs a finite temperature");
    return 2.0 * p.mass * p.gamma / p.beta;
}

QuadraticForm reference_hamiltonian(const MasterEqCoefficients& c, std::size_t n) {
    if (n >= c.grid.size()) throw DomainError("grid index out of range");
    if (c.masked[n]) {
        throw SingularityError("coefficients are singular at t = " + std::to_string(c.grid.t(n)));
    }
    return {0.5 * c.mass * c.omega_s * c.omega_s - c.Xi[n], 0.5 / c.mass + c.H_p2[n], c.H_qp[n] - 0.5 * c.Upsilon[n]};
}

namespace {

struct Moments {
    double q, p, vq, vp, cqp;
};

Moments operator+(const Moments& a, const Moments& b) {
    return {a.q + b.q, a.p + b.p, a.vq + b.vq, a.vp + b.vp, a.cqp + b.cqp};
}

Moments operator*(double s, const Moments& a) { return {s * a.q, s * a.p, s * a.vq, s * a.vp, s * a.cqp}; }

struct Generator {
    std::array<double, 4> A;
    std::array<double, 3> D;
};

Moments rate(const Generator& gen, const Moments& x) {
    const auto& A = gen.A;
    const auto& D = gen.D;
    Moments d;
    d.q = A[0] * x.q + A[1] * x.p;
    d.p = A[2] * x.q + A[3] * x.p;
    d.vq = 2.0 * (A[0] * x.vq + A[1] * x.cqp) + D[0];
    d.vp = 2.0 * (A[2] * x.cqp + A[3] * x.vp) + D[1];
    d.cqp = A[0] * x.cqp + A[1] * x.vp + A[2] * x.vq + A[3] * x.cqp + D[2];
    return d;
}

}  // namespace

Trajectory integrate_generator(const MasterEqCoefficients& c, const GaussianState& state0) {
    state0.validate();
    const std::size_t size = c.grid.size();
    const double h = c.grid.dt;
    auto at = [&](std::size_t n) {
        if (c.masked[n]) {
            throw SingularityError("generator integration crosses a singular time t = " + std::to_string(c.grid.t(n)));
        }
        return Generator{c.drift(n), c.diffusion(n)};
    };
    auto midpoint = [&](std::size_t n) {
        // value at t_n + h/2
        if (size < 4) {
            const auto a = at(n), b = at(n + 1);
            Generator m;
            for (int i = 0; i < 4; ++i) m.A[i] = 0.5 * (a.A[i] + b.A[i]);
            for (int i = 0; i < 3; ++i) m.D[i] = 0.5 * (a.D[i] + b.D[i]);
            return m;
        }
        const std::size_t base = std::clamp<std::size_t>(n == 0 ? 0 : n - 1, 0, size - 4);
        const double x = static_cast<double>(n) + 0.5 - static_cast<double>(base);
        double w[4];
        for (int i = 0; i < 4; ++i) {
            double l = 1.0;
            for (int j = 0; j < 4; ++j) {
                if (j != i) l *= (x - j) / static_cast<double>(i - j);
            }
            w[i] = l;
        }
        Generator m{};
        for (int i = 0; i < 4; ++i) {
            const auto v = at(base + static_cast<std::size_t>(i));
            for (int k = 0; k < 4; ++k) m.A[k] += w[i] * v.A[k];
            for (int k = 0; k < 3; ++k) m.D[k] += w[i] * v.D[k];
        }
        return m;
    };

    Trajectory traj;
    traj.grid = c.grid;
    traj.states.reserve(size);
    Moments x{state0.q_a, state0.p_a, state0.var_q, state0.var_p, state0.cov_qp};
    traj.states.push_back(state0);
    for (std::size_t n = 0; n + 1 < size; ++n) {
        const Generator g0 = at(n), gm = midpoint(n), g1 = at(n + 1);
        const Moments k1 = rate(g0, x);
        const Moments k2 = rate(gm, x + (0.5 * h) * k1);
        const Moments k3 = rate(gm, x + (0.5 * h) * k2);
        const Moments k4 = rate(g1, x + h * k3);
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        traj.states.push_back({x.q, x.p, x.vq, x.vp, x.cqp});
    }
    traj.min_heisenberg_margin = INFINITY;
    for (std::size_t n = 0; n < size; ++n) {
        const double margin = traj.states[n].heisenberg_margin();
        if (margin < traj.min_heisenberg_margin) {
            traj.min_heisenberg_margin = margin;
            traj.worst_index = n;
        }
    }
    return traj;
}

void write_coefficients_csv(std::ostream& out, const MasterEqCoefficients& c) {
    out << "t,Xi,Upsilon,Gamma,Theta,gamma,H_p2,H_qp,mask\n";
    out.precision(17);
    for (std::size_t n = 0; n < c.grid.size(); ++n) {
        out << c.grid.t(n) << ',' << c.Xi[n] << ',' << c.Upsilon[n] << ',' << c.Gamma[n] << ',' << c.Theta[n]
            << ',' << c.gamma_small[n] << ',' << c.H_p2[n] << ',' << c.H_qp[n] << ','
            << static_cast<int>(c.masked[n]) << '\n';
    }
}

}  // namespace qbm
