#include "qbm/greens.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "qbm/convolution.hpp"
#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr int kSeriesOrder = 60;
constexpr std::size_t kSeriesSteps = 3;

// Power series of G about t = 0. The memory kernel is entire for a Gaussian cutoff:
// sign*D_im(t) = -sign * sum_l (-1)^l M_{2l+1} t^(2l+1)/(2l+1)!, M_j = int J w^j.
// Returns coefficients a_n t^n.
std::vector<double> green_series(const SpectralDensityParams& p, const SystemConstants& c) {
    const double w2 = c.omega_green * c.omega_green;
    const double coupling = 2.0 / c.m_prime;
    // kf[j] = kappa_j * j!
    std::vector<double> kf(kSeriesOrder + 1, 0.0);
    if (p.gamma > 0.0) {
        for (int j = 1; j <= kSeriesOrder; j += 2) {
            const int l = (j - 1) / 2;
            kf[j] = -c.dissipation_sign * (l % 2 == 0 ? 1.0 : -1.0) * spectral_moment(j, p);
        }
    }
    std::vector<double> a(kSeriesOrder + 3, 0.0);
    std::vector<double> fact(kSeriesOrder + 3, 1.0);
    for (int n = 1; n < kSeriesOrder + 3; ++n) fact[n] = fact[n - 1] * n;
    a[1] = 1.0;
    for (int n = 0; n + 2 <= kSeriesOrder; ++n) {
        // t^n coefficient of int_0^t K(tau) G(t - tau) dtau
        double mem = 0.0;
        for (int j = 1; j + 1 <= n; j += 2) {
            const int m = n - j - 1;
            if (a[m] != 0.0) mem += kf[j] * a[m] * fact[m] / fact[n];
        }
        a[n + 2] = (-w2 * a[n] - coupling * mem) / ((n + 2.0) * (n + 1.0));
    }
    return a;
}

double series_value(const std::vector<double>& a, double t, int derivative) {
    double acc = 0.0;
    for (int n = static_cast<int>(a.size()) - 1; n >= derivative; --n) {
        double coef = a[n];
        for (int d = 0; d < derivative; ++d) coef *= (n - d);
        acc = acc * t + coef;
    }
    return acc;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

double GreensFunctions::dissipative_H1(std::size_t n) const {
    return -2.0 * (I[n] * G_dot[n] - I_dot[n] * G[n]);
}

double GreensFunctions::dissipative_H2(std::size_t n) const {
    return -2.0 * (I_dot[n] * G_dot[n] - G_ddot[n] * I[n]);
}

GreensFunctions solve_memory_green(const KernelTable& kernels, const SystemConstants& consts) {
    const TimeGrid& grid = kernels.grid;
    const std::size_t size = grid.size();
    const double h = grid.dt;
    const double w2 = consts.omega_green * consts.omega_green;
    const double coupling = 2.0 / consts.m_prime;
    const double sign = consts.dissipation_sign;

    std::vector<double> K(size);
    std::vector<double> Kr(size);
    for (std::size_t n = 0; n < size; ++n) {
        K[n] = sign * kernels.im[n];
        Kr[n] = sign * kernels.im_rate[n];
    }
    const std::size_t memory = std::min(kernels.im_memory, size);
    auto k_at = [&](std::size_t n) { return n < memory ? K[n] : 0.0; };
    auto kr_at = [&](std::size_t n) { return n < memory ? Kr[n] : 0.0; };

    GreensFunctions g;
    g.grid = grid;
    g.consts = consts;
    g.G.assign(size, 0.0);
    g.G_dot.assign(size, 0.0);
    g.G_ddot.assign(size, 0.0);
    g.I.assign(size, 0.0);
    auto& G = g.G;
    auto& V = g.G_dot;
    auto& A = g.G_ddot;
    auto& I = g.I;

    const double c12 = h * h / 12.0;
    // Second Euler-Maclaurin term at the tau = 0 end, -(h^4/720) f'''(0) with
    // f(tau) = K(tau) G(t - tau), K(0) = K''(0) = 0 and G'' = -w^2 G - coupling I.
    const double k3 = kernels.params.gamma > 0.0 ? sign * spectral_moment(3.0, kernels.params) : 0.0;
    const double c720 = h * h * h * h / 720.0;
    const double relax = 1.0 - c720 * 3.0 * Kr[0] * coupling;
    // I_n = Istar + aG G_n + aV V_n, with Istar holding every term known before step n.
    const double aG = (0.5 * h * K[0] + c12 * Kr[0] - c720 * (k3 - 3.0 * Kr[0] * w2)) / relax;
    const double aV = -c12 * K[0] / relax;
    // history = sum_{j=1}^{n} K_j G_{n-j}; the j = n end carries trapezoid weight 1/2.
    auto known_part = [&](std::size_t n, double history) {
        const double s = history - 0.5 * k_at(n) * G[0];
        return (h * s + c12 * (k_at(n) * V[0] - kr_at(n) * G[0])) / relax;
    };

    const auto series = green_series(kernels.params, consts);
    const double beta = 9.0 * h / 24.0;
    online_convolution(K, memory, G, [&](std::size_t n, double history) {
        if (n == 0) {
            G[0] = 0.0;
            V[0] = 1.0;
            I[0] = 0.0;
            A[0] = -w2 * G[0];
            return;
        }
        const double istar = known_part(n, history);
        if (n <= kSeriesSteps) {
            const double t = grid.t(n);
            G[n] = series_value(series, t, 0);
            V[n] = series_value(series, t, 1);
        } else {
            const double r1 = G[n - 1] + h / 24.0 * (19.0 * V[n - 1] - 5.0 * V[n - 2] + V[n - 3]);
            const double r2 = V[n - 1] + h / 24.0 * (19.0 * A[n - 1] - 5.0 * A[n - 2] + A[n - 3]);
            const double stiff = w2 + coupling * aG;
            const double denom = 1.0 + beta * coupling * aV + beta * beta * stiff;
            V[n] = (r2 - beta * coupling * istar - beta * stiff * r1) / denom;
            G[n] = r1 + beta * V[n];
            if (!std::isfinite(G[n])) {
                throw ConvergenceError("Green's function diverged at t = " + std::to_string(grid.t(n)), G[n]);
            }
        }
        I[n] = istar + aG * G[n] + aV * V[n];
        A[n] = -w2 * G[n] - coupling * I[n];
    });

    g.I_dot = causal_convolution(K, Kr, memory, V, A, h);
    return g;
}

void build_propagators(GreensFunctions& g, const KernelTable& kernels) {
    if (!(kernels.grid == g.grid)) throw DomainError("kernel table and Green's function grids differ");
    const auto& c = g.consts;
    const double m = c.mass;
    const double mu = c.mu;
    const double mw2 = m * c.omega_propagator * c.omega_propagator;
    const std::size_t size = g.grid.size();
    for (auto* v : {&g.G1, &g.G2, &g.G3, &g.G4, &g.G5, &g.G6, &g.G1_dot, &g.G2_dot, &g.G3_dot, &g.G4_dot,
                    &g.G5_dot, &g.G6_dot}) {
        v->assign(size, 0.0);
    }
    for (std::size_t n = 0; n < size; ++n) {
        const double G = g.G[n], Gd = g.G_dot[n], Gdd = g.G_ddot[n];
        const double I = g.I[n], Id = g.I_dot[n];
        g.G1[n] = Gd - 2.0 * mu * I;
        g.G2[n] = G / m + 2.0 * mu * mu * I;
        g.G3[n] = G / m + mu * Gd;
        g.G4[n] = -mw2 * G - 2.0 * I;
        g.G5[n] = Gd + 2.0 * mu * I;
        g.G6[n] = -mw2 * mu * G + Gd;
        g.G1_dot[n] = Gdd - 2.0 * mu * Id;
        g.G2_dot[n] = Gd / m + 2.0 * mu * mu * Id;
        g.G3_dot[n] = Gd / m + mu * Gdd;
        g.G4_dot[n] = -mw2 * Gd - 2.0 * Id;
        g.G5_dot[n] = Gdd + 2.0 * mu * Id;
        g.G6_dot[n] = -mw2 * mu * Gd + Gdd;
    }
}

void average_green(GreensFunctions& g, const KernelTable& kernels) {
    if (!(kernels.grid == g.grid)) throw DomainError("kernel table and Green's function grids differ");
    const std::size_t size = g.grid.size();
    const double h = g.grid.dt;
    // G(0) = 0, so d/dt int D(t-s) G(s) ds = int D(t-s) G'(s) ds.
    const auto re = causal_convolution(kernels.re, kernels.re_rate, kernels.re_memory, g.G, g.G_dot, h);
    const auto re_dot =
        causal_convolution(kernels.re, kernels.re_rate, kernels.re_memory, g.G_dot, g.G_ddot, h);
    const double sign = g.consts.dissipation_sign;
    g.Gbar.assign(size, {});
    g.Gbar_dot.assign(size, {});
    for (std::size_t n = 0; n < size; ++n) {
        g.Gbar[n] = {re[n], g.I[n] / sign};
        g.Gbar_dot[n] = {re_dot[n], g.I_dot[n] / sign};
    }
}

void auxiliary_functions(GreensFunctions& g) {
    const std::size_t size = g.grid.size();
    g.F.assign(size, 0.0);
    g.H1.assign(size, {});
    g.H2.assign(size, {});
    g.singular.assign(size, 0);
    for (std::size_t n = 0; n < size; ++n) {
        g.F[n] = g.G_dot[n] * g.G_dot[n] - g.G_ddot[n] * g.G[n];
        g.H1[n] = g.Gbar[n] * g.G_dot[n] - g.Gbar_dot[n] * g.G[n];
        g.H2[n] = g.Gbar_dot[n] * g.G_dot[n] - g.G_ddot[n] * g.Gbar[n];
        g.singular[n] = std::abs(g.F[n]) < kSingularF ? 1 : 0;
    }
}

GreensFunctions compute_greens(const KernelTable& kernels, const SystemConstants& consts) {
    GreensFunctions g = solve_memory_green(kernels, consts);
    build_propagators(g, kernels);
    average_green(g, kernels);
    auxiliary_functions(g);
    return g;
}

double verify_green_convergence(const SpectralDensityParams& p, const SystemConstants& consts,
                                const TimeGrid& grid, double tolerance) {
    std::vector<GreensFunctions> runs;
    for (int level = 0; level < 3; ++level) {
        const std::size_t factor = std::size_t{1} << level;
        const TimeGrid fine{grid.dt / static_cast<double>(factor), grid.steps * factor};
        const KernelTable kernels = KernelTable::build(p, fine);
        GreensFunctions g = solve_memory_green(kernels, consts);
        build_propagators(g, kernels);
        runs.push_back(std::move(g));
    }
    double worst = 0.0;
    for (int level = 1; level < 3; ++level) {
        const std::size_t stride = std::size_t{1} << level;
        const auto& coarse = runs[level - 1];
        const auto& fine = runs[level];
        const std::size_t coarse_stride = std::size_t{1} << (level - 1);
        for (auto member : {&GreensFunctions::G, &GreensFunctions::G_dot, &GreensFunctions::G1,
                            &GreensFunctions::G2, &GreensFunctions::G3, &GreensFunctions::G4,
                            &GreensFunctions::G5, &GreensFunctions::G6}) {
            const auto& a = coarse.*member;
            const auto& b = fine.*member;
            const double scale = std::max(max_abs(b), 1e-300);
            double diff = 0.0;
            for (std::size_t n = 0; n < grid.size(); ++n) {
                diff = std::max(diff, std::abs(a[n * coarse_stride] - b[n * stride]));
            }
            worst = std::max(worst, diff / scale);
        }
    }
    if (worst > tolerance) {
        throw ConvergenceError("Green's function not converged under grid halving (relative change " +
                                   std::to_string(worst) + ")",
                               worst);
    }
    return worst;
}

void write_greens_csv(std::ostream& out, const GreensFunctions& g) {
    out << "t,G,G_dot,G_ddot,G1,G2,G3,G4,G5,G6,Gbar_re,Gbar_im,F,H1_re,H1_im,H2_re,H2_im,singular\n";
    out.precision(17);
    for (std::size_t n = 0; n < g.grid.size(); ++n) {
        out << g.grid.t(n) << ',' << g.G[n] << ',' << g.G_dot[n] << ',' << g.G_ddot[n] << ',' << g.G1[n] << ','
            << g.G2[n] << ',' << g.G3[n] << ',' << g.G4[n] << ',' << g.G5[n] << ',' << g.G6[n] << ','
            << g.Gbar[n].real() << ',' << g.Gbar[n].imag() << ',' << g.F[n] << ',' << g.H1[n].real() << ','
            << g.H1[n].imag() << ',' << g.H2[n].real() << ',' << g.H2[n].imag() << ','
            << static_cast<int>(g.singular[n]) << '\n';
    }
}

}  // namespace qbm
