#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qbm/errors.hpp"
#include "qbm/mastereq.hpp"
#include "support.hpp"

using namespace qbm;

namespace {

// Coefficients are differences of nearly equal bath integrals at early times; a quarter
// of the output step keeps their startup error well below the witness scale.
const double kDt = 2.0 * std::numbers::pi / 800.0;

struct Run {
    GreensFunctions greens;
    NoiseIntegrals noise;
    MasterEqCoefficients coefficients;
};

Run run(const SpectralDensityParams& p, double mu, double t_end) {
    const auto kernels = KernelTable::build(p, TimeGrid::covering(kDt, t_end));
    auto greens = compute_greens(kernels, SystemConstants::make(p, mu, Switches{}));
    auto noise = noise_integrals(greens, kernels, NoiseConvention::noise);
    auto c = compute_coefficients(greens, noise);
    return {std::move(greens), std::move(noise), std::move(c)};
}

}  // namespace

TEST_CASE("delta-correlated limit is a single Lindblad channel") {
    for (double mu : {0.0, 0.5, 1.0}) {
        const double C = 0.06;
        const auto l = markov_limit(C, mu);
        const auto k = l.kossakowski();
        CHECK(k.determinant() == doctest::Approx(0.0).epsilon(1e-15));
        const double det = 4.0 * l.Gamma * l.gamma_small - l.Theta * l.Theta;
        CHECK(std::abs(det) <= 1e-15);
        const double shifted = l.Theta + mu * l.Gamma;
        CHECK(-(shifted * shifted) == doctest::Approx(-mu * mu * C * C));
        CHECK(l.rate == doctest::Approx(2.0 * C));
        CHECK(k.a11 == doctest::Approx(l.rate * l.L_q * l.L_q));
        CHECK(k.a22 == doctest::Approx(l.rate * l.L_p * l.L_p));
        CHECK(k.a12.real() == doctest::Approx(l.rate * l.L_q * l.L_p));
    }
    CHECK_THROWS_AS(markov_limit(0.0, 1.0), DomainError);
    SpectralDensityParams p;
    CHECK(markov_weight(p) == doctest::Approx(2.0 * p.gamma / p.beta));
}

TEST_CASE("Kossakowski eigenvalues agree with a Hermitian eigensolver") {
    const KossakowskiMatrix samples[] = {
        {1.0, 2.0, {0.3, -0.4}}, {0.5, -0.2, {0.0, 1.0}}, {3.0, 3.0, {0.0, 0.0}}, {1e-3, 2e-3, {-1e-3, 5e-4}}};
    for (const auto& k : samples) {
        Eigen::Matrix2cd m;
        m << k.a11, k.a12, k.a21(), k.a22;
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(m);
        const auto ev = k.eigenvalues();
        CHECK(ev[0] == doctest::Approx(solver.eigenvalues()[0]).epsilon(1e-12));
        CHECK(ev[1] == doctest::Approx(solver.eigenvalues()[1]).epsilon(1e-12));
        CHECK(ev[0] + ev[1] == doctest::Approx(k.trace()));
        CHECK(ev[0] * ev[1] == doctest::Approx(k.determinant()).epsilon(1e-10));
    }
}

TEST_CASE("momentum diffusion vanishes without momentum coupling") {
    SpectralDensityParams p;
    const auto r = run(p, 0.0, 30.0);
    const double scale = qbm::test::max_abs(r.coefficients.Gamma);
    CHECK(scale > 0.0);
    CHECK(qbm::test::max_abs(r.coefficients.gamma_small) <= 1e-8 * scale);
    CHECK(qbm::test::max_abs(r.coefficients.gamma_small) <= 1e-8);
    const auto w = nonmarkov_witness(r.coefficients);
    double gap = 0.0;
    for (std::size_t n = 0; n < w.det.size(); ++n) gap = std::max(gap, std::abs(w.discrepancy[n]));
    CHECK(gap <= 1e-12);
}

TEST_CASE("coefficient drift reproduces the propagator logarithmic derivative") {
    SpectralDensityParams p;
    for (double mu : {0.0, 0.5, 1.0}) {
        const auto r = run(p, mu, 30.0);
        const auto& g = r.greens;
        double err = 0.0;
        for (std::size_t n = 1; n < g.grid.size(); n += 37) {
            if (r.coefficients.masked[n]) continue;
            const Eigen::Matrix2d M{{g.G1[n], g.G2[n]}, {g.G4[n], g.G5[n]}};
            const Eigen::Matrix2d Md{{g.G1_dot[n], g.G2_dot[n]}, {g.G4_dot[n], g.G5_dot[n]}};
            const Eigen::Matrix2d A = Md * M.inverse();
            const auto d = r.coefficients.drift(n);
            err = std::max({err, std::abs(A(0, 0) - d[0]), std::abs(A(0, 1) - d[1]), std::abs(A(1, 0) - d[2]),
                            std::abs(A(1, 1) - d[3])});
        }
        CAPTURE(mu);
        CHECK(err < 1e-8);
    }
}

TEST_CASE("integrating the generator reproduces the moments") {
    SpectralDensityParams p;
    for (double mu : {0.0, 0.5, 1.0}) {
        const auto r = run(p, mu, 30.0);
        const GaussianState s0{1.0, 0.01, 0.5, 0.5, 0.0};
        const auto direct = trajectory(s0, r.greens, r.noise);
        const auto generated = integrate_generator(r.coefficients, s0);
        double err = 0.0;
        for (std::size_t n = 0; n < direct.states.size(); ++n) {
            const auto& a = direct.states[n];
            const auto& b = generated.states[n];
            err = std::max({err, std::abs(a.q_a - b.q_a), std::abs(a.p_a - b.p_a), std::abs(a.var_q - b.var_q) / a.var_q,
                            std::abs(a.var_p - b.var_p) / a.var_p, std::abs(a.cov_qp - b.cov_qp)});
        }
        CAPTURE(mu);
        CHECK(err < 1e-3);
    }
}

TEST_CASE("witness is negative for smooth kernels") {
    SpectralDensityParams p;
    for (double mu : {0.0, 1.0}) {
        const auto w = nonmarkov_witness(run(p, mu, 20.0).coefficients);
        CHECK(w.max_det <= 1e-8);
        CHECK(w.min_det < -1e-8);
        CHECK(w.non_markovian);
    }
}

TEST_CASE("singular times are masked and refused") {
    MasterEqCoefficients c;
    c.grid = TimeGrid::covering(0.1, 0.2);
    c.Xi = c.Upsilon = c.Gamma = c.Theta = c.gamma_small = c.H_p2 = c.H_qp = {0.0, NAN, 0.0};
    c.masked = {0, 1, 0};
    CHECK_THROWS_AS(kossakowski(c, 1), SingularityError);
    CHECK_THROWS_AS(reference_hamiltonian(c, 1), SingularityError);
    CHECK_NOTHROW(kossakowski(c, 0));
    CHECK_THROWS_AS(integrate_generator(c, GaussianState{}), SingularityError);
    const auto w = nonmarkov_witness(c);
    CHECK(w.masked[1] == 1);
    CHECK(w.max_det == 0.0);
}

TEST_CASE("reference Hamiltonian removes the frequency and squeezing shifts") {
    SpectralDensityParams p;
    const auto r = run(p, 0.5, 5.0);
    const auto& c = r.coefficients;
    const std::size_t n = c.grid.size() - 1;
    const auto h = reference_hamiltonian(c, n);
    CHECK(h.q2 == doctest::Approx(0.5 * c.mass * c.omega_s * c.omega_s - c.Xi[n]));
    CHECK(h.p2 == doctest::Approx(0.5 / c.mass + c.H_p2[n]));
    CHECK(h.qp == doctest::Approx(c.H_qp[n] - 0.5 * c.Upsilon[n]));
    CHECK_THROWS_AS(reference_hamiltonian(c, c.grid.size()), DomainError);
}

TEST_CASE("coefficient CSV header") {
    SpectralDensityParams p;
    std::ostringstream out;
    write_coefficients_csv(out, run(p, 0.0, 0.5).coefficients);
    CHECK(out.str().rfind("t,Xi,Upsilon,Gamma,Theta,gamma,H_p2,H_qp,mask\n", 0) == 0);
}
