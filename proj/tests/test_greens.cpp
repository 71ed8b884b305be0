#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qbm/errors.hpp"
#include "qbm/greens.hpp"
#include "support.hpp"

using namespace qbm;

namespace {

const double kDt = 2.0 * std::numbers::pi / 200.0;

GreensFunctions solve(const SpectralDensityParams& p, double mu, double t_end, double dt = kDt,
                      Switches s = {}) {
    const auto kernels = KernelTable::build(p, TimeGrid::covering(dt, t_end));
    return compute_greens(kernels, SystemConstants::make(p, mu, s));
}

// G(t) = (2/pi) int_0^inf Im chi(w) sin(w t) dw, with the retarded response
// chi(w) = 1 / (w_S^2 - w^2 - (2/m') P int J(v) v/(v^2 - w^2) dv - i (pi/m') J(w)).
// Valid when the memory equation has no bound modes, which holds for weak coupling.
class SpectralGreen {
public:
    SpectralGreen(const SpectralDensityParams& p, double m_prime) {
        gsl_set_error_handler_off();
        auto* ws = gsl_integration_workspace_alloc(2000);
        const auto* table = gsl_integration_glfixed_table_alloc(10);
        const double top = 5.0 * p.cutoff;
        auto panel = [&](double a, double b) {
            for (std::size_t i = 0; i < 10; ++i) {
                double x = 0.0, w = 0.0;
                gsl_integration_glfixed_point(a, b, i, &x, &w, table);
                nodes_.push_back(x);
                weights_.push_back(w * im_chi(x, p, m_prime, top, ws));
            }
        };
        // Fine panels across the resonance, whose width is of order gamma / m'.
        double a = 0.0;
        while (a < top - 1e-12) {
            const double width = (a > 0.7 && a < 1.2) ? 1e-3 : (a < 3.0 ? 1e-2 : 4e-2);
            panel(a, std::min(a + width, top));
            a += width;
        }
        gsl_integration_glfixed_table_free(const_cast<gsl_integration_glfixed_table*>(table));
        gsl_integration_workspace_free(ws);
    }

    double operator()(double t) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * std::sin(nodes_[i] * t);
        return 2.0 / std::numbers::pi * sum;
    }

private:
    static double im_chi(double w, const SpectralDensityParams& p, double m_prime, double top,
                         gsl_integration_workspace* ws) {
        struct Data {
            const SpectralDensityParams* p;
            double w;
        } data{&p, w};
        gsl_function f;
        f.function = [](double v, void* d) {
            const auto* data = static_cast<Data*>(d);
            return spectral_density(v, *data->p) * v / (v + data->w);
        };
        f.params = &data;
        double pv = 0.0, err = 0.0;
        gsl_integration_qawc(&f, 0.0, top, w, 0.0, 1e-12, 2000, ws, &pv, &err);
        const double re = p.omega_s * p.omega_s - w * w - 2.0 / m_prime * pv;
        const double im = std::numbers::pi / m_prime * spectral_density(w, p);
        return im / (re * re + im * im);
    }

    std::vector<double> nodes_, weights_;
};

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    return qbm::test::max_abs_diff(a, b) / qbm::test::max_abs(b);
}

}  // namespace

TEST_CASE("without coupling G is the free oscillator propagator") {
    SpectralDensityParams p;
    p.gamma = 0.0;
    for (double mu : {0.0, 1.0}) {
        const auto g = solve(p, mu, 50.0);
        double err = 0.0, err4 = 0.0, err6 = 0.0;
        for (std::size_t n = 0; n < g.grid.size(); ++n) {
            const double t = g.grid.t(n);
            err = std::max(err, std::abs(g.G[n] - std::sin(t)));
            err = std::max(err, std::abs(g.G_dot[n] - std::cos(t)));
            err4 = std::max(err4, std::abs(g.G4[n] + std::sin(t)));
            // mu is stored dimensionless; m = w_S = 1 here
            err6 = std::max(err6, std::abs(g.G6[n] - (std::cos(t) - mu * std::sin(t))));
            CHECK(g.G3[n] == doctest::Approx(std::sin(t) + mu * std::cos(t)));
        }
        CHECK(err < 1e-5);
        CHECK(err4 < 1e-5);
        CHECK(err6 < 1e-5);
        CHECK(qbm::test::max_abs(g.I) == 0.0);
    }
}

TEST_CASE("memory Green's function matches the spectral representation") {
    SpectralDensityParams p;
    for (double mu : {0.0, 1.0}) {
        CAPTURE(mu);
        const auto g = solve(p, mu, 50.0);
        const SpectralGreen reference(p, g.consts.m_prime);
        std::vector<double> expected(g.grid.size());
        for (std::size_t n = 0; n < expected.size(); ++n) expected[n] = reference(g.grid.t(n));
        CHECK(max_rel_diff(g.G, expected) < 1e-4);
    }
}

TEST_CASE("propagators reduce to one another at mu = 0") {
    SpectralDensityParams p;
    const auto g = solve(p, 0.0, 30.0);
    CHECK(qbm::test::max_abs_diff(g.G1, g.G5) <= 1e-10);
    CHECK(qbm::test::max_abs_diff(g.G1, g.G_dot) <= 1e-14);
    const auto h = solve(p, 0.5, 30.0);
    CHECK(qbm::test::max_abs_diff(h.G1, h.G5) > 1e-4);
}

TEST_CASE("determinant of the mean propagator equals F") {
    SpectralDensityParams p;
    for (double mu : {0.0, 0.5, 1.0}) {
        const auto g = solve(p, mu, 30.0);
        double err = 0.0;
        for (std::size_t n = 0; n < g.grid.size(); ++n) {
            err = std::max(err, std::abs(g.G1[n] * g.G5[n] - g.G2[n] * g.G4[n] - g.F[n]));
        }
        CHECK(err < 1e-6);
        CHECK(g.F[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("averaged Green's function converges under refinement") {
    SpectralDensityParams p;
    const auto coarse = solve(p, 0.5, 20.0);
    const auto fine = solve(p, 0.5, 20.0, kDt / 2.0);
    double err = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < coarse.grid.size(); ++n) {
        err = std::max(err, std::abs(coarse.Gbar[n] - fine.Gbar[2 * n]));
        scale = std::max(scale, std::abs(fine.Gbar[2 * n]));
    }
    CHECK(err / scale < 1e-4);
}

TEST_CASE("grid refinement check passes at the default step") {
    SpectralDensityParams p;
    const auto consts = SystemConstants::make(p, 1.0, Switches{});
    const double change = verify_green_convergence(p, consts, TimeGrid::covering(kDt, 20.0));
    CHECK(change < 1e-3);
    CHECK_THROWS_AS(verify_green_convergence(p, consts, TimeGrid::covering(0.5, 20.0), 1e-6),
                    ConvergenceError);
}

TEST_CASE("dissipation sign flips the decay") {
    SpectralDensityParams p;
    p.gamma = 1e-2;
    Switches anti;
    anti.dissipation_sign = -1;
    const auto damped = solve(p, 0.0, 200.0);
    const auto growing = solve(p, 0.0, 200.0, kDt, anti);
    const std::size_t tail = damped.grid.size() - 400;
    const std::vector<double> d(damped.G.begin() + tail, damped.G.end());
    const std::vector<double> u(growing.G.begin() + tail, growing.G.end());
    CHECK(qbm::test::max_abs(d) < 0.5);
    CHECK(qbm::test::max_abs(u) > 2.0);
}

TEST_CASE("kernel grid mismatch is rejected") {
    SpectralDensityParams p;
    const auto kernels = KernelTable::build(p, TimeGrid::covering(kDt, 5.0));
    auto g = solve_memory_green(kernels, SystemConstants::make(p, 0.0, Switches{}));
    const auto other = KernelTable::build(p, TimeGrid::covering(kDt, 6.0));
    CHECK_THROWS_AS(average_green(g, other), DomainError);
}
