#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "qbm/errors.hpp"
#include "qbm/kernels.hpp"
#include "support.hpp"

using namespace qbm;

namespace {

void require_same(const KernelTable& a, const KernelTable& b, double tol) {
    using qbm::test::max_abs;
    using qbm::test::max_abs_diff;
    CHECK(max_abs_diff(a.re, b.re) <= tol * max_abs(b.re));
    CHECK(max_abs_diff(a.re_rate, b.re_rate) <= tol * max_abs(b.re_rate));
    CHECK(max_abs_diff(a.im, b.im) <= tol * max_abs(b.im));
    CHECK(max_abs_diff(a.im_rate, b.im_rate) <= tol * max_abs(b.im_rate));
}

}  // namespace

TEST_CASE("spectral sampling reproduces pointwise quadrature") {
    const auto grid = TimeGrid::covering(2.0 * std::numbers::pi / 200.0, 40.0);
    for (double s : {1.0, 2.0, 3.0}) {
        for (bool zero_t : {false, true}) {
            SpectralDensityParams p;
            p.s = s;
            if (zero_t) p.beta = std::numeric_limits<double>::infinity();
            CAPTURE(s);
            CAPTURE(zero_t);
            const auto a = KernelTable::build(p, grid, KernelMethod::spectral);
            const auto b = KernelTable::build(p, grid, KernelMethod::quadrature);
            require_same(a, b, 1e-10);
        }
    }
}

TEST_CASE("slowly decaying thermal tail is sampled correctly far out") {
    // s = 2 at finite temperature: D_re ~ -f'(0)/t^2 with f'(0) = (2 m gamma/(pi Omega)) (2/beta)
    SpectralDensityParams p;
    p.s = 2.0;
    p.gamma = 3.4e-3;
    const auto grid = TimeGrid::covering(0.05, 400.0);
    const auto k = KernelTable::build(p, grid, KernelMethod::spectral);
    const double slope = 2.0 * p.gamma / (std::numbers::pi * p.cutoff) * 2.0 / p.beta;
    const double t = grid.end();
    CHECK(k.re.back() == doctest::Approx(-slope / (t * t)).epsilon(1e-3));
    CHECK(k.re.back() == doctest::Approx(noise_kernel(t, p)).epsilon(1e-7));
    CHECK(k.re_memory == grid.size());
}

TEST_CASE("automatic method and the non-integer fallback") {
    SpectralDensityParams p;
    p.s = 1.5;
    const auto grid = TimeGrid::covering(0.05, 2.0);
    CHECK_THROWS_AS(KernelTable::build(p, grid, KernelMethod::spectral), DomainError);
    const auto k = KernelTable::build(p, grid);
    for (std::size_t n = 0; n < grid.size(); n += 7) {
        CHECK(k.re[n] == doctest::Approx(noise_kernel(grid.t(n), p)).epsilon(1e-12));
        CHECK(k.im[n] == doctest::Approx(dissipation_kernel(grid.t(n), p)).epsilon(1e-12));
    }
}

TEST_CASE("memory length marks the last significant sample") {
    const std::vector<double> a{1.0, 0.5, 1e-13, 0.0};
    const std::vector<double> b{0.0, 0.0, 0.0, 0.0};
    CHECK(memory_length(a, b, 1e-12) == 2);
    CHECK(memory_length(b, b, 1e-12) == 0);
    SpectralDensityParams p;
    const auto k = KernelTable::build(p, TimeGrid::covering(2.0 * std::numbers::pi / 200.0, 10.0));
    // Gaussian cutoff: D_im ~ exp(-Omega^2 t^2 / 4) decays below 1e-12 within t ~ 0.6
    CHECK(k.im_memory < 25);
    CHECK(std::abs(k.im[k.im_memory]) < 1e-12 * qbm::test::max_abs(k.im));
}

TEST_CASE("no coupling gives empty kernels") {
    SpectralDensityParams p;
    p.gamma = 0.0;
    const auto k = KernelTable::build(p, TimeGrid::covering(0.1, 1.0));
    CHECK(qbm::test::max_abs(k.re) == 0.0);
    CHECK(qbm::test::max_abs(k.im) == 0.0);
    CHECK(k.re_memory == 0);
}

TEST_CASE("kernel method names") {
    CHECK(parse_kernel_method("spectral") == KernelMethod::spectral);
    CHECK(parse_kernel_method("auto") == KernelMethod::automatic);
    CHECK(to_string(KernelMethod::quadrature) == "quadrature");
    CHECK_THROWS_AS(parse_kernel_method("fast"), ConfigError);
}
