#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qbm/convolution.hpp"
#include "support.hpp"

using namespace qbm;

TEST_CASE("causal convolution of smooth functions is fourth order") {
    // int_0^t exp(-(t-s)) sin(s) ds = (sin t - cos t + exp(-t)) / 2
    for (double dt : {0.02, 0.01}) {
        const std::size_t n = static_cast<std::size_t>(std::round(5.0 / dt)) + 1;
        std::vector<double> k(n), kr(n), a(n), ar(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = i * dt;
            k[i] = std::exp(-t);
            kr[i] = -std::exp(-t);
            a[i] = std::sin(t);
            ar[i] = std::cos(t);
        }
        for (std::size_t memory : {n, std::size_t{200}}) {
            const auto c = causal_convolution(k, kr, std::min(memory, n), a, ar, dt);
            double err = 0.0;
            for (std::size_t i = 0; i < std::min(memory, n); ++i) {
                const double t = i * dt;
                err = std::max(err, std::abs(c[i] - 0.5 * (std::sin(t) - std::cos(t) + std::exp(-t))));
            }
            CHECK(err < 2e-4 * dt * dt);
        }
    }
}

TEST_CASE("direct and FFT routes agree") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 3000;
    std::vector<double> k(n), kr(n), a(n), ar(n);
    for (auto* v : {&k, &kr, &a, &ar}) {
        for (auto& x : *v) x = u(rng);
    }
    const auto small = causal_convolution(k, kr, 100, a, ar, 0.1);
    const auto large = causal_convolution(k, kr, 2000, a, ar, 0.1);
    std::vector<double> k100(k.begin(), k.begin() + 100);
    k100.resize(n, 0.0);
    std::vector<double> kr100(kr.begin(), kr.begin() + 100);
    kr100.resize(n, 0.0);
    const auto via_fft = causal_convolution(k100, kr100, 2000, a, ar, 0.1);
    CHECK(qbm::test::max_abs_diff(small, via_fft) < 1e-12);
    CHECK(qbm::test::max_abs(large) > 0.0);
}

TEST_CASE("online convolution equals the naive recurrence") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {50, 1000, 6000}) {
        for (std::size_t memory : {5, 300, 100000}) {
            std::vector<double> k(n + 1), drive(n);
            for (std::size_t i = 0; i < k.size(); ++i) k[i] = u(rng) / (1.0 + 0.01 * i);
            for (auto& d : drive) d = u(rng);
            std::vector<double> x(n), y(n);
            online_convolution(k, memory, x, [&](std::size_t i, double h) { x[i] = drive[i] + 1e-3 * h; });
            for (std::size_t i = 0; i < n; ++i) {
                double h = 0.0;
                for (std::size_t d = 1; d <= i && d < memory; ++d) h += k[d] * y[i - d];
                y[i] = drive[i] + 1e-3 * h;
            }
            CAPTURE(n);
            CAPTURE(memory);
            CHECK(qbm::test::max_abs_diff(x, y) < 1e-13);
        }
    }
}

TEST_CASE("cumulative integral is exact for cubics") {
    const double dt = 0.1;
    std::vector<double> f(40);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double t = i * dt;
        f[i] = 1.0 - 2.0 * t + 3.0 * t * t - 0.5 * t * t * t;
    }
    const auto F = cumulative_integral(f, dt);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double t = i * dt;
        CHECK(F[i] == doctest::Approx(t - t * t + t * t * t - 0.125 * t * t * t * t).epsilon(1e-12));
    }
}
