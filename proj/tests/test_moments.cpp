#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qbm/errors.hpp"
#include "qbm/moments.hpp"
#include "support.hpp"

using namespace qbm;

namespace {

const double kDt = 2.0 * std::numbers::pi / 200.0;

struct Run {
    KernelTable kernels;
    GreensFunctions greens;
    NoiseIntegrals noise;
};

Run run(const SpectralDensityParams& p, double mu, double t_end, NoiseConvention convention = NoiseConvention::noise) {
    auto kernels = KernelTable::build(p, TimeGrid::covering(kDt, t_end));
    auto greens = compute_greens(kernels, SystemConstants::make(p, mu, Switches{}));
    auto noise = noise_integrals(greens, kernels, convention);
    return {std::move(kernels), std::move(greens), std::move(noise)};
}

}  // namespace

TEST_CASE("free oscillator rotates the means and keeps a coherent state") {
    SpectralDensityParams p;
    p.gamma = 0.0;
    const auto r = run(p, 1.0, 30.0);
    const GaussianState s0{1.0, 0.01, 0.5, 0.5, 0.0};
    const auto traj = trajectory(s0, r.greens, r.noise);
    double err = 0.0;
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        const double t = traj.grid.t(n);
        const auto& s = traj.states[n];
        err = std::max({err, std::abs(s.q_a - (std::cos(t) + 0.01 * std::sin(t))),
                        std::abs(s.p_a - (0.01 * std::cos(t) - std::sin(t))), std::abs(s.var_q - 0.5),
                        std::abs(s.var_p - 0.5), std::abs(s.cov_qp)});
    }
    CHECK(err < 1e-5);
    CHECK(traj.physical());
}

TEST_CASE("printed diffusion kernel gives vanishing g1 and g2") {
    SpectralDensityParams p;
    const auto r = run(p, 0.5, 20.0, NoiseConvention::printed);
    CHECK(qbm::test::max_abs(r.noise.g1) <= 1e-14);
    CHECK(qbm::test::max_abs(r.noise.g2) <= 1e-14);
    CHECK(qbm::test::max_abs(r.noise.g3) > 0.0);
}

TEST_CASE("noise weight conventions differ by a factor of two") {
    SpectralDensityParams p;
    const auto a = run(p, 0.5, 20.0, NoiseConvention::noise);
    const auto b = run(p, 0.5, 20.0, NoiseConvention::noise_printed_weights);
    for (std::size_t n = 0; n < a.noise.g1.size(); n += 50) {
        CHECK(a.noise.g1[n] == doctest::Approx(2.0 * b.noise.g1[n]).epsilon(1e-12));
        CHECK(a.noise.g3[n] == doctest::Approx(2.0 * b.noise.g3[n]).epsilon(1e-12));
    }
}

TEST_CASE("means do not depend on temperature") {
    auto hot = SpectralDensityParams{};
    auto cold = hot;
    cold.beta = std::numeric_limits<double>::infinity();
    const GaussianState s0{1.0, 0.01, 0.5, 0.5, 0.0};
    for (double mu : {0.0, 1.0}) {
        const auto a = trajectory(s0, run(hot, mu, 30.0).greens, run(hot, mu, 30.0).noise);
        const auto r = run(cold, mu, 30.0);
        const auto b = trajectory(s0, r.greens, r.noise);
        bool identical = true;
        for (std::size_t n = 0; n < a.states.size(); ++n) {
            identical = identical && a.states[n].q_a == b.states[n].q_a && a.states[n].p_a == b.states[n].p_a;
        }
        CHECK(identical);
        CHECK(a.states.back().var_q != b.states.back().var_q);
    }
}

TEST_CASE("Heisenberg bound holds along physical runs") {
    for (double beta : {1e-2, 1.0, std::numeric_limits<double>::infinity()}) {
        SpectralDensityParams p;
        p.beta = beta;
        for (double mu : {0.0, 0.5, 1.0}) {
            const auto r = run(p, mu, 50.0);
            const auto traj = trajectory(GaussianState{}, r.greens, r.noise);
            CAPTURE(beta);
            CAPTURE(mu);
            CHECK(traj.min_heisenberg_margin >= -kHeisenbergSlack);
            CHECK_NOTHROW(require_physical(traj));
        }
    }
}

TEST_CASE("unphysical trajectories are reported") {
    Trajectory traj;
    traj.grid = TimeGrid::covering(0.1, 0.1);
    traj.states = {GaussianState{}, GaussianState{}};
    traj.min_heisenberg_margin = -0.1;
    traj.worst_index = 1;
    CHECK_FALSE(traj.physical());
    CHECK_THROWS_AS(require_physical(traj), ConvergenceError);
}

TEST_CASE("Gaussian state validation") {
    CHECK_NOTHROW(GaussianState{}.validate());
    CHECK_THROWS_AS((GaussianState{0.0, 0.0, 0.1, 0.1, 0.0}.validate()), DomainError);
    CHECK_THROWS_AS((GaussianState{0.0, 0.0, -1.0, 1.0, 0.0}.validate()), DomainError);
    CHECK_THROWS_AS((GaussianState{0.0, 0.0, 1.0, 1.0, 0.9}.validate()), DomainError);
    const auto s = GaussianState::minimum_uncertainty(1.0, 0.0, 2.0);
    CHECK(s.var_p == doctest::Approx(0.125));
    CHECK(s.heisenberg_margin() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("asymptotic state of a settled trajectory") {
    Trajectory traj;
    traj.grid = TimeGrid::covering(0.1, 10.0);
    const GaussianState fixed{0.0, 0.0, 3.0, 2.0, 0.5};
    traj.states.assign(traj.grid.size(), fixed);
    const auto report = asymptotic_state(traj, 0.1, 1e-3);
    CHECK(report.state.var_q == doctest::Approx(3.0));
    CHECK(report.state.cov_qp == doctest::Approx(0.5));
    CHECK(report.drift == 0.0);
    CHECK(report.window_start == 90);
}

TEST_CASE("undamped oscillation never settles") {
    SpectralDensityParams p;
    p.gamma = 0.0;
    const auto r = run(p, 0.0, 50.0);
    const auto traj = trajectory(GaussianState{}, r.greens, r.noise);
    CHECK_THROWS_AS(asymptotic_state(traj), ConvergenceError);
}

TEST_CASE("trajectory CSV has one row per grid time") {
    SpectralDensityParams p;
    const auto r = run(p, 0.0, 1.0);
    std::ostringstream out;
    write_trajectory_csv(out, trajectory(GaussianState{}, r.greens, r.noise));
    const std::string text = out.str();
    CHECK(text.rfind("t,", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == r.greens.grid.size() + 1);
}
