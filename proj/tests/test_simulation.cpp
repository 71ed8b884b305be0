#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qbm/errors.hpp"
#include "qbm/simulation.hpp"

using namespace qbm;

namespace {

RunConfig fixed(double t_end) {
    RunConfig c;
    c.t_end = t_end;
    c.frequency = FrequencyConvention::bare;
    c.noise = NoiseConvention::noise;
    c.dissipation_sign = 1;
    return c;
}

}  // namespace

TEST_CASE("internal step follows the requested outputs") {
    RunConfig c;
    CHECK(resolve_oversample(c, false) == 1);
    CHECK(resolve_oversample(c, true) == 4);
    c.bath.s = 3.0;
    CHECK(resolve_oversample(c, true) == 6);
    CHECK(resolve_oversample(c, false) == 2);
    c.bath.s = 1.0;
    c.bath.cutoff = 5.0;
    CHECK(resolve_oversample(c, true) == 1);
    c.oversample = 7;
    CHECK(resolve_oversample(c, false) == 7);
}

TEST_CASE("automatic run length from the relaxation rate") {
    RunConfig c;
    c.t_end.reset();
    const double rate = relaxation_rate(c.bath);
    CHECK(rate == doctest::Approx(std::numbers::pi * spectral_density(1.0, c.bath) / 2.0));
    CHECK(resolve_t_end(c) == doctest::Approx(8.0 / rate));
    c.bath.gamma = 0.0;
    CHECK_THROWS_AS(resolve_t_end(c), ConvergenceError);
    c.t_end = 12.0;
    CHECK(resolve_t_end(c) == 12.0);
}

TEST_CASE("decimation keeps every stride-th sample") {
    auto c = fixed(2.0);
    c.mu = {0.5};
    const auto r = simulate_mu(c, c.switches(), 0.5, RunRequest{});
    REQUIRE(r.coefficients.has_value());
    REQUIRE(r.witness.has_value());
    CHECK(r.trajectory.grid == TimeGrid::covering(c.dt, 2.0));
    CHECK(r.coefficients->grid == r.trajectory.grid);
    CHECK(r.witness->det.size() == r.trajectory.grid.size());
    const auto half = decimate(r.trajectory, 2);
    CHECK(half.grid.dt == 2.0 * c.dt);
    CHECK(half.states.size() == (r.trajectory.states.size() + 1) / 2);
    CHECK(half.states[3].var_q == r.trajectory.states[6].var_q);
    const auto cc = decimate(*r.coefficients, 2);
    CHECK(cc.Gamma[3] == r.coefficients->Gamma[6]);
    CHECK(decimate(*r.witness, 2).det[3] == r.witness->det[6]);
}

TEST_CASE("oversampled and plain trajectories agree") {
    auto c = fixed(20.0);
    const auto plain = simulate_mu(c, c.switches(), 1.0, RunRequest{false, false});
    c.oversample = 4;
    const auto fine = simulate_mu(c, c.switches(), 1.0, RunRequest{false, false});
    const auto d = compare_trajectories(plain.trajectory, fine.trajectory);
    // cov_qp is the smallest moment at mu = 1 and carries the largest relative error
    CHECK(std::max({d.q_a, d.p_a, d.var_q, d.var_p}) < 1e-5);
    CHECK(d.cov_qp < 1e-3);
}

TEST_CASE("runs are deterministic and ordered by mu then initial state") {
    auto c = fixed(5.0);
    c.mu = {0.0, 1.0};
    c.var_q_sweep = {0.5, 2.0};
    const auto a = run_simulation(c, RunRequest{false, false});
    const auto b = run_simulation(c, RunRequest{false, false});
    REQUIRE(a.runs.size() == 4);
    CHECK(a.runs[1].mu == 0.0);
    CHECK(a.runs[1].state_index == 1);
    CHECK(a.runs[1].initial.var_q == 2.0);
    CHECK(a.runs[2].mu == 1.0);
    CHECK_FALSE(a.calibration.has_value());
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].trajectory.states.back().var_p == b.runs[i].trajectory.states.back().var_p);
    }
}

TEST_CASE("calibration without coupling keeps the defaults") {
    RunConfig c;
    c.bath.gamma = 0.0;
    c.mu = {0.0, 1.0};
    c.calibration_t_end = 5.0;
    c.oracle_modes = 100;
    const auto report = calibrate_switches(c);
    CHECK(report.selected == Switches{});
    CHECK(report.entries.size() == 18);
    CHECK(report.discrepancy < 1e-6);
    CHECK(report.window <= 5.0);
    CHECK(report.window > 5.0 - c.dt);
}

TEST_CASE("calibration at the reference bath selects the oracle-consistent reading") {
    RunConfig c;
    c.mu = {0.0, 1.0};
    const auto report = calibrate_switches(c);
    CHECK(report.selected == Switches{FrequencyConvention::bare, NoiseConvention::noise, +1});
    CHECK(report.discrepancy < 1e-3);
    for (const auto& e : report.entries) {
        if (e.switches.dissipation_sign == -1) CHECK(e.discrepancy > 0.1);
    }
}

TEST_CASE("switch resolution") {
    RunConfig c;
    c.oracle = false;
    CHECK_THROWS_AS(resolve_switches(c), ConfigError);
    c.frequency = FrequencyConvention::shifted;
    c.noise = NoiseConvention::noise;
    c.dissipation_sign = -1;
    std::optional<CalibrationReport> report;
    CHECK(resolve_switches(c, &report) == Switches{FrequencyConvention::shifted, NoiseConvention::noise, -1});
    CHECK_FALSE(report.has_value());
}

TEST_CASE("oracle comparison and its recurrence guard") {
    auto c = fixed(10.0);
    c.mu = {0.0, 1.0};
    const auto results = compare_with_oracle(c, c.switches());
    REQUIRE(results.size() == 2);
    for (const auto& r : results) CHECK(r.discrepancy.worst() < 1e-2);
    c.oracle_modes = 300;
    c.t_end = 50.0;
    CHECK_THROWS_AS(compare_with_oracle(c, c.switches()), RecurrenceError);
}

TEST_CASE("asymptotic table needs dissipation") {
    auto c = fixed(50.0);
    c.t_end.reset();
    c.bath.gamma = 0.0;
    CHECK_THROWS_AS(table1(c), ConvergenceError);
}
