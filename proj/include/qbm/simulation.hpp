// simulation.hpp: end-to-end runs driven by a RunConfig

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qbm/config.hpp"
#include "qbm/mastereq.hpp"
#include "qbm/moments.hpp"
#include "qbm/oracle.hpp"

namespace qbm {

// Largest w_rms * h for the internal step h, w_rms = Omega sqrt((s + 1)/2) the RMS
// frequency of J. Moments are insensitive at the default grid. The coefficients are
// not: det A ~ -t^4 near t = 0 is a cancellation of O(1) terms, and the startup error
// of the bath integrals scales as (w_rms h)^2 relative to it, flipping its sign at the
// first samples unless w_rms h <= 0.16.
inline constexpr double kTrajectoryCutoffStep = 0.64;
inline constexpr double kCoefficientCutoffStep = 0.16;

// Internal steps per output step: the configured value, or the smallest integer
// bringing w_rms * dt / f under the limit for the requested outputs.
std::size_t resolve_oversample(const RunConfig& config, bool coefficients);

// Amplitude relaxation rate of the weakly damped oscillator, pi J(w_S) / (2 m w_S).
double relaxation_rate(const SpectralDensityParams& p);

// The configured t_end, or 8 / relaxation_rate when automatic. Throws ConvergenceError
// for an automatic window without dissipation.
double resolve_t_end(const RunConfig& config);

struct MuResult {
    double mu{0.0};
    std::size_t state_index{0};  // position in RunConfig::initial_states()
    GaussianState initial;
    Trajectory trajectory;                           // output grid
    std::optional<MasterEqCoefficients> coefficients;  // output grid
    std::optional<WitnessSeries> witness;           // series on the output grid, extrema over the internal grid
};

struct RunRequest {
    bool coefficients{true};
    bool witness{true};
};

// One mu and the config's single initial state on the config's grid with fixed switches. Computation runs on the internal
// grid; results are sampled back to the output grid.
MuResult simulate_mu(const RunConfig& config, const Switches& switches, double mu, const RunRequest& request);

struct CalibrationEntry {
    Switches switches;
    double discrepancy{0.0};  // worst moment discrepancy over the mu list, inf if the run failed
};

struct CalibrationReport {
    Switches selected;
    double discrepancy{0.0};
    double window{0.0};
    std::vector<CalibrationEntry> entries;
};

inline constexpr double kCalibrationTolerance = 5e-2;

// Compares every candidate of the unresolved switches against the finite-bath oracle
// on [0, min(calibration_t_end, recurrence time)] for each mu. Ties keep the default.
// Throws CalibrationError when no candidate reaches kCalibrationTolerance.
CalibrationReport calibrate_switches(const RunConfig& config);

// Configured switches, calibrating the automatic ones when needed. Throws ConfigError
// when calibration is needed but the oracle is disabled.
Switches resolve_switches(const RunConfig& config, std::optional<CalibrationReport>* report = nullptr);

struct SimulationResult {
    Switches switches;
    std::optional<CalibrationReport> calibration;
    std::vector<MuResult> runs;  // mu-major over mu x initial states
};

SimulationResult run_simulation(const RunConfig& config, const RunRequest& request = {});

struct OracleComparison {
    double mu{0.0};
    Trajectory analytic;
    Trajectory oracle;
    MomentDiscrepancy discrepancy;
};

// Analytic and finite-bath trajectories on the config grid (must lie inside the
// recurrence window).
std::vector<OracleComparison> compare_with_oracle(const RunConfig& config, const Switches& switches);

struct Table1Row {
    double s{1.0};
    double gamma{0.0};
    double t_end{0.0};
    std::array<double, 3> var_p{};   // mu = 0, 0.5, 1
    std::array<double, 3> cov_qp{};
    std::array<double, 3> ratios{};  // var_p(0)/var_p(0.5), var_p(0)/var_p(1), cov_qp(0.5)/cov_qp(1)
    double drift{0.0};
};

struct Table1Report {
    Switches switches;
    Table1Row ohmic;
    Table1Row superohmic;
};

inline constexpr std::array<double, 3> kTable1Mu{0.0, 0.5, 1.0};

// Asymptotic ratios for s = 1 (config gamma) and s = 2 (gamma_superohmic). The runs are
// long and are executed one at a time to bound memory. Throws ConvergenceError naming
// the run whose final window has not settled.
Table1Report table1(const RunConfig& base);

// Every stride-th sample.
Trajectory decimate(const Trajectory& t, std::size_t stride);
MasterEqCoefficients decimate(const MasterEqCoefficients& c, std::size_t stride);
WitnessSeries decimate(const WitnessSeries& w, std::size_t stride);

}  // namespace qbm
