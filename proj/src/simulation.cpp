#include "qbm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "qbm/errors.hpp"
#include "qbm/greens.hpp"
#include "qbm/kernels.hpp"

namespace qbm {

namespace {

// Runs fn(i) for i < count on up to hardware_concurrency threads, rethrowing the first
// failure. Each task is internally single-threaded.
template <class Fn>
void parallel_for(std::size_t count, Fn fn) {
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex lock;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard guard(lock);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

TimeGrid internal_grid(const TimeGrid& out, std::size_t stride) {
    return TimeGrid{out.dt / static_cast<double>(stride), out.steps * stride};
}

MuResult evolve(const RunConfig& config, const KernelTable& kernels, std::size_t stride, const Switches& switches,
                double mu, const RunRequest& request, const GaussianState& initial) {
    const SystemConstants consts = SystemConstants::make(config.bath, mu, switches);
    MuResult r;
    r.mu = mu;
    r.initial = initial;
    const GreensFunctions g = compute_greens(kernels, consts);
    const NoiseIntegrals noise = noise_integrals(g, kernels, switches.noise);
    Trajectory fine = trajectory(initial, g, noise);
    require_physical(fine);
    r.trajectory = decimate(fine, stride);
    if (request.coefficients || request.witness) {
        const MasterEqCoefficients c = compute_coefficients(g, noise, config.coefficient_form);
        if (request.witness) r.witness = decimate(nonmarkov_witness(c), stride);
        if (request.coefficients) r.coefficients = decimate(c, stride);
    }
    return r;
}

template <class T>
std::vector<T> every(const std::vector<T>& v, std::size_t stride) {
    std::vector<T> out;
    out.reserve(v.size() / stride + 1);
    for (std::size_t i = 0; i < v.size(); i += stride) out.push_back(v[i]);
    return out;
}

TimeGrid coarse_grid(const TimeGrid& g, std::size_t stride) {
    return TimeGrid{g.dt * static_cast<double>(stride), g.steps / stride};
}

std::string describe(const Switches& s) { return to_string(s); }

}  // namespace

std::size_t resolve_oversample(const RunConfig& config, bool coefficients) {
    if (config.oversample) return *config.oversample;
    const double limit = coefficients ? kCoefficientCutoffStep : kTrajectoryCutoffStep;
    const double rms = config.bath.cutoff * std::sqrt(0.5 * (config.bath.s + 1.0));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(rms * config.dt / limit - 1e-9)));
}

double relaxation_rate(const SpectralDensityParams& p) {
    return std::numbers::pi * spectral_density(p.omega_s, p) / (2.0 * p.mass * p.omega_s);
}

double resolve_t_end(const RunConfig& config) {
    if (config.t_end) return *config.t_end;
    const double rate = relaxation_rate(config.bath);
    if (!(rate > 0.0)) {
        throw ConvergenceError("no relaxation without dissipation (gamma = 0): automatic t_end is undefined", 0.0);
    }
    return 8.0 / rate;
}

MuResult simulate_mu(const RunConfig& config, const Switches& switches, double mu, const RunRequest& request) {
    config.validate();
    const TimeGrid out = TimeGrid::covering(config.dt, resolve_t_end(config));
    const std::size_t stride = resolve_oversample(config, request.coefficients || request.witness);
    const KernelTable kernels = KernelTable::build(config.bath, internal_grid(out, stride), config.kernel_method);
    return evolve(config, kernels, stride, switches, mu, request, config.initial);
}

CalibrationReport calibrate_switches(const RunConfig& config) {
    config.validate();
    if (!config.oracle) throw ConfigError("key 'oracle': calibration needs the oracle enabled");
    const DiscreteBath bath = discretize_bath(config.bath, config.oracle_modes, config.omega_max());
    const double window = std::min(config.calibration_t_end, bath.recurrence_time());
    const TimeGrid out{config.dt, static_cast<std::size_t>(std::floor(window / config.dt))};
    const std::size_t stride = resolve_oversample(config, false);
    const KernelTable kernels = KernelTable::build(config.bath, internal_grid(out, stride), config.kernel_method);

    std::vector<Trajectory> references(config.mu.size());
    parallel_for(config.mu.size(), [&](std::size_t i) {
        const SystemConstants consts = SystemConstants::make(config.bath, config.mu[i], Switches{});
        references[i] = oracle_trajectory(bath, consts, config.initial, out);
    });

    std::vector<FrequencyConvention> freqs{FrequencyConvention::bare, FrequencyConvention::shifted,
                                           FrequencyConvention::shifted_full};
    std::vector<NoiseConvention> noises{NoiseConvention::noise, NoiseConvention::noise_printed_weights,
                                        NoiseConvention::printed};
    std::vector<int> signs{+1, -1};
    if (config.frequency) freqs = {*config.frequency};
    if (config.noise) noises = {*config.noise};
    if (config.dissipation_sign) signs = {*config.dissipation_sign};

    CalibrationReport report;
    report.window = out.end();
    for (auto f : freqs) {
        for (auto n : noises) {
            for (int s : signs) report.entries.push_back({Switches{f, n, s}, 0.0});
        }
    }
    parallel_for(report.entries.size(), [&](std::size_t e) {
        auto& entry = report.entries[e];
        double worst = 0.0;
        try {
            for (std::size_t i = 0; i < config.mu.size(); ++i) {
                const MuResult r = evolve(config, kernels, stride, entry.switches, config.mu[i], {false, false}, config.initial);
                worst = std::max(worst, compare_trajectories(r.trajectory, references[i]).worst());
            }
        } catch (const std::exception&) {
            worst = std::numeric_limits<double>::infinity();
        }
        entry.discrepancy = std::isnan(worst) ? std::numeric_limits<double>::infinity() : worst;
    });

    report.selected = report.entries.front().switches;
    report.discrepancy = report.entries.front().discrepancy;
    for (const auto& entry : report.entries) {
        if (entry.discrepancy < report.discrepancy - 1e-12 * std::max(1.0, report.discrepancy)) {
            report.selected = entry.switches;
            report.discrepancy = entry.discrepancy;
        }
    }
    if (!(report.discrepancy < kCalibrationTolerance)) {
        throw CalibrationError("no switch combination matches the finite-bath oracle (best " +
                                   describe(report.selected) + " at relative error " +
                                   std::to_string(report.discrepancy) + ")",
                               report.discrepancy);
    }
    return report;
}

Switches resolve_switches(const RunConfig& config, std::optional<CalibrationReport>* report) {
    if (!config.needs_calibration()) return config.switches();
    if (!config.oracle) {
        throw ConfigError("automatic switches need the oracle (set oracle = true or fix every switch)");
    }
    CalibrationReport r = calibrate_switches(config);
    const Switches s = r.selected;
    if (report) *report = std::move(r);
    return s;
}

SimulationResult run_simulation(const RunConfig& config, const RunRequest& request) {
    config.validate();
    SimulationResult result;
    result.switches = resolve_switches(config, &result.calibration);
    const TimeGrid out = TimeGrid::covering(config.dt, resolve_t_end(config));
    const std::size_t stride = resolve_oversample(config, request.coefficients || request.witness);
    const KernelTable kernels = KernelTable::build(config.bath, internal_grid(out, stride), config.kernel_method);
    const auto states = config.initial_states();
    result.runs.resize(config.mu.size() * states.size());
    parallel_for(result.runs.size(), [&](std::size_t i) {
        const std::size_t m = i / states.size();
        const std::size_t k = i % states.size();
        result.runs[i] = evolve(config, kernels, stride, result.switches, config.mu[m], request, states[k]);
        result.runs[i].state_index = k;
    });
    return result;
}

std::vector<OracleComparison> compare_with_oracle(const RunConfig& config, const Switches& switches) {
    config.validate();
    const TimeGrid out = TimeGrid::covering(config.dt, resolve_t_end(config));
    const DiscreteBath bath = discretize_bath(config.bath, config.oracle_modes, config.omega_max());
    if (out.end() > bath.recurrence_time()) {
        throw RecurrenceError("t_end = " + std::to_string(out.end()) + " exceeds the recurrence time " +
                              std::to_string(bath.recurrence_time()) + " of the " +
                              std::to_string(config.oracle_modes) + "-mode bath");
    }
    const std::size_t stride = resolve_oversample(config, false);
    const KernelTable kernels = KernelTable::build(config.bath, internal_grid(out, stride), config.kernel_method);
    std::vector<OracleComparison> results(config.mu.size());
    parallel_for(config.mu.size(), [&](std::size_t i) {
        auto& r = results[i];
        r.mu = config.mu[i];
        r.analytic = evolve(config, kernels, stride, switches, r.mu, {false, false}, config.initial).trajectory;
        const SystemConstants consts = SystemConstants::make(config.bath, r.mu, switches);
        r.oracle = oracle_trajectory(bath, consts, config.initial, out);
        r.discrepancy = compare_trajectories(r.analytic, r.oracle);
    });
    return results;
}

Table1Report table1(const RunConfig& base) {
    base.validate();
    Table1Report report;
    report.switches = resolve_switches(base);
    const std::array<std::pair<double, double>, 2> cases{{{1.0, base.bath.gamma}, {2.0, base.gamma_superohmic}}};
    for (std::size_t c = 0; c < cases.size(); ++c) {
        RunConfig cfg = base;
        cfg.bath.s = cases[c].first;
        cfg.bath.gamma = cases[c].second;
        cfg.mu.assign(kTable1Mu.begin(), kTable1Mu.end());
        Table1Row& row = c == 0 ? report.ohmic : report.superohmic;
        row.s = cfg.bath.s;
        row.gamma = cfg.bath.gamma;
        row.t_end = resolve_t_end(cfg);
        cfg.t_end = row.t_end;
        const TimeGrid out = TimeGrid::covering(cfg.dt, row.t_end);
        const std::size_t stride = resolve_oversample(cfg, false);
        const KernelTable kernels = KernelTable::build(cfg.bath, internal_grid(out, stride), cfg.kernel_method);
        for (std::size_t i = 0; i < kTable1Mu.size(); ++i) {
            const MuResult r = evolve(cfg, kernels, stride, report.switches, kTable1Mu[i], {false, false}, cfg.initial);
            AsymptoticReport a;
            try {
                a = asymptotic_state(r.trajectory, cfg.window_fraction, cfg.drift_tolerance);
            } catch (const ConvergenceError& e) {
                throw ConvergenceError("table1 run s = " + format_number(row.s) + ", mu = " +
                                           format_number(kTable1Mu[i]) + ": " + e.what(),
                                       e.measured());
            }
            row.var_p[i] = a.state.var_p;
            row.cov_qp[i] = a.state.cov_qp;
            row.drift = std::max(row.drift, a.drift);
        }
        row.ratios = {row.var_p[0] / row.var_p[1], row.var_p[0] / row.var_p[2], row.cov_qp[1] / row.cov_qp[2]};
    }
    return report;
}

Trajectory decimate(const Trajectory& t, std::size_t stride) {
    if (stride <= 1) return t;
    Trajectory out;
    out.grid = coarse_grid(t.grid, stride);
    out.states = every(t.states, stride);
    out.min_heisenberg_margin = t.min_heisenberg_margin;
    out.worst_index = t.worst_index / stride;
    return out;
}

MasterEqCoefficients decimate(const MasterEqCoefficients& c, std::size_t stride) {
    if (stride <= 1) return c;
    MasterEqCoefficients out = c;
    out.grid = coarse_grid(c.grid, stride);
    for (auto member : {&MasterEqCoefficients::Xi, &MasterEqCoefficients::Upsilon, &MasterEqCoefficients::Gamma,
                        &MasterEqCoefficients::Theta, &MasterEqCoefficients::gamma_small,
                        &MasterEqCoefficients::H_p2, &MasterEqCoefficients::H_qp}) {
        out.*member = every(c.*member, stride);
    }
    out.masked = every(c.masked, stride);
    return out;
}

WitnessSeries decimate(const WitnessSeries& w, std::size_t stride) {
    if (stride <= 1) return w;
    WitnessSeries out = w;
    out.grid = coarse_grid(w.grid, stride);
    out.det = every(w.det, stride);
    out.det_identity = every(w.det_identity, stride);
    out.discrepancy = every(w.discrepancy, stride);
    out.masked = every(w.masked, stride);
    return out;
}

}  // namespace qbm
