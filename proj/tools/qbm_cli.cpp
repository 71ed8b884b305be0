// qbm: reproduction front-end
//
//   qbm simulate <config>        trajectories, coefficient tables and witness series per mu
//   qbm coefficients <config>    coefficient tables only
//   qbm witness <config>         witness series and a summary line per mu
//   qbm oracle-compare <config>  analytic vs finite-bath moments
//   qbm table1 <config>          asymptotic ratios for s = 1 and s = 2
//   qbm calibrate <config>       convention selection against the oracle
//
// Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,
// 4 calibration failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbm/config.hpp"
#include "qbm/csv.hpp"
#include "qbm/errors.hpp"
#include "qbm/simulation.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3, kCalibration = 4 };

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
    double tolerance{1e-2};
};

qbm::RunConfig load(const Options& o) {
    qbm::RunConfig c = qbm::load_config(o.config_path);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw qbm::ConfigError("--set expects key=value, got '" + kv + "'");
        qbm::apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.output_dir.empty()) c.output_dir = o.output_dir;
    c.validate();
    return c;
}

std::ofstream open_output(const qbm::RunConfig& c, const std::string& name) {
    std::filesystem::create_directories(c.output_dir);
    const auto path = std::filesystem::path(c.output_dir) / name;
    std::ofstream out(path);
    if (!out) throw qbm::ConfigError("cannot write '" + path.string() + "'");
    return out;
}

std::string run_tag(const qbm::RunConfig& c, const qbm::MuResult& r) {
    std::string tag = qbm::mu_tag(r.mu);
    if (!c.var_q_sweep.empty()) tag += "_vq" + qbm::format_number(c.var_q_sweep[r.state_index]);
    return tag;
}

qbm::ManifestExtras run_extras(const qbm::RunConfig& c, const qbm::MuResult& r, bool coefficients) {
    return {{"run_mu", qbm::format_number(r.mu)},
            {"run_var_q", qbm::format_number(r.initial.var_q)},
            {"run_var_p", qbm::format_number(r.initial.var_p)},
            {"resolved_t_end", qbm::format_number(r.trajectory.grid.end())},
            {"resolved_oversample", std::to_string(qbm::resolve_oversample(c, coefficients))}};
}

void write_calibration(const qbm::RunConfig& c, const qbm::CalibrationReport& r) {
    auto out = open_output(c, "calibration.csv");
    qbm::write_manifest(out, c, r.selected, {{"calibration_window", qbm::format_number(r.window)}});
    qbm::write_calibration_csv(out, r);
}

int simulate(const Options& o, bool trajectories, bool coefficients, bool witness) {
    const qbm::RunConfig c = load(o);
    const auto result = qbm::run_simulation(c, {coefficients, witness});
    if (result.calibration) write_calibration(c, *result.calibration);
    for (const auto& r : result.runs) {
        const std::string tag = run_tag(c, r);
        const auto extras = run_extras(c, r, coefficients || witness);
        if (trajectories) {
            auto out = open_output(c, "trajectory_" + tag + ".csv");
            qbm::write_manifest(out, c, result.switches, extras);
            qbm::write_trajectory_csv(out, r.trajectory);
        }
        if (coefficients) {
            auto out = open_output(c, "coefficients_" + tag + ".csv");
            auto ex = extras;
            ex.push_back({"masked_fraction", qbm::format_number(r.coefficients->masked_fraction)});
            qbm::write_manifest(out, c, result.switches, ex);
            qbm::write_coefficients_csv(out, *r.coefficients);
        }
        if (witness) {
            auto out = open_output(c, "witness_" + tag + ".csv");
            qbm::write_manifest(out, c, result.switches, extras);
            qbm::write_witness_csv(out, *r.witness);
            std::printf("%s  min det %.6e  max det %.6e  non-Markovian %s\n", tag.c_str(), r.witness->min_det,
                        r.witness->max_det, r.witness->non_markovian ? "yes" : "no");
        } else {
            const auto& last = r.trajectory.states.back();
            std::printf("%s  t=%g  q=%.6g p=%.6g var_q=%.6g var_p=%.6g cov_qp=%.6g\n", tag.c_str(),
                        r.trajectory.grid.end(), last.q_a, last.p_a, last.var_q, last.var_p, last.cov_qp);
        }
    }
    return kOk;
}

int oracle_compare(const Options& o) {
    const qbm::RunConfig c = load(o);
    std::optional<qbm::CalibrationReport> calibration;
    const qbm::Switches switches = qbm::resolve_switches(c, &calibration);
    if (calibration) write_calibration(c, *calibration);
    const auto results = qbm::compare_with_oracle(c, switches);
    double worst = 0.0;
    for (const auto& r : results) {
        auto out = open_output(c, "oracle_" + qbm::mu_tag(r.mu) + ".csv");
        qbm::write_manifest(out, c, switches, {{"run_mu", qbm::format_number(r.mu)}});
        qbm::write_oracle_csv(out, r);
        const auto& d = r.discrepancy;
        std::printf("%s  rel err q %.3e p %.3e var_q %.3e var_p %.3e cov_qp %.3e\n", qbm::mu_tag(r.mu).c_str(), d.q_a,
                    d.p_a, d.var_q, d.var_p, d.cov_qp);
        worst = std::max(worst, d.worst());
    }
    if (!(worst < o.tolerance)) {
        throw qbm::ConvergenceError("oracle discrepancy " + std::to_string(worst) + " exceeds tolerance " +
                                        std::to_string(o.tolerance),
                                    worst);
    }
    return kOk;
}

int table1(const Options& o) {
    const qbm::RunConfig c = load(o);
    const auto report = qbm::table1(c);
    auto out = open_output(c, "table1.csv");
    qbm::write_manifest(out, c, report.switches);
    qbm::write_table1_csv(out, report);
    std::printf("%-34s %10s %10s\n", "ratio", "s=1", "s=2");
    const char* names[3] = {"var_p(0)/var_p(0.5)", "var_p(0)/var_p(1)", "cov_qp(0.5)/cov_qp(1)"};
    for (int i = 0; i < 3; ++i) {
        std::printf("%-34s %10.4f %10.4f\n", names[i], report.ohmic.ratios[i], report.superohmic.ratios[i]);
    }
    std::printf("%-34s %10.2e %10.2e\n", "drift", report.ohmic.drift, report.superohmic.drift);
    return kOk;
}

int calibrate(const Options& o) {
    const qbm::RunConfig c = load(o);
    const auto report = qbm::calibrate_switches(c);
    write_calibration(c, report);
    std::printf("selected %s  rel err %.3e over t <= %g\n", qbm::to_string(report.selected).c_str(),
                report.discrepancy, report.window);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Brownian motion with momentum coupling: simulation and reproduction tool"};
    app.require_subcommand(1);
    Options o;
    auto add = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", o.config_path, "run configuration file")->required();
        sub->add_option("--set", o.overrides, "override a configuration key (key=value)");
        sub->add_option("-o,--output-dir", o.output_dir, "directory for CSV output");
        return sub;
    };
    auto* sim = add("simulate", "trajectories, coefficient tables and witness series");
    auto* coef = add("coefficients", "master-equation coefficient tables");
    auto* wit = add("witness", "Kossakowski determinant series");
    auto* orc = add("oracle-compare", "analytic moments against the finite-bath oracle");
    orc->add_option("--tolerance", o.tolerance, "largest accepted relative discrepancy");
    auto* tab = add("table1", "asymptotic ratio table for s = 1 and s = 2");
    auto* cal = add("calibrate", "select the convention switches against the oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (sim->parsed()) return simulate(o, true, true, true);
        if (coef->parsed()) return simulate(o, false, true, false);
        if (wit->parsed()) return simulate(o, false, false, true);
        if (orc->parsed()) return oracle_compare(o);
        if (tab->parsed()) return table1(o);
        if (cal->parsed()) return calibrate(o);
    } catch (const qbm::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const qbm::DomainError& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return kConfig;
    } catch (const qbm::CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return kCalibration;
    } catch (const qbm::ConvergenceError& e) {
        std::cerr << "not converged: " << e.what() << '\n';
        return kNumerical;
    } catch (const qbm::SingularityError& e) {
        std::cerr << "singular coefficients: " << e.what() << '\n';
        return kNumerical;
    } catch (const qbm::RecurrenceError& e) {
        std::cerr << "recurrence: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
