// config.hpp: flat key = value run configuration
//
// One assignment per line, '#' starts a comment, unknown keys are errors. Keys:
//   s gamma cutoff mass omega_s beta infinite_temperature
//   mu                      comma-separated list of m mu w_S
//   q_a p_a var_q var_p cov_qp   initial state; var_p defaults to 1/(4 var_q)
//   var_q_sweep             optional comma list or "none"; one minimum-uncertainty initial state
//                           per entry, replacing the single initial state
//   dt t_end                t_end may be "auto" (relaxation-time estimate)
//   oversample              internal steps per output step, integer or "auto"
//   kernel_method           automatic | spectral | quadrature
//   oracle oracle_modes oracle_omega_max
//   frequency_convention noise_convention dissipation_sign   each may be "auto"
//   coefficient_form        exact | printed
//   window_fraction drift_tolerance
//   gamma_superohmic        coupling used for the s = 2 half of table1
//   calibration_t_end       length of the calibration window
//   output_dir

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qbm/bath.hpp"
#include "qbm/conventions.hpp"
#include "qbm/kernels.hpp"
#include "qbm/mastereq.hpp"
#include "qbm/moments.hpp"

namespace qbm {

struct RunConfig {
    SpectralDensityParams bath;
    std::vector<double> mu{0.0, 0.5, 1.0};
    GaussianState initial;
    std::vector<double> var_q_sweep;
    double dt{2.0 * 3.141592653589793 / 200.0};
    std::optional<double> t_end{50.0};  // empty means automatic
    std::optional<std::size_t> oversample;  // empty means automatic
    KernelMethod kernel_method{KernelMethod::automatic};

    bool oracle{true};
    std::size_t oracle_modes{600};
    std::optional<double> oracle_omega_max;  // default 3 Omega

    std::optional<FrequencyConvention> frequency;  // empty means decided by calibration
    std::optional<NoiseConvention> noise;
    std::optional<int> dissipation_sign;
    CoefficientForm coefficient_form{CoefficientForm::exact};

    double window_fraction{0.1};
    double drift_tolerance{1e-3};
    double gamma_superohmic{3.4e-3};
    double calibration_t_end{20.0};
    std::string output_dir{"."};

    // Throws ConfigError naming the offending key.
    void validate() const;
    bool needs_calibration() const noexcept { return !frequency || !noise || !dissipation_sign; }
    // Switches with unresolved entries filled from the defaults.
    Switches switches() const;
    // The initial states swept over: the sweep if given, else the single state.
    std::vector<GaussianState> initial_states() const;
    double omega_max() const { return oracle_omega_max.value_or(3.0 * bath.cutoff); }

    // Ordered key/value pairs as they would be written back, for manifests.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Applies one assignment. Throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

std::string format_number(double v);

}  // namespace qbm
