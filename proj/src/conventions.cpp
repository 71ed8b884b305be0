#include "qbm/conventions.hpp"

#include "qbm/errors.hpp"

namespace qbm {

std::string to_string(FrequencyConvention c) {
    switch (c) {
        case FrequencyConvention::bare: return "bare";
        case FrequencyConvention::shifted: return "shifted";
        case FrequencyConvention::shifted_full: return "shifted_full";
    }
    return "?";
}

std::string to_string(NoiseConvention c) {
    switch (c) {
        case NoiseConvention::printed: return "printed";
        case NoiseConvention::noise_printed_weights: return "noise_printed_weights";
        case NoiseConvention::noise: return "noise";
    }
    return "?";
}

std::string to_string(const Switches& s) {
    return "frequency=" + to_string(s.frequency) + " noise=" + to_string(s.noise) +
           " dissipation_sign=" + (s.dissipation_sign > 0 ? "+1" : "-1");
}

FrequencyConvention parse_frequency_convention(std::string_view text) {
    if (text == "bare") return FrequencyConvention::bare;
    if (text == "shifted") return FrequencyConvention::shifted;
    if (text == "shifted_full") return FrequencyConvention::shifted_full;
    throw ConfigError("unknown frequency convention '" + std::string(text) + "'");
}

NoiseConvention parse_noise_convention(std::string_view text) {
    if (text == "printed") return NoiseConvention::printed;
    if (text == "noise_printed_weights") return NoiseConvention::noise_printed_weights;
    if (text == "noise") return NoiseConvention::noise;
    throw ConfigError("unknown noise convention '" + std::string(text) + "'");
}

SystemConstants SystemConstants::make(const SpectralDensityParams& p, double mu_dimless, const Switches& s) {
    p.validate();
    if (s.dissipation_sign != 1 && s.dissipation_sign != -1) {
        throw DomainError("dissipation_sign must be +1 or -1");
    }
    SystemConstants c;
    c.mu_dimless = mu_dimless;
    c.mu = mu_dimless / (p.mass * p.omega_s);
    c.mass = p.mass;
    c.omega_s = p.omega_s;
    c.omega_r = renormalized_frequency(p);
    c.m_prime = effective_mass(p, mu_dimless);
    c.omega_green = s.frequency == FrequencyConvention::bare ? p.omega_s : c.omega_r;
    c.omega_propagator = s.frequency == FrequencyConvention::shifted_full ? c.omega_r : p.omega_s;
    c.dissipation_sign = s.dissipation_sign;
    return c;
}

}  // namespace qbm
