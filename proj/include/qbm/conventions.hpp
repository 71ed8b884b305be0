// conventions.hpp: switches for the notational ambiguities of the model and the derived
// system constants

#pragma once

#include <string>
#include <string_view>

#include "qbm/bath.hpp"

namespace qbm {

// Which frequency enters the Green's-function equation and the -m w^2 terms of G4, G6.
//   bare         w_S in both (exact for the Hamiltonian without counterterm)
//   shifted      w_R in the Green's-function equation, w_S in G4 and G6
//   shifted_full w_R in both
enum class FrequencyConvention { bare, shifted, shifted_full };

// Kernel and weights of the diffusion double integrals g1, g2, g3.
//   printed                D_im with weights 1/4, 1/4, 1/2
//   noise_printed_weights  D_re with weights 1/4, 1/4, 1/2
//   noise                  D_re with weights 1/2, 1/2, 1
enum class NoiseConvention { printed, noise_printed_weights, noise };

struct Switches {
    FrequencyConvention frequency{FrequencyConvention::bare};
    NoiseConvention noise{NoiseConvention::noise};
    int dissipation_sign{+1};  // multiplies D_im in the memory equation

    bool operator==(const Switches&) const = default;
};

std::string to_string(FrequencyConvention c);
std::string to_string(NoiseConvention c);
std::string to_string(const Switches& s);
FrequencyConvention parse_frequency_convention(std::string_view text);
NoiseConvention parse_noise_convention(std::string_view text);

struct SystemConstants {
    double mu_dimless{0.0};  // m mu w_S
    double mu{0.0};          // mu in units of 1/(m w_S)
    double mass{1.0};
    double omega_s{1.0};
    double omega_r{1.0};
    double m_prime{1.0};
    double omega_green{1.0};       // frequency in the Green's-function equation
    double omega_propagator{1.0};  // frequency in the -m w^2 terms of G4 and G6
    int dissipation_sign{+1};

    static SystemConstants make(const SpectralDensityParams& p, double mu_dimless, const Switches& s);
};

}  // namespace qbm
