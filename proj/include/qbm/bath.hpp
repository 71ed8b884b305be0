// bath.hpp: spectral density, thermal two-point kernels and derived system constants
//
// Natural units hbar = 1 throughout. The spectral density family is
//   J(w) = (2 m gamma / pi) w (w/Omega)^(s-1) exp(-w^2/Omega^2)
// and the bath two-point function is D(t) = D_re(t) + i D_im(t) with
//   D_re(t) =  int_0^inf dw J(w) coth(beta w / 2) cos(w t)
//   D_im(t) = -int_0^inf dw J(w) sin(w t).

#pragma once

#include <limits>

namespace qbm {

struct SpectralDensityParams {
    double s{1.0};          // Ohmicity
    double gamma{3e-3};     // coupling rate, units of omega_s
    double cutoff{20.0};    // Omega, units of omega_s
    double mass{1.0};       // system mass m
    double omega_s{1.0};    // bare system frequency
    double beta{1e-2};      // inverse temperature; +inf is T = 0
    bool infinite_temperature{false};  // classical weight 2/(beta w) instead of coth

    void validate() const;
    bool zero_temperature() const noexcept {
        return !infinite_temperature && beta == std::numeric_limits<double>::infinity();
    }
};

double spectral_density(double omega, const SpectralDensityParams& p);

// J(w) times the thermal weight (coth, classical 2/(beta w), or 1 at T = 0).
double thermal_spectral_density(double omega, const SpectralDensityParams& p);

// int_a^b J(w) dw, closed form through the regularized incomplete gamma function.
double spectral_weight(double a, double b, const SpectralDensityParams& p);

// int_0^inf J(w)/w dw = m gamma Omega Gamma(s/2) / pi.
double inverse_frequency_moment(const SpectralDensityParams& p);

// int_0^inf J(w) w^k dw = m gamma Omega^(k+2) Gamma((s+k+1)/2) / pi, for s + k > -1.
double spectral_moment(double k, const SpectralDensityParams& p);

// Dissipation kernel D_im(t). Closed form for s = 1 and s = 2, quadrature otherwise.
// Odd in t.
double dissipation_kernel(double t, const SpectralDensityParams& p);
double dissipation_kernel_rate(double t, const SpectralDensityParams& p);

// Noise kernel D_re(t), even in t. Always by quadrature; the coth weight is split
// at w = 2/beta and expanded as 1/x + x/3 - x^3/45 below it.
double noise_kernel(double t, const SpectralDensityParams& p);
double noise_kernel_rate(double t, const SpectralDensityParams& p);

// Quadrature-only routes, kept independent of the closed forms.
double dissipation_kernel_quadrature(double t, const SpectralDensityParams& p);
double dissipation_kernel_rate_quadrature(double t, const SpectralDensityParams& p);

// omega_R = sqrt(omega_s^2 + (2/m) int J/w).
double renormalized_frequency(const SpectralDensityParams& p);

// m' = (1/m + m omega_s^2 mu^2)^-1 with mu given as the dimensionless m mu omega_s.
double effective_mass(const SpectralDensityParams& p, double mu_dimless);

// Frequency above which J is below 1e-22 of its scale; quadratures stop here.
double spectral_cutoff_frequency(const SpectralDensityParams& p);

}  // namespace qbm
