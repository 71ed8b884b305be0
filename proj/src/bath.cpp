// bath.cpp: spectral density and kernel evaluation (closed forms + GSL quadrature)

#include "qbm/bath.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_dawson.h>
#include <gsl/gsl_sf_gamma.h>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr double kPi = std::numbers::pi;

struct GslErrorsOff {
    GslErrorsOff() { gsl_set_error_handler_off(); }
};
const GslErrorsOff gsl_errors_off;

enum class Transform { cosine, sine };

using Integrand = std::function<double(double)>;

double trampoline(double x, void* params) { return (*static_cast<const Integrand*>(params))(x); }

struct Workspace {
    explicit Workspace(std::size_t n) : ptr(gsl_integration_workspace_alloc(n)) {}
    ~Workspace() { gsl_integration_workspace_free(ptr); }
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
    gsl_integration_workspace* ptr;
};

constexpr std::size_t kLimit = 2000;

// int_a^b f(w) cos(w t) dw or int_a^b f(w) sin(w t) dw.
double fourier_piece(const Integrand& f, double a, double b, double t, Transform kind) {
    if (b <= a) return 0.0;
    Workspace ws(kLimit);
    gsl_function F{&trampoline, const_cast<Integrand*>(&f)};
    double result = 0.0;
    double abserr = 0.0;
    int status = 0;
    if (t == 0.0) {
        if (kind == Transform::sine) return 0.0;
        status = gsl_integration_qag(&F, a, b, 0.0, 1e-13, kLimit, GSL_INTEG_GAUSS61, ws.ptr, &result,
                                     &abserr);
    } else {
        auto* table = gsl_integration_qawo_table_alloc(
            t, b - a, kind == Transform::cosine ? GSL_INTEG_COSINE : GSL_INTEG_SINE, 50);
        status = gsl_integration_qawo(&F, a, 0.0, 1e-12, kLimit, ws.ptr, table, &result, &abserr);
        gsl_integration_qawo_table_free(table);
    }
    if (status != GSL_SUCCESS && status != GSL_EROUND && status != GSL_ETOL) {
        throw ConvergenceError(std::string("kernel quadrature failed: ") + gsl_strerror(status), abserr);
    }
    return result;
}

// int_0^inf f(w) {cos,sin}(w t) dw for an f carrying the Gaussian cutoff; the domain is
// split at `split` when it lies inside (0, cutoff).
double fourier_integral(const Integrand& f, double t, Transform kind, double cutoff, double split) {
    if (split > 0.0 && split < cutoff) {
        return fourier_piece(f, 0.0, split, t, kind) + fourier_piece(f, split, cutoff, t, kind);
    }
    return fourier_piece(f, 0.0, cutoff, t, kind);
}

double thermal_split(const SpectralDensityParams& p) {
    if (p.zero_temperature()) return 0.0;
    return 2.0 / p.beta;
}

// J(w)/w, finite at w = 0 for s >= 1.
double density_over_frequency(double omega, const SpectralDensityParams& p) {
    const double x = omega / p.cutoff;
    return 2.0 * p.mass * p.gamma / kPi * std::pow(x, p.s - 1.0) * std::exp(-x * x);
}

// x + (1 - 2x^2) F(x) with F the Dawson integral, and its x-derivative. Past x = 8 the
// direct forms cancel badly; the asymptotic series -sum_k 2k c_k x^(-2k-1) with
// c_k = (2k-1)!!/2^(k+1) is summed until the terms stop shrinking.
constexpr double kDawsonSwitch = 8.0;

double dawson_combo(double x) {
    if (x < kDawsonSwitch) return x + (1.0 - 2.0 * x * x) * gsl_sf_dawson(x);
    const double inv2 = 1.0 / (x * x);
    double c = 0.5;
    double xp = 1.0 / x;
    double sum = 0.0;
    double last = INFINITY;
    for (int k = 1; k < 60; ++k) {
        c *= (2.0 * k - 1.0) / 2.0;
        xp *= inv2;
        const double term = 2.0 * k * c * xp;
        if (term >= last || term < 1e-18 * std::abs(sum)) break;
        sum -= term;
        last = term;
    }
    return sum;
}

double dawson_combo_derivative(double x) {
    if (x < kDawsonSwitch) {
        const double F = gsl_sf_dawson(x);
        return 2.0 - 2.0 * x * x - 6.0 * x * F + 4.0 * x * x * x * F;
    }
    const double inv2 = 1.0 / (x * x);
    double c = 0.5;
    double xp = inv2;
    double sum = 0.0;
    double last = INFINITY;
    for (int k = 1; k < 60; ++k) {
        c *= (2.0 * k - 1.0) / 2.0;
        xp *= inv2;
        const double term = 2.0 * k * (2.0 * k + 1.0) * c * xp;
        if (term >= last || term < 1e-18 * std::abs(sum)) break;
        sum += term;
        last = term;
    }
    return sum;
}

}  // namespace

void SpectralDensityParams::validate() const {
    if (!(s > 0.0)) throw DomainError("s must be > 0 (got " + std::to_string(s) + ")");
    if (!(gamma >= 0.0)) throw DomainError("gamma must be >= 0");
    if (!(cutoff > 0.0)) throw DomainError("Omega must be > 0");
    if (!(mass > 0.0)) throw DomainError("mass must be > 0");
    if (!(omega_s > 0.0)) throw DomainError("omega_s must be > 0");
    if (!(beta > 0.0)) throw DomainError("beta must be > 0 (use +inf for zero temperature)");
    if (infinite_temperature && !std::isfinite(beta)) {
        throw DomainError("the infinite-temperature weight needs a finite beta");
    }
}

double spectral_density(double omega, const SpectralDensityParams& p) {
    if (omega < 0.0) throw DomainError("spectral density needs omega >= 0");
    const double x = omega / p.cutoff;
    return 2.0 * p.mass * p.gamma / kPi * omega * std::pow(x, p.s - 1.0) * std::exp(-x * x);
}

double thermal_spectral_density(double omega, const SpectralDensityParams& p) {
    if (omega < 0.0) throw DomainError("spectral density needs omega >= 0");
    if (p.zero_temperature()) return spectral_density(omega, p);
    const double jw = density_over_frequency(omega, p);
    if (p.infinite_temperature) return jw * 2.0 / p.beta;
    const double x = 0.5 * p.beta * omega;
    const double x2 = x * x;
    const double xcoth = x < 1e-3 ? 1.0 + x2 / 3.0 - x2 * x2 / 45.0 : x / std::tanh(x);
    return jw * (2.0 / p.beta) * xcoth;
}

double spectral_weight(double a, double b, const SpectralDensityParams& p) {
    if (a < 0.0 || b < a) throw DomainError("spectral_weight needs 0 <= a <= b");
    const double h = 0.5 * (p.s + 1.0);
    const double xa = (a / p.cutoff) * (a / p.cutoff);
    const double xb = (b / p.cutoff) * (b / p.cutoff);
    // int_a^b J = (m gamma Omega^2 / pi) Gamma(h) [Q(h, xa) - Q(h, xb)]
    const double diff = gsl_sf_gamma_inc_Q(h, xa) - gsl_sf_gamma_inc_Q(h, xb);
    return p.mass * p.gamma * p.cutoff * p.cutoff / kPi * std::tgamma(h) * diff;
}

double inverse_frequency_moment(const SpectralDensityParams& p) {
    if (!(p.s > 0.0)) throw DomainError("int J/w diverges for s <= 0");
    return spectral_moment(-1.0, p);
}

double spectral_moment(double k, const SpectralDensityParams& p) {
    if (!(p.s + k > -1.0)) throw DomainError("spectral moment diverges at w = 0");
    return p.mass * p.gamma * std::pow(p.cutoff, k + 2.0) * std::tgamma(0.5 * (p.s + k + 1.0)) / kPi;
}

double spectral_cutoff_frequency(const SpectralDensityParams& p) {
    // exp(-x^2) x^s < 1e-22 well before x = 7.5 + s/2 for the s range of interest
    return p.cutoff * (7.5 + 0.5 * std::max(p.s, 1.0));
}

double dissipation_kernel_quadrature(double t, const SpectralDensityParams& p) {
    if (t < 0.0) return -dissipation_kernel_quadrature(-t, p);
    if (p.gamma == 0.0 || t == 0.0) return 0.0;
    const Integrand f = [&p](double w) { return spectral_density(w, p); };
    return -fourier_integral(f, t, Transform::sine, spectral_cutoff_frequency(p), 0.0);
}

double dissipation_kernel_rate_quadrature(double t, const SpectralDensityParams& p) {
    if (t < 0.0) return dissipation_kernel_rate_quadrature(-t, p);
    if (p.gamma == 0.0) return 0.0;
    const Integrand f = [&p](double w) { return w * spectral_density(w, p); };
    return -fourier_integral(f, t, Transform::cosine, spectral_cutoff_frequency(p), 0.0);
}

double dissipation_kernel(double t, const SpectralDensityParams& p) {
    if (t < 0.0) return -dissipation_kernel(-t, p);
    if (p.gamma == 0.0 || t == 0.0) return 0.0;
    const double W = p.cutoff;
    if (p.s == 1.0) {
        return -p.mass * p.gamma * W * W * W * t / (2.0 * std::sqrt(kPi)) * std::exp(-0.25 * W * W * t * t);
    }
    if (p.s == 2.0) {
        return -p.mass * p.gamma * W * W / kPi * dawson_combo(0.5 * W * t);
    }
    return dissipation_kernel_quadrature(t, p);
}

double dissipation_kernel_rate(double t, const SpectralDensityParams& p) {
    if (t < 0.0) return dissipation_kernel_rate(-t, p);
    if (p.gamma == 0.0) return 0.0;
    const double W = p.cutoff;
    if (p.s == 1.0) {
        return -p.mass * p.gamma * W * W * W / (2.0 * std::sqrt(kPi)) * (1.0 - 0.5 * W * W * t * t) *
               std::exp(-0.25 * W * W * t * t);
    }
    if (p.s == 2.0) {
        return -p.mass * p.gamma * W * W * W / (2.0 * kPi) * dawson_combo_derivative(0.5 * W * t);
    }
    return dissipation_kernel_rate_quadrature(t, p);
}

double noise_kernel(double t, const SpectralDensityParams& p) {
    p.validate();
    t = std::abs(t);
    if (p.gamma == 0.0) return 0.0;
    const Integrand f = [&p](double w) { return thermal_spectral_density(w, p); };
    return fourier_integral(f, t, Transform::cosine, spectral_cutoff_frequency(p), thermal_split(p));
}

double noise_kernel_rate(double t, const SpectralDensityParams& p) {
    p.validate();
    if (t < 0.0) return -noise_kernel_rate(-t, p);
    if (p.gamma == 0.0 || t == 0.0) return 0.0;
    const Integrand f = [&p](double w) { return w * thermal_spectral_density(w, p); };
    return -fourier_integral(f, t, Transform::sine, spectral_cutoff_frequency(p), thermal_split(p));
}

double renormalized_frequency(const SpectralDensityParams& p) {
    return std::sqrt(p.omega_s * p.omega_s + 2.0 / p.mass * inverse_frequency_moment(p));
}

double effective_mass(const SpectralDensityParams& p, double mu_dimless) {
    const double mu = mu_dimless / (p.mass * p.omega_s);
    return 1.0 / (1.0 / p.mass + p.mass * p.omega_s * p.omega_s * mu * mu);
}

}  // namespace qbm
