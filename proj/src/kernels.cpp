#include "qbm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include <fftw3.h>

#include "qbm/errors.hpp"

namespace qbm {

std::mutex& fftw_planner_lock();

namespace {

// Fills out[n] = f(n) across hardware threads. Kernel quadratures are independent per
// sample, so the split is purely by index.
template <class Fn>
void parallel_fill(std::size_t count, Fn fn) {
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(count / 64, 1));
    std::exception_ptr failure;
    std::mutex failure_lock;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t n = w; n < count; n += workers) fn(n);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

bool integer_ohmicity(double s) { return std::abs(s - std::round(s)) < 1e-12; }

bool closed_form_dissipation(double s) { return s == 1.0 || s == 2.0; }

// Slope at w = 0 of the thermally weighted density, nonzero only when its even extension
// has a kink. The kink gives D_re a -slope/t^2 tail whose periodic images the spectral
// sum has to remove.
double thermal_kink(const SpectralDensityParams& p) {
    const double base = 2.0 * p.mass * p.gamma / std::numbers::pi;
    if (p.zero_temperature()) return p.s == 1.0 ? base : 0.0;
    return p.s == 2.0 ? base / p.cutoff * 2.0 / p.beta : 0.0;
}

// sum over m != 0 of 1/(t + mP)^2 and its t-derivative.
double image_sum(double t, double P) {
    const double x = std::numbers::pi * t / P;
    const double k2 = (std::numbers::pi / P) * (std::numbers::pi / P);
    if (x < 0.05) {
        const double x2 = x * x;
        return k2 * (1.0 / 3.0 + x2 / 15.0 + 2.0 * x2 * x2 / 189.0);
    }
    const double sx = std::sin(x);
    return k2 * (1.0 / (sx * sx) - 1.0 / (x * x));
}

double image_sum_rate(double t, double P) {
    const double x = std::numbers::pi * t / P;
    const double k3 = std::pow(std::numbers::pi / P, 3);
    if (x < 0.05) {
        const double x2 = x * x;
        return k3 * (2.0 * x / 15.0 + 8.0 * x * x2 / 189.0);
    }
    const double sx = std::sin(x);
    return k3 * (-2.0 * std::cos(x) / (sx * sx * sx) + 2.0 / (x * x * x));
}

// r2c transform of the frequency samples weights[k], folded modulo L.
std::vector<std::complex<double>> folded_transform(const std::vector<double>& weights, std::size_t L) {
    double* in = fftw_alloc_real(L);
    fftw_complex* out = fftw_alloc_complex(L / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_lock());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(L), in, out, FFTW_ESTIMATE);
    }
    std::fill(in, in + L, 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) in[k % L] += weights[k];
    fftw_execute(plan);
    std::vector<std::complex<double>> result(L / 2 + 1);
    for (std::size_t i = 0; i < result.size(); ++i) result[i] = {out[i][0], out[i][1]};
    {
        std::lock_guard lock(fftw_planner_lock());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return result;
}

// Trapezoid in w with step dw = 2 pi/(L dt): every grid time t_n is an exact multiple of
// the DFT phase, so one FFT gives all samples. Poisson summation makes the error the
// sum of periodic images D(t + m L dt), negligible for smooth even/odd extensions and
// subtracted in closed form for the kinked case.
void spectral_fill(KernelTable& k, bool with_dissipation) {
    const auto& p = k.params;
    const std::size_t size = k.grid.size();
    const double dt = k.grid.dt;
    const double scale = p.zero_temperature() ? p.cutoff : std::min(p.cutoff, 2.0 / p.beta);
    const double dw_max = scale / 4000.0;
    std::size_t L = 1;
    const double need = std::max(4.0 * static_cast<double>(size), 2.0 * std::numbers::pi / (dt * dw_max));
    while (static_cast<double>(L) < need) L <<= 1;
    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(L) * dt);
    const double period = static_cast<double>(L) * dt;
    const std::size_t count = static_cast<std::size_t>(std::ceil(spectral_cutoff_frequency(p) / dw)) + 1;

    std::vector<double> f(count), wf(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double w = static_cast<double>(j) * dw;
        const double v = thermal_spectral_density(w, p) * dw;
        f[j] = j == 0 ? 0.5 * v : v;
        wf[j] = w * v;
    }
    const auto Fre = folded_transform(f, L);
    const auto Frate = folded_transform(wf, L);
    const double kink = thermal_kink(p);
    for (std::size_t n = 0; n < size; ++n) {
        const double t = k.grid.t(n);
        // Re out = sum f cos, Im out = -sum f sin
        k.re[n] = Fre[n].real() + (kink != 0.0 ? kink * image_sum(t, period) : 0.0);
        k.re_rate[n] = Frate[n].imag() + (kink != 0.0 ? kink * image_sum_rate(t, period) : 0.0);
    }
    if (!with_dissipation) return;
    for (std::size_t j = 0; j < count; ++j) {
        const double w = static_cast<double>(j) * dw;
        f[j] = spectral_density(w, p) * dw;
        wf[j] = w * f[j];
    }
    const auto Fim = folded_transform(f, L);
    const auto Fim_rate = folded_transform(wf, L);
    for (std::size_t n = 0; n < size; ++n) {
        k.im[n] = Fim[n].imag();
        k.im_rate[n] = -Fim_rate[n].real();
    }
}

}  // namespace

std::string to_string(KernelMethod m) {
    switch (m) {
        case KernelMethod::automatic: return "automatic";
        case KernelMethod::spectral: return "spectral";
        case KernelMethod::quadrature: return "quadrature";
    }
    return "?";
}

KernelMethod parse_kernel_method(std::string_view text) {
    if (text == "automatic" || text == "auto") return KernelMethod::automatic;
    if (text == "spectral") return KernelMethod::spectral;
    if (text == "quadrature") return KernelMethod::quadrature;
    throw ConfigError("unknown kernel method '" + std::string(text) + "'");
}

std::size_t memory_length(const std::vector<double>& a, const std::vector<double>& b, double cutoff) {
    double peak = 0.0;
    for (double v : a) peak = std::max(peak, std::abs(v));
    for (double v : b) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0;
    const double floor = cutoff * peak;
    std::size_t n = std::max(a.size(), b.size());
    while (n > 0) {
        const std::size_t i = n - 1;
        if ((i < a.size() && std::abs(a[i]) >= floor) || (i < b.size() && std::abs(b[i]) >= floor)) break;
        --n;
    }
    return n;
}

KernelTable KernelTable::build(const SpectralDensityParams& p, const TimeGrid& grid, KernelMethod method) {
    p.validate();
    if (method == KernelMethod::automatic) {
        method = integer_ohmicity(p.s) ? KernelMethod::spectral : KernelMethod::quadrature;
    }
    if (method == KernelMethod::spectral && !integer_ohmicity(p.s)) {
        throw DomainError("spectral kernel sampling needs an integer s");
    }
    KernelTable k;
    k.params = p;
    k.grid = grid;
    const std::size_t size = grid.size();
    k.re.assign(size, 0.0);
    k.re_rate.assign(size, 0.0);
    k.im.assign(size, 0.0);
    k.im_rate.assign(size, 0.0);
    if (p.gamma == 0.0) return k;

    const bool closed = closed_form_dissipation(p.s);
    if (method == KernelMethod::spectral) {
        spectral_fill(k, !closed);
        if (closed) {
            for (std::size_t n = 0; n < size; ++n) {
                k.im[n] = dissipation_kernel(grid.t(n), p);
                k.im_rate[n] = dissipation_kernel_rate(grid.t(n), p);
            }
        }
    } else {
        parallel_fill(size, [&](std::size_t n) {
            const double t = grid.t(n);
            k.re[n] = noise_kernel(t, p);
            k.re_rate[n] = noise_kernel_rate(t, p);
            k.im[n] = dissipation_kernel(t, p);
            k.im_rate[n] = dissipation_kernel_rate(t, p);
        });
    }
    k.re_memory = memory_length(k.re, k.re_rate, kMemoryCutoff);
    k.im_memory = memory_length(k.im, k.im_rate, kMemoryCutoff);
    return k;
}

}  // namespace qbm
