#include "qbm/convolution.hpp"

#include <algorithm>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>

#include <fftw3.h>

#include "qbm/errors.hpp"

namespace qbm {

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_lock() {
    static std::mutex m;
    return m;
}

namespace {

constexpr std::size_t kDirectMemory = 128;
// Leaves of the history recursion and the largest block added without FFT.
constexpr std::size_t kLeafSize = 64;
constexpr std::size_t kDirectBlock = 512;

// s_n = sum_{j=0}^{min(n, memory-1)} K_j a_{n-j}
std::vector<double> raw_sums_direct(std::span<const double> k, std::size_t memory, std::span<const double> a) {
    const std::size_t size = a.size();
    std::vector<double> s(size, 0.0);
    for (std::size_t n = 0; n < size; ++n) {
        const std::size_t top = std::min(n + 1, memory);
        double acc = 0.0;
        for (std::size_t j = 0; j < top; ++j) acc += k[j] * a[n - j];
        s[n] = acc;
    }
    return s;
}

std::vector<double> raw_sums_fft(std::span<const double> k, std::size_t memory, std::span<const double> a) {
    const std::size_t size = a.size();
    std::size_t len = 1;
    while (len < size + memory) len <<= 1;
    const std::size_t bins = len / 2 + 1;

    double* buf = fftw_alloc_real(len);
    fftw_complex* ka = fftw_alloc_complex(bins);
    fftw_complex* aa = fftw_alloc_complex(bins);
    fftw_plan fk;
    fftw_plan fa;
    fftw_plan back;
    {
        std::lock_guard lock(fftw_planner_lock());
        fk = fftw_plan_dft_r2c_1d(static_cast<int>(len), buf, ka, FFTW_ESTIMATE);
        fa = fftw_plan_dft_r2c_1d(static_cast<int>(len), buf, aa, FFTW_ESTIMATE);
        back = fftw_plan_dft_c2r_1d(static_cast<int>(len), ka, buf, FFTW_ESTIMATE);
    }
    std::fill(buf, buf + len, 0.0);
    std::copy_n(k.begin(), memory, buf);
    fftw_execute(fk);
    std::fill(buf, buf + len, 0.0);
    std::copy(a.begin(), a.end(), buf);
    fftw_execute(fa);
    for (std::size_t i = 0; i < bins; ++i) {
        const std::complex<double> x(ka[i][0], ka[i][1]);
        const std::complex<double> y(aa[i][0], aa[i][1]);
        const std::complex<double> z = x * y / static_cast<double>(len);
        ka[i][0] = z.real();
        ka[i][1] = z.imag();
    }
    fftw_execute(back);
    std::vector<double> s(buf, buf + size);
    {
        std::lock_guard lock(fftw_planner_lock());
        fftw_destroy_plan(fk);
        fftw_destroy_plan(fa);
        fftw_destroy_plan(back);
    }
    fftw_free(buf);
    fftw_free(ka);
    fftw_free(aa);
    return s;
}

// One recursion level of the history sum: blocks of width `half` feeding the next
// `half` outputs. The kernel spectrum is shared by every block at this level.
class BlockTransform {
public:
    BlockTransform(std::span<const double> k, std::size_t memory, std::size_t half)
        : len_(4 * half), bins_(len_ / 2 + 1) {
        buf_ = fftw_alloc_real(len_);
        spec_ = fftw_alloc_complex(bins_);
        kspec_ = fftw_alloc_complex(bins_);
        {
            std::lock_guard lock(fftw_planner_lock());
            forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(len_), buf_, spec_, FFTW_ESTIMATE);
            back_ = fftw_plan_dft_c2r_1d(static_cast<int>(len_), spec_, buf_, FFTW_ESTIMATE);
        }
        std::fill(buf_, buf_ + len_, 0.0);
        std::copy_n(k.begin(), std::min({memory, 2 * half, k.size()}), buf_);
        fftw_execute(forward_);
        for (std::size_t i = 0; i < bins_; ++i) {
            kspec_[i][0] = spec_[i][0];
            kspec_[i][1] = spec_[i][1];
        }
    }
    BlockTransform(const BlockTransform&) = delete;
    BlockTransform& operator=(const BlockTransform&) = delete;
    ~BlockTransform() {
        std::lock_guard lock(fftw_planner_lock());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(back_);
        fftw_free(buf_);
        fftw_free(spec_);
        fftw_free(kspec_);
    }

    // hist[m + t] += sum_u k[half + t - u] x[l + u], u < half, t < half
    void add(std::span<const double> x, std::size_t l, std::span<double> hist) {
        const std::size_t half = len_ / 4;
        const std::size_t m = l + half;
        std::fill(buf_, buf_ + len_, 0.0);
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(l), half, buf_);
        fftw_execute(forward_);
        const double norm = 1.0 / static_cast<double>(len_);
        for (std::size_t i = 0; i < bins_; ++i) {
            const std::complex<double> a(spec_[i][0], spec_[i][1]);
            const std::complex<double> b(kspec_[i][0], kspec_[i][1]);
            const std::complex<double> z = a * b * norm;
            spec_[i][0] = z.real();
            spec_[i][1] = z.imag();
        }
        fftw_execute(back_);
        const std::size_t end = std::min(m + half, hist.size());
        for (std::size_t n = m; n < end; ++n) hist[n] += buf_[n - l];
    }

private:
    std::size_t len_;
    std::size_t bins_;
    double* buf_{};
    fftw_complex* spec_{};
    fftw_complex* kspec_{};
    fftw_plan forward_{};
    fftw_plan back_{};
};

struct HistoryRecursion {
    std::span<const double> k;
    std::size_t memory;
    std::vector<double>& x;
    const std::function<void(std::size_t, double)>& step;
    std::vector<double> hist;
    std::vector<std::unique_ptr<BlockTransform>> levels;

    double kernel(std::size_t d) const { return d < memory ? k[d] : 0.0; }

    BlockTransform& level(std::size_t half) {
        std::size_t index = 0;
        while ((kLeafSize << index) < 2 * half) ++index;
        if (levels.size() <= index) levels.resize(index + 1);
        if (!levels[index]) levels[index] = std::make_unique<BlockTransform>(k, memory, half);
        return *levels[index];
    }

    // On entry hist[n], n in [l, r), holds the contributions of every x[i] with i < l.
    void solve(std::size_t l, std::size_t r) {
        const std::size_t size = x.size();
        if (l >= size) return;
        if (r - l <= kLeafSize) {
            const std::size_t end = std::min(r, size);
            for (std::size_t n = l; n < end; ++n) {
                double acc = hist[n];
                for (std::size_t i = l; i < n; ++i) acc += kernel(n - i) * x[i];
                step(n, acc);
            }
            return;
        }
        const std::size_t half = (r - l) / 2;
        const std::size_t m = l + half;
        solve(l, m);
        if (m < size && memory > 1) {
            if (2 * half <= kDirectBlock) {
                const std::size_t end = std::min(r, size);
                for (std::size_t n = m; n < end; ++n) {
                    double acc = 0.0;
                    for (std::size_t i = l; i < m; ++i) acc += kernel(n - i) * x[i];
                    hist[n] += acc;
                }
            } else {
                level(half).add(x, l, hist);
            }
        }
        solve(m, r);
    }
};

}  // namespace

void online_convolution(std::span<const double> kernel, std::size_t memory, std::vector<double>& x,
                        const std::function<void(std::size_t, double)>& step) {
    const std::size_t size = x.size();
    memory = std::min(memory, kernel.size());
    if (memory <= 4 * kLeafSize) {
        for (std::size_t n = 0; n < size; ++n) {
            const std::size_t top = std::min(n + 1, memory);
            double acc = 0.0;
            for (std::size_t d = 1; d < top; ++d) acc += kernel[d] * x[n - d];
            step(n, acc);
        }
        return;
    }
    std::size_t span = kLeafSize;
    while (span < size) span <<= 1;
    HistoryRecursion rec{kernel, memory, x, step, std::vector<double>(size, 0.0), {}};
    rec.solve(0, span);
}

std::vector<double> causal_convolution(std::span<const double> kernel, std::span<const double> kernel_rate,
                                       std::size_t memory, std::span<const double> a,
                                       std::span<const double> a_rate, double dt) {
    const std::size_t size = a.size();
    if (a_rate.size() != size || kernel.size() < size || kernel_rate.size() < size) {
        throw DomainError("causal_convolution: series lengths disagree");
    }
    memory = std::min(memory, size);
    if (memory == 0) return std::vector<double>(size, 0.0);

    std::vector<double> s =
        memory <= kDirectMemory ? raw_sums_direct(kernel, memory, a) : raw_sums_fft(kernel, memory, a);

    const double c = dt * dt / 12.0;
    for (std::size_t n = 0; n < size; ++n) {
        if (n == 0) {
            s[0] = 0.0;
            continue;
        }
        const bool live = n < memory;
        const double kn = live ? kernel[n] : 0.0;
        const double kn_rate = live ? kernel_rate[n] : 0.0;
        double v = s[n] - 0.5 * kernel[0] * a[n] - 0.5 * kn * a[0];
        v *= dt;
        // f(tau) = K(tau) a(t - tau); correction -(h^2/12) [f'(t) - f'(0)]
        const double f_end = kn_rate * a[0] - kn * a_rate[0];
        const double f_start = kernel_rate[0] * a[n] - kernel[0] * a_rate[n];
        s[n] = v - c * (f_end - f_start);
    }
    return s;
}

std::vector<double> cumulative_integral(std::span<const double> f, double dt) {
    const std::size_t size = f.size();
    std::vector<double> out(size, 0.0);
    if (size < 2) return out;
    if (size < 4) {
        for (std::size_t n = 1; n < size; ++n) out[n] = out[n - 1] + 0.5 * dt * (f[n - 1] + f[n]);
        return out;
    }
    const double w = dt / 24.0;
    for (std::size_t n = 0; n + 1 < size; ++n) {
        double cell;
        if (n == 0) {
            cell = w * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        } else if (n + 2 >= size) {
            cell = w * (f[n - 2] - 5.0 * f[n - 1] + 19.0 * f[n] + 9.0 * f[n + 1]);
        } else {
            cell = w * (-f[n - 1] + 13.0 * f[n] + 13.0 * f[n + 1] - f[n + 2]);
        }
        out[n + 1] = out[n] + cell;
    }
    return out;
}

}  // namespace qbm
