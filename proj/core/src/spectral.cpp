#include "hwv/spectral.hpp"

#include "hwv/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace hwv {

namespace {

// FFTW planning is not thread-safe while execution is; plans are created
// once per size under a lock and reused through the new-array interface.
struct Plans {
    fftw_plan r2c;
    fftw_plan c2r;
};

const Plans& plans_for(std::size_t n)
{
    static std::mutex mtx;
    static std::map<std::size_t, Plans> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    const int len = static_cast<int>(n);
    double* rbuf = fftw_alloc_real(n);
    fftw_complex* cbuf = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p{fftw_plan_dft_r2c_1d(len, rbuf, cbuf, flags),
            fftw_plan_dft_c2r_1d(len, cbuf, rbuf, flags)};
    fftw_free(rbuf);
    fftw_free(cbuf);
    if (!p.r2c || !p.c2r) throw std::runtime_error("FFTW planning failed");
    return cache.emplace(n, p).first->second;
}

void check_signal(const std::vector<double>& v)
{
    require(v.size() >= 8 && is_power_of_two(v.size()),
            "signal length must be a power of two >= 8, got " + std::to_string(v.size()));
    for (double x : v) require(std::isfinite(x), "signal contains a non-finite sample");
}

} // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n)
{
    require(is_power_of_two(n), "not a power of two: " + std::to_string(n));
    int k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

PeriodicSignal::PeriodicSignal(std::size_t n, double fill) : values_(n, fill) { check_signal(values_); }

PeriodicSignal::PeriodicSignal(std::vector<double> values) : values_(std::move(values)) { check_signal(values_); }

PeriodicSignal PeriodicSignal::sample(std::size_t n, const std::function<double(double)>& fn)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = fn(static_cast<double>(i) / static_cast<double>(n));
    return PeriodicSignal(std::move(v));
}

PeriodicSignal PeriodicSignal::shifted(long offset) const
{
    const long n = static_cast<long>(size());
    long s = offset % n;
    if (s < 0) s += n;
    PeriodicSignal out = *this;
    std::rotate_copy(values_.begin(), values_.begin() + (n - s), values_.end(), out.values_.begin());
    return out;
}

PeriodicSignal& PeriodicSignal::operator+=(const PeriodicSignal& other)
{
    require(other.size() == size(), "signal size mismatch");
    for (std::size_t i = 0; i < size(); ++i) values_[i] += other.values_[i];
    return *this;
}

PeriodicSignal& PeriodicSignal::operator-=(const PeriodicSignal& other)
{
    require(other.size() == size(), "signal size mismatch");
    for (std::size_t i = 0; i < size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

PeriodicSignal& PeriodicSignal::operator*=(double c)
{
    for (double& v : values_) v *= c;
    return *this;
}

PeriodicSignal operator+(PeriodicSignal a, const PeriodicSignal& b) { return a += b; }
PeriodicSignal operator-(PeriodicSignal a, const PeriodicSignal& b) { return a -= b; }
PeriodicSignal operator*(double c, PeriodicSignal a) { return a *= c; }

Spectrum::Spectrum(std::size_t n) : c_(n, cplx{0.0, 0.0})
{
    require(n >= 8 && is_power_of_two(n), "spectrum length must be a power of two >= 8");
}

Spectrum::Spectrum(std::vector<cplx> fft_ordered) : c_(std::move(fft_ordered))
{
    require(c_.size() >= 8 && is_power_of_two(c_.size()), "spectrum length must be a power of two >= 8");
}

long Spectrum::frequency(std::size_t idx) const
{
    const long n = static_cast<long>(size());
    const long w = static_cast<long>(idx);
    return w <= n / 2 ? w : w - n;
}

std::size_t Spectrum::slot(long omega) const
{
    const long n = static_cast<long>(size());
    require(omega > -n / 2 && omega <= n / 2, "frequency out of range: " + std::to_string(omega));
    return static_cast<std::size_t>(omega >= 0 ? omega : omega + n);
}

bool Spectrum::is_conjugate_symmetric(double rel_tol) const
{
    const std::size_t n = size();
    double scale = 0.0;
    for (const auto& v : c_) scale = std::max(scale, std::abs(v));
    const double tol = rel_tol * std::max(scale, 1e-300);
    if (std::abs(c_[0].imag()) > tol || std::abs(c_[n / 2].imag()) > tol) return false;
    for (std::size_t w = 1; w < n / 2; ++w)
        if (std::abs(c_[w] - std::conj(c_[n - w])) > tol) return false;
    return true;
}

Spectrum forward_transform(const PeriodicSignal& s)
{
    const std::size_t n = s.size();
    std::vector<cplx> half(n / 2 + 1);
    fftw_execute_dft_r2c(plans_for(n).r2c, const_cast<double*>(s.values().data()),
                         reinterpret_cast<fftw_complex*>(half.data()));
    std::vector<cplx> c(n);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t w = 0; w <= n / 2; ++w) c[w] = half[w] * inv;
    for (std::size_t w = n / 2 + 1; w < n; ++w) c[w] = std::conj(c[n - w]);
    return Spectrum(std::move(c));
}

PeriodicSignal inverse_transform(const Spectrum& c)
{
    require(c.is_conjugate_symmetric(), "inverse_transform: spectrum is not conjugate symmetric");
    const std::size_t n = c.size();
    std::vector<cplx> half(c.coefficients().begin(), c.coefficients().begin() + static_cast<long>(n / 2 + 1));
    std::vector<double> v(n);
    fftw_execute_dft_c2r(plans_for(n).c2r, reinterpret_cast<fftw_complex*>(half.data()), v.data());
    return PeriodicSignal(std::move(v));
}

PeriodicSignal circular_convolve(const PeriodicSignal& f, const Spectrum& kernel)
{
    require(f.size() == kernel.size(), "circular_convolve: size mismatch");
    Spectrum c = forward_transform(f);
    for (std::size_t w = 0; w < c.size(); ++w) c[w] *= kernel[w];
    return inverse_transform(c);
}

double inner_product(const PeriodicSignal& f, const PeriodicSignal& g)
{
    require(f.size() == g.size(), "inner_product: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g[i];
    return acc / static_cast<double>(f.size());
}

double squared_norm(const PeriodicSignal& f) { return inner_product(f, f); }

double norm(const PeriodicSignal& f) { return std::sqrt(squared_norm(f)); }

} // namespace hwv
