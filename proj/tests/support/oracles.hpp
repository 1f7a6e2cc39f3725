#pragma once
// Slow reference implementations used to check the fast paths.
#include "hwv/spectral.hpp"
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using hwv::cplx;

inline std::vector<cplx> dft(const std::vector<double>& v)
{
    const std::size_t n = v.size();
    std::vector<cplx> c(n);
    for (std::size_t w = 0; w < n; ++w) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ph = -2.0 * std::numbers::pi * static_cast<double>((w * i) % n) / static_cast<double>(n);
            acc += v[i] * cplx(std::cos(ph), std::sin(ph));
        }
        c[w] = acc / static_cast<double>(n);
    }
    return c;
}

// (1/n) sum_t q(i - t) f(t), with q given on the grid
inline std::vector<double> convolve(const std::vector<double>& q, const std::vector<double>& f)
{
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < n; ++t) out[i] += q[(i + n - t) % n] * f[t];
    for (double& v : out) v /= static_cast<double>(n);
    return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s / static_cast<double>(a.size());
}

inline hwv::PeriodicSignal random_signal(std::size_t n, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (double& x : v) x = nd(gen);
    return hwv::PeriodicSignal(std::move(v));
}

} // namespace oracle
