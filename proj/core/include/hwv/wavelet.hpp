#pragma once

#include "hwv/spectral.hpp"

#include <cstddef>
#include <vector>

namespace hwv {

enum class BasisKind { scaling, wavelet };

// Orthonormal Daubechies low-pass filter with N vanishing moments (2N taps).
struct WaveletFilter {
    int vanishing_moments = 4;
    std::vector<double> lowpass;

    static WaveletFilter daubechies(int vanishing_moments);

    std::size_t length() const { return lowpass.size(); }
    // g_l = (-1)^l h_{L-1-l}
    std::vector<double> highpass() const;

    // Offset between the transform's natural index and the public index k,
    // chosen so that phi_jk and psi_jk are centred near 2^-j k.
    long centring_shift() const { return static_cast<long>(length() / 2) - 1; }
    // Support of phi_jk and psi_jk in units of 2^-j relative to k.
    double support_lower() const { return -static_cast<double>(centring_shift()); }
    double support_upper() const { return static_cast<double>(length()) - 1.0 - static_cast<double>(centring_shift()); }
};

// Periodized basis on [0,1] sampled on n points. Levels m1..J-1 carry
// wavelets; scaling functions may be requested at any level up to log2 n.
class PeriodizedBasis {
public:
    PeriodizedBasis(std::size_t n, int m1, int J, WaveletFilter filter = WaveletFilter::daubechies(4));

    std::size_t n() const { return n_; }
    int m1() const { return m1_; }
    int J() const { return J_; }
    int finest() const { return log2n_; }
    const WaveletFilter& filter() const { return filter_; }

    // Whether 2^m1 exceeds the generator support length L - 1.
    bool satisfies_support_condition() const;

private:
    std::size_t n_;
    int m1_, J_, log2n_;
    WaveletFilter filter_;
};

// Scaling coefficients a at level m and wavelet coefficients b_j for
// j = m..J-1 (b[j - m] holds 2^j entries).
struct CoefficientTree {
    int m = 0;
    int J = 0;
    std::vector<double> a;
    std::vector<std::vector<double>> b;

    static CoefficientTree zeros(int m, int J);

    std::vector<double>& detail(int j) { return b.at(static_cast<std::size_t>(j - m)); }
    const std::vector<double>& detail(int j) const { return b.at(static_cast<std::size_t>(j - m)); }
    double squared_sum() const;
};

PeriodicSignal synthesize_basis_function(const PeriodizedBasis& basis, int level, long k, BasisKind kind);

// Complete decomposition: scaling level m, details m..log2(n)-1. Uses m1
// when no level is given.
CoefficientTree analyze(const PeriodizedBasis& basis, const PeriodicSignal& s, int m);
CoefficientTree analyze(const PeriodizedBasis& basis, const PeriodicSignal& s);

// Synthesis from whatever levels the tree carries; absent finer levels
// count as zero.
PeriodicSignal reconstruct(const PeriodizedBasis& basis, const CoefficientTree& t);

// Row k is the spectrum of the basis function at (level, k).
std::vector<Spectrum> basis_fourier_table(const PeriodizedBasis& basis, int level, BasisKind kind);

} // namespace hwv
