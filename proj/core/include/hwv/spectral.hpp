#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace hwv {

using cplx = std::complex<double>;

bool is_power_of_two(std::size_t n);
// log2 of a power of two; throws otherwise.
int log2_exact(std::size_t n);

// Real samples v_i = f(i/n), i = 0..n-1, of a 1-periodic function.
// n must be a power of two, at least 8, and every sample finite.
class PeriodicSignal {
public:
    PeriodicSignal() = default;
    explicit PeriodicSignal(std::size_t n, double fill = 0.0);
    explicit PeriodicSignal(std::vector<double> values);

    static PeriodicSignal sample(std::size_t n, const std::function<double(double)>& fn);

    std::size_t size() const { return values_.size(); }
    double grid_point(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(size()); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    // Circular shift: result[i] = (*this)[(i - offset) mod n].
    PeriodicSignal shifted(long offset) const;

    PeriodicSignal& operator+=(const PeriodicSignal& other);
    PeriodicSignal& operator-=(const PeriodicSignal& other);
    PeriodicSignal& operator*=(double c);

private:
    std::vector<double> values_;
};

PeriodicSignal operator+(PeriodicSignal a, const PeriodicSignal& b);
PeriodicSignal operator-(PeriodicSignal a, const PeriodicSignal& b);
PeriodicSignal operator*(double c, PeriodicSignal a);

// Fourier coefficients c_w for w in {-n/2+1, ..., n/2}, stored in FFT
// order (index w mod n).
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(std::size_t n);
    explicit Spectrum(std::vector<cplx> fft_ordered);

    std::size_t size() const { return c_.size(); }

    // Signed frequency of storage slot idx.
    long frequency(std::size_t idx) const;
    std::size_t slot(long omega) const;

    cplx at(long omega) const { return c_[slot(omega)]; }
    cplx& at(long omega) { return c_[slot(omega)]; }
    cplx operator[](std::size_t idx) const { return c_[idx]; }
    cplx& operator[](std::size_t idx) { return c_[idx]; }

    const std::vector<cplx>& coefficients() const { return c_; }
    std::vector<cplx>& coefficients() { return c_; }

    bool is_conjugate_symmetric(double rel_tol = 1e-9) const;

private:
    std::vector<cplx> c_;
};

// c_w = (1/n) sum_i v_i exp(-i 2 pi w i / n)
Spectrum forward_transform(const PeriodicSignal& s);
// v_i = sum_w c_w exp(i 2 pi w i / n). Rejects spectra that are not
// conjugate symmetric.
PeriodicSignal inverse_transform(const Spectrum& c);

// Periodic convolution with a kernel given by its Fourier coefficients.
PeriodicSignal circular_convolve(const PeriodicSignal& f, const Spectrum& kernel);

// Grid discretization of the L2 inner product: (1/n) sum f_i g_i.
double inner_product(const PeriodicSignal& f, const PeriodicSignal& g);
double squared_norm(const PeriodicSignal& f);
double norm(const PeriodicSignal& f);

} // namespace hwv
