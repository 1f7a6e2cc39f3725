#include "hwv/wavelet.hpp"

#include "hwv/errors.hpp"

#include <cmath>
#include <string>

namespace hwv {

namespace {

std::size_t wrap(long i, std::size_t period)
{
    const long p = static_cast<long>(period);
    long r = i % p;
    return static_cast<std::size_t>(r < 0 ? r + p : r);
}

// One periodized analysis step: 2M samples -> M approximation + M detail.
void analysis_step(const std::vector<double>& in, const std::vector<double>& h, const std::vector<double>& g,
                   std::vector<double>& approx, std::vector<double>& detail)
{
    const std::size_t len = in.size();
    const std::size_t half = len / 2;
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0, d = 0.0;
        for (std::size_t l = 0; l < h.size(); ++l) {
            const double v = in[(2 * k + l) % len];
            a += h[l] * v;
            d += g[l] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

std::vector<double> synthesis_step(const std::vector<double>& approx, const std::vector<double>* detail,
                                   const std::vector<double>& h, const std::vector<double>& g)
{
    const std::size_t half = approx.size();
    const std::size_t len = 2 * half;
    std::vector<double> out(len, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        const double a = approx[k];
        const double d = detail ? (*detail)[k] : 0.0;
        for (std::size_t l = 0; l < h.size(); ++l) out[(2 * k + l) % len] += h[l] * a + g[l] * d;
    }
    return out;
}

std::vector<double> to_public(const std::vector<double>& internal, long shift)
{
    std::vector<double> out(internal.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = internal[wrap(static_cast<long>(k) - shift, internal.size())];
    return out;
}

std::vector<double> to_internal(const std::vector<double>& pub, long shift)
{
    std::vector<double> out(pub.size());
    for (std::size_t k = 0; k < pub.size(); ++k) out[wrap(static_cast<long>(k) - shift, pub.size())] = pub[k];
    return out;
}

} // namespace

std::vector<double> WaveletFilter::highpass() const
{
    const std::size_t L = length();
    std::vector<double> g(L);
    for (std::size_t l = 0; l < L; ++l) g[l] = (l % 2 == 0 ? 1.0 : -1.0) * lowpass[L - 1 - l];
    return g;
}

PeriodizedBasis::PeriodizedBasis(std::size_t n, int m1, int J, WaveletFilter filter)
    : n_(n), m1_(m1), J_(J), log2n_(log2_exact(n)), filter_(std::move(filter))
{
    require(n >= 8, "basis grid must have at least 8 points");
    require(m1 >= 0 && m1 < J && J <= log2n_,
            "basis levels must satisfy 0 <= m1 < J <= log2 n (m1=" + std::to_string(m1) + ", J=" +
                std::to_string(J) + ")");
    require(filter_.length() >= 2 && filter_.length() % 2 == 0, "filter must have an even number of taps");
}

bool PeriodizedBasis::satisfies_support_condition() const
{
    return static_cast<double>(1L << m1_) > static_cast<double>(filter_.length() - 1);
}

CoefficientTree CoefficientTree::zeros(int m, int J)
{
    CoefficientTree t;
    t.m = m;
    t.J = J;
    t.a.assign(std::size_t{1} << m, 0.0);
    for (int j = m; j < J; ++j) t.b.emplace_back(std::size_t{1} << j, 0.0);
    return t;
}

double CoefficientTree::squared_sum() const
{
    double acc = 0.0;
    for (double v : a) acc += v * v;
    for (const auto& level : b)
        for (double v : level) acc += v * v;
    return acc;
}

CoefficientTree analyze(const PeriodizedBasis& basis, const PeriodicSignal& s, int m)
{
    require(s.size() == basis.n(), "analyze: signal size does not match the basis");
    require(m >= 0 && m <= basis.finest(), "analyze: level out of range");
    const auto& h = basis.filter().lowpass;
    const auto g = basis.filter().highpass();
    const long shift = basis.filter().centring_shift();

    CoefficientTree t = CoefficientTree::zeros(m, basis.finest());
    std::vector<double> cur(s.values());
    const double scale = 1.0 / std::sqrt(static_cast<double>(s.size()));
    for (double& v : cur) v *= scale;

    std::vector<double> approx, detail;
    for (int j = basis.finest() - 1; j >= m; --j) {
        analysis_step(cur, h, g, approx, detail);
        t.detail(j) = to_public(detail, shift);
        cur.swap(approx);
    }
    t.a = to_public(cur, shift);
    return t;
}

CoefficientTree analyze(const PeriodizedBasis& basis, const PeriodicSignal& s) { return analyze(basis, s, basis.m1()); }

PeriodicSignal reconstruct(const PeriodizedBasis& basis, const CoefficientTree& t)
{
    require(t.m >= 0 && t.J >= t.m && t.J <= basis.finest(), "reconstruct: tree levels out of range");
    require(t.a.size() == (std::size_t{1} << t.m), "reconstruct: scaling array has the wrong size");
    require(t.b.size() == static_cast<std::size_t>(t.J - t.m), "reconstruct: detail level count mismatch");
    const auto& h = basis.filter().lowpass;
    const auto g = basis.filter().highpass();
    const long shift = basis.filter().centring_shift();

    std::vector<double> cur = to_internal(t.a, shift);
    for (int j = t.m; j < basis.finest(); ++j) {
        if (j < t.J) {
            const auto& pub = t.detail(j);
            require(pub.size() == (std::size_t{1} << j), "reconstruct: detail array has the wrong size");
            const auto d = to_internal(pub, shift);
            cur = synthesis_step(cur, &d, h, g);
        } else {
            cur = synthesis_step(cur, nullptr, h, g);
        }
    }
    const double scale = std::sqrt(static_cast<double>(basis.n()));
    for (double& v : cur) v *= scale;
    return PeriodicSignal(std::move(cur));
}

PeriodicSignal synthesize_basis_function(const PeriodizedBasis& basis, int level, long k, BasisKind kind)
{
    const int top = kind == BasisKind::scaling ? basis.finest() : basis.finest() - 1;
    require(level >= 0 && level <= top, "synthesize_basis_function: level out of range");
    require(k >= 0 && k < (1L << level), "synthesize_basis_function: shift out of range");
    CoefficientTree t = CoefficientTree::zeros(level, kind == BasisKind::scaling ? level : level + 1);
    if (kind == BasisKind::scaling)
        t.a[static_cast<std::size_t>(k)] = 1.0;
    else
        t.b[0][static_cast<std::size_t>(k)] = 1.0;
    return reconstruct(basis, t);
}

std::vector<Spectrum> basis_fourier_table(const PeriodizedBasis& basis, int level, BasisKind kind)
{
    const Spectrum base = forward_transform(synthesize_basis_function(basis, level, 0, kind));
    const std::size_t count = std::size_t{1} << level;
    const std::size_t n = basis.n();
    std::vector<Spectrum> rows;
    rows.reserve(count);
    const double two_pi = 2.0 * std::acos(-1.0);
    for (std::size_t k = 0; k < count; ++k) {
        Spectrum row = base;
        for (std::size_t idx = 0; idx < n; ++idx) {
            const double w = static_cast<double>(row.frequency(idx));
            const double phase = -two_pi * w * static_cast<double>(k) / static_cast<double>(count);
            row[idx] *= cplx(std::cos(phase), std::sin(phase));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace hwv
