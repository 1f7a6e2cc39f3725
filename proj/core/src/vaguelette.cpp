#include "hwv/vaguelette.hpp"

#include "hwv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace hwv {

namespace {

double energy_half_width(const PeriodicSignal& v, int level)
{
    const std::size_t n = v.size();
    const double cell = static_cast<double>(n) / static_cast<double>(1L << level);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto dist = [n](std::size_t i) { return static_cast<double>(std::min(i, n - i)); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
    double total = 0.0;
    for (double x : v.values()) total += x * x;
    double acc = 0.0;
    for (std::size_t i : order) {
        acc += v[i] * v[i];
        if (acc >= 0.999 * total) return dist(i) / cell;
    }
    return dist(order.back()) / cell;
}

VagueletteLevel make_level(const ConvolutionKernel& kernel, const PeriodizedBasis& basis, int j, BasisKind kind)
{
    VagueletteLevel lv;
    lv.level = j;
    lv.kind = kind;
    const Spectrum base = forward_transform(synthesize_basis_function(basis, j, 0, kind));
    lv.spectrum = base;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const cplx q = kernel.spectrum[i];
        require(q != cplx(0.0, 0.0), "build_vaguelettes: kernel spectrum vanishes at frequency " +
                                         std::to_string(base.frequency(i)));
        lv.spectrum[i] = base[i] / std::conj(q);
    }
    lv.prototype = inverse_transform(lv.spectrum);
    lv.norm = norm(lv.prototype);
    lv.half_width = energy_half_width(lv.prototype, j);
    return lv;
}

long shift_of(int j, long k, std::size_t n) { return k * static_cast<long>(n >> j); }

} // namespace

VagueletteTable::VagueletteTable(int lowest, int highest, std::vector<VagueletteLevel> wavelet,
                                 std::vector<VagueletteLevel> scaling)
    : lowest_(lowest), highest_(highest), wavelet_(std::move(wavelet)), scaling_(std::move(scaling))
{
    require(highest_ >= lowest_ && wavelet_.size() == static_cast<std::size_t>(highest_ - lowest_ + 1) &&
                scaling_.size() == wavelet_.size(),
            "VagueletteTable: inconsistent level range");
    for (const auto& lv : wavelet_) d_U_ = std::max(d_U_, lv.half_width);
    for (const auto& lv : scaling_) d_T_ = std::max(d_T_, lv.half_width);
}

const VagueletteLevel& VagueletteTable::level(int j, BasisKind kind) const
{
    require(j >= lowest_ && j <= highest_, "VagueletteTable: level " + std::to_string(j) + " not tabulated");
    const auto& v = kind == BasisKind::wavelet ? wavelet_ : scaling_;
    return v[static_cast<std::size_t>(j - lowest_)];
}

PeriodicSignal VagueletteTable::vaguelette(int j, long k, BasisKind kind) const
{
    require(k >= 0 && k < (1L << j), "VagueletteTable: shift out of range");
    return level(j, kind).prototype.shifted(shift_of(j, k, n()));
}

VagueletteTable build_vaguelettes(const ConvolutionKernel& kernel, const PeriodizedBasis& basis)
{
    require(kernel.size() == basis.n(), "build_vaguelettes: kernel and basis sizes differ");
    std::vector<VagueletteLevel> wavelet, scaling;
    for (int j = basis.m1(); j < basis.J(); ++j) {
        wavelet.push_back(make_level(kernel, basis, j, BasisKind::wavelet));
        scaling.push_back(make_level(kernel, basis, j, BasisKind::scaling));
    }
    return VagueletteTable(basis.m1(), basis.J() - 1, std::move(wavelet), std::move(scaling));
}

CoefficientTree CoefficientEstimates::tree(int m) const
{
    require(m >= lowest && m <= highest, "CoefficientEstimates: level out of range");
    CoefficientTree t;
    t.m = m;
    t.J = highest + 1;
    t.a = scaling_at(m);
    for (int j = m; j <= highest; ++j) t.b.push_back(wavelet_at(j));
    return t;
}

CoefficientEstimates estimate_coefficients(const PeriodicSignal& y, const ForwardOperator& op,
                                           const VagueletteTable& table)
{
    require(y.size() == op.size() && y.size() == table.n(), "estimate_coefficients: size mismatch");
    const Spectrum Y = forward_transform(op.observation_transform(y));
    const std::size_t n = y.size();

    // <Y, U_jk> for all k at once: inverse transform of Y_w conj(U_j0,w)
    // sampled at the dyadic shifts.
    const auto level_coefficients = [&](const VagueletteLevel& lv) {
        Spectrum prod(n);
        for (std::size_t i = 0; i < n; ++i) prod[i] = Y[i] * std::conj(lv.spectrum[i]);
        const PeriodicSignal corr = inverse_transform(prod);
        std::vector<double> out(std::size_t{1} << lv.level);
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = corr[static_cast<std::size_t>(shift_of(lv.level, static_cast<long>(k), n))];
        return out;
    };

    CoefficientEstimates est;
    est.lowest = table.lowest();
    est.highest = table.highest();
    for (int j = est.lowest; j <= est.highest; ++j) {
        est.scaling.push_back(level_coefficients(table.level(j, BasisKind::scaling)));
        est.wavelet.push_back(level_coefficients(table.level(j, BasisKind::wavelet)));
    }
    return est;
}

CoefficientTree estimate_coefficients(const PeriodicSignal& y, const ForwardOperator& op, const VagueletteTable& table,
                                      int m)
{
    return estimate_coefficients(y, op, table).tree(m);
}

const std::vector<double>& VarianceWeights::level(int j, BasisKind kind) const
{
    require(j >= lowest && j <= highest, "VarianceWeights: level out of range");
    return (kind == BasisKind::wavelet ? wavelet : scaling)[static_cast<std::size_t>(j - lowest)];
}

double VarianceWeights::aggregate(int j, BasisKind kind) const
{
    double acc = 0.0;
    for (double w : level(j, kind))
        if (std::isfinite(w)) acc += w;
    return acc;
}

double index_distance(long k, double c, int j)
{
    const double period = static_cast<double>(1L << j);
    double d = std::fmod(std::abs(static_cast<double>(k) - c), period);
    return std::min(d, period - d);
}

VarianceWeights variance_weights(WeightMode mode, const ForwardOperator& op, const VagueletteTable& table)
{
    VarianceWeights w;
    w.mode = mode;
    w.lowest = table.lowest();
    w.highest = table.highest();
    const auto& sing = op.singularities();
    const double r = op.kernel().decay_order;
    const auto& rho = op.noise_profile();
    const std::size_t n = table.n();

    const auto closed = [&](int j, long k) {
        const double lj = static_cast<double>(j);
        double spatial = sing.empty() ? 1.0 : 0.0;
        for (const auto& s : sing) {
            const double d = index_distance(k, std::ldexp(s.location, j), j);
            spatial = std::max(spatial, std::exp2(lj * s.order) / (std::pow(d, s.order) + 1.0));
        }
        return std::exp2(lj * 2.0 * r) * spatial;
    };

    const auto numeric = [&](const VagueletteLevel& lv, long k) {
        for (const auto& s : sing)
            if (s.order >= 1.0 && index_distance(k, std::ldexp(s.location, lv.level), lv.level) < lv.half_width)
                return std::numeric_limits<double>::infinity();
        const long off = shift_of(lv.level, k, n);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(rho[i])) continue; // masked sample, Y_i = 0
            const long src = (static_cast<long>(i) - off) % static_cast<long>(n);
            const double u = lv.prototype[static_cast<std::size_t>(src < 0 ? src + static_cast<long>(n) : src)];
            acc += rho[i] * u * u;
        }
        return acc / static_cast<double>(n);
    };

    for (int j = w.lowest; j <= w.highest; ++j) {
        for (BasisKind kind : {BasisKind::wavelet, BasisKind::scaling}) {
            const auto& lv = table.level(j, kind);
            std::vector<double> row(std::size_t{1} << j);
            for (std::size_t k = 0; k < row.size(); ++k)
                row[k] = mode == WeightMode::closed_form ? closed(j, static_cast<long>(k))
                                                         : numeric(lv, static_cast<long>(k));
            (kind == BasisKind::wavelet ? w.wavelet : w.scaling).push_back(std::move(row));
        }
    }
    return w;
}

IndexPartition partition_indices(int lowest, int highest, const std::vector<Singularity>& singularities, int D, int D0)
{
    require(D >= 0 && D0 >= 0, "partition_indices: half-widths must be nonnegative");
    require(lowest >= 0 && highest >= lowest, "partition_indices: bad level range");
    IndexPartition p;
    p.lowest = lowest;
    p.highest = highest;
    p.D = D;
    p.D0 = D0;
    p.singularities = singularities;
    const auto build = [&](int j, int half) {
        LevelPartition lp;
        lp.level = j;
        const long count = 1L << j;
        lp.is_affected.assign(static_cast<std::size_t>(count), 0);
        for (long k = 0; k < count; ++k) {
            bool hit = false;
            for (const auto& s : singularities)
                hit = hit || index_distance(k, std::ldexp(s.location, j), j) < static_cast<double>(half);
            lp.is_affected[static_cast<std::size_t>(k)] = hit ? 1 : 0;
            (hit ? lp.affected : lp.free).push_back(k);
        }
        return lp;
    };
    for (int j = lowest; j <= highest; ++j) {
        p.scaling.push_back(build(j, D0));
        p.wavelet.push_back(build(j, D));
    }
    return p;
}

IndexPartition partition_indices(const PeriodizedBasis& basis, const std::vector<Singularity>& singularities, int D,
                                 int D0)
{
    return partition_indices(basis.m1(), basis.J() - 1, singularities, D, D0);
}

} // namespace hwv
