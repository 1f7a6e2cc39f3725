#pragma once

#include "hwv/operator.hpp"
#include "hwv/spectral.hpp"
#include "hwv/wavelet.hpp"

#include <vector>

namespace hwv {

// U_j0 (or T_j0): the k = 0 member of a level. Other members are circular
// shifts by k n / 2^j samples.
struct VagueletteLevel {
    int level = 0;
    BasisKind kind = BasisKind::wavelet;
    PeriodicSignal prototype;
    Spectrum spectrum; // basis spectrum divided by conj(q)
    double norm = 0.0;
    double half_width = 0.0; // 99.9% energy half-width around 2^-j k, units of 2^-j
};

class VagueletteTable {
public:
    VagueletteTable(int lowest, int highest, std::vector<VagueletteLevel> wavelet, std::vector<VagueletteLevel> scaling);

    // Levels lowest..highest are populated for both kinds.
    int lowest() const { return lowest_; }
    int highest() const { return highest_; }
    std::size_t n() const { return wavelet_.front().prototype.size(); }

    const VagueletteLevel& level(int j, BasisKind kind) const;
    PeriodicSignal vaguelette(int j, long k, BasisKind kind) const;

    // Largest measured half-widths over all levels.
    double d_U() const { return d_U_; }
    double d_T() const { return d_T_; }

private:
    int lowest_, highest_;
    std::vector<VagueletteLevel> wavelet_, scaling_;
    double d_U_ = 0.0, d_T_ = 0.0;
};

// Levels m1..J-1 of the basis.
VagueletteTable build_vaguelettes(const ConvolutionKernel& kernel, const PeriodizedBasis& basis);

// Estimates a_mk and b_jk on every level of the table.
struct CoefficientEstimates {
    int lowest = 0;
    int highest = 0;
    std::vector<std::vector<double>> scaling;
    std::vector<std::vector<double>> wavelet;

    const std::vector<double>& scaling_at(int m) const { return scaling.at(static_cast<std::size_t>(m - lowest)); }
    const std::vector<double>& wavelet_at(int j) const { return wavelet.at(static_cast<std::size_t>(j - lowest)); }
    // Scaling level m with details m..highest.
    CoefficientTree tree(int m) const;
};

CoefficientEstimates estimate_coefficients(const PeriodicSignal& y, const ForwardOperator& op,
                                           const VagueletteTable& table);
CoefficientTree estimate_coefficients(const PeriodicSignal& y, const ForwardOperator& op,
                                      const VagueletteTable& table, int m);

enum class WeightMode { closed_form, numeric };

// w_jk, the variance of an estimated coefficient in units of sigma^2/n.
// Flagged entries are +inf.
struct VarianceWeights {
    WeightMode mode = WeightMode::numeric;
    int lowest = 0;
    int highest = 0;
    std::vector<std::vector<double>> wavelet;
    std::vector<std::vector<double>> scaling;

    const std::vector<double>& level(int j, BasisKind kind) const;
    double at(int j, long k, BasisKind kind) const { return level(j, kind).at(static_cast<std::size_t>(k)); }
    // Sum of the finite weights of a level.
    double aggregate(int j, BasisKind kind) const;
};

VarianceWeights variance_weights(WeightMode mode, const ForwardOperator& op, const VagueletteTable& table);

struct LevelPartition {
    int level = 0;
    std::vector<long> affected;
    std::vector<long> free;
    std::vector<char> is_affected; // indexed by k
};

struct IndexPartition {
    int lowest = 0;
    int highest = 0;
    int D = 0;
    int D0 = 0;
    std::vector<Singularity> singularities;
    std::vector<LevelPartition> scaling; // K_0m
    std::vector<LevelPartition> wavelet; // K_1j

    const LevelPartition& scaling_level(int m) const { return scaling.at(static_cast<std::size_t>(m - lowest)); }
    const LevelPartition& wavelet_level(int j) const { return wavelet.at(static_cast<std::size_t>(j - lowest)); }
};

// Circular distance between index k and the point c on Z / 2^j.
double index_distance(long k, double c, int j);

IndexPartition partition_indices(int lowest, int highest, const std::vector<Singularity>& singularities, int D, int D0);
IndexPartition partition_indices(const PeriodizedBasis& basis, const std::vector<Singularity>& singularities, int D,
                                 int D0);

} // namespace hwv
