#pragma once

#include "hwv/galerkin.hpp"
#include "hwv/operator.hpp"
#include "hwv/threshold.hpp"
#include "hwv/vaguelette.hpp"
#include "hwv/wavelet.hpp"

#include <optional>
#include <vector>

namespace hwv {

struct EstimatorSettings {
    int m1 = 1;
    std::optional<int> top_level;     // J; default from the noise level and operator degrees
    int vanishing_moments = 4;
    double kappa = 1.8;
    ThresholdKind threshold = ThresholdKind::hard;
    std::optional<double> threshold_constant; // default sqrt(2 ln n) (hard) or 1 (block)
    WeightMode weights = WeightMode::numeric;
    std::optional<int> D;             // default ceil(d_U)
    std::optional<int> D0;            // default ceil(d_T)
    bool lepski_sigma_squared = false;
    bool singularity_aware = true;    // false gives the plain wavelet-vaguelette estimator
};

// Supports of phi_mk and psi_mk in units of 2^-m relative to k.
struct SupportBounds {
    double phi_lower = 0.0, phi_upper = 0.0;
    double psi_lower = 0.0, psi_upper = 0.0;

    static SupportBounds of(const WaveletFilter& filter);
};

// Grid mask of Omega_m, the union over singularities of the x with
// min(L_phi - D0, L_psi - D) < 2^m (x - x0) < max(U_phi + D0, U_psi + D).
std::vector<char> omega_neighborhood(int m, std::size_t n, const std::vector<Singularity>& singularities,
                                     const SupportBounds& supports, int D, int D0);

// Everything about the estimator that does not depend on the data.
class HybridEstimator {
public:
    HybridEstimator(ForwardOperator op, double sigma, EstimatorSettings settings = {});

    const ForwardOperator& op() const { return op_; }
    const EstimatorSettings& settings() const { return settings_; }
    const PeriodizedBasis& basis() const { return basis_; }
    const VagueletteTable& table() const { return table_; }
    const VarianceWeights& weights() const { return weights_; }
    const IndexPartition& partition() const { return partition_; }
    const BlockLayout& layout() const { return layout_; }
    const ThresholdRule& rule() const { return rule_; }

    std::size_t n() const { return basis_.n(); }
    double sigma() const { return sigma_; }
    double eps() const { return eps_; }
    int m1() const { return basis_.m1(); }
    int J() const { return basis_.J(); }
    int D() const { return partition_.D; }
    int D0() const { return partition_.D0; }
    bool uses_lepski() const;

    const ScalingImages& images(int m) const;
    const std::vector<char>& omega(int m) const;
    const std::vector<std::vector<char>>& omegas() const { return omega_; }
    // sum over free k of Var-profile(2^-j k) ||T_jk||^2
    const std::vector<double>& lambda_inv2() const { return lambda_inv2_; }

private:
    ForwardOperator op_;
    EstimatorSettings settings_;
    double sigma_, eps_;
    PeriodizedBasis basis_;
    VagueletteTable table_;
    IndexPartition partition_;
    VarianceWeights weights_;
    BlockLayout layout_;
    ThresholdRule rule_;
    std::vector<ScalingImages> images_;
    std::vector<std::vector<char>> omega_;
    std::vector<double> lambda_inv2_;
};

struct LevelEstimate {
    int m = 0;
    PeriodicSignal f0;
    PeriodicSignal fc;
    PeriodicSignal combined;
    CoefficientTree tree; // thresholded free coefficients
    bool has_singular_block = false;
    SingularBlockSolution solution;
};

LevelEstimate hybrid_at_level(const HybridEstimator& est, int m, const PeriodicSignal& y,
                              const CoefficientEstimates& coefficients);
LevelEstimate hybrid_at_level(const HybridEstimator& est, int m, const PeriodicSignal& y);

struct LepskiTrace {
    int lowest = 0;
    int highest = 0;
    std::vector<std::vector<double>> L; // L[m - lowest][j - lowest], zero for j <= m
    std::vector<double> lambda_inv2;
    double kappa = 0.0;
    int m_hat = 0;
    bool fallback = false;

    double at(int m, int j) const { return L.at(static_cast<std::size_t>(m - lowest)).at(static_cast<std::size_t>(j - lowest)); }
    double row_max(int m) const;
};

// L_mj = ||(f_m - f_j) 1(Omega_m)||^2 / (sigma^2 n^-1 ln n lambda_j^-2), with
// 0/0 read as 0 and x/0 as +inf.
LepskiTrace lepski_matrix(const std::vector<LevelEstimate>& estimates, const std::vector<std::vector<char>>& omega,
                          double sigma, std::size_t n, const std::vector<double>& lambda_inv2);

// Smallest m whose row maximum is at most kappa^2. The last row has no
// comparisons and always qualifies; reaching it sets the fallback flag.
int select_level(LepskiTrace& trace, double kappa);

struct HybridEstimate {
    int m = 0;
    PeriodicSignal f0;
    PeriodicSignal fc;
    PeriodicSignal combined;
    LepskiTrace trace;
    std::vector<LevelEstimate> levels;
};

HybridEstimate adaptive_estimate(const HybridEstimator& est, const PeriodicSignal& y);

struct TheoreticalLevels {
    int m1 = 0;
    int m0 = 0;
    int J = 0;
};

// n = 0 leaves the levels uncapped by the grid.
TheoreticalLevels theoretical_levels(double eps, double alpha, double beta, double s, double p, std::size_t n = 0,
                                     const WaveletFilter& filter = WaveletFilter::daubechies(4));

} // namespace hwv
