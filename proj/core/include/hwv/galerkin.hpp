#pragma once

#include "hwv/operator.hpp"
#include "hwv/vaguelette.hpp"
#include "hwv/wavelet.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hwv {

// w_mk = Q phi_mk for every k at level m.
struct ScalingImages {
    int level = 0;
    std::vector<PeriodicSignal> images;
    std::vector<double> norms;
};

ScalingImages forward_scaling_images(int m, const ForwardOperator& op, const PeriodizedBasis& basis);

struct SingularBlockSystem {
    int level = 0;
    std::vector<long> affected; // K_0m, row/column order of A
    std::vector<long> free;     // K_0m complement, column order of B
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::VectorXd c;
    Eigen::VectorXd h;
};

// A_lk = <w_ml, w_mk>, B_lv = <w_ml, w_mv>, c_l = <w_ml, y>, h_v = a_hat[v].
SingularBlockSystem assemble_system(int m, const PeriodicSignal& y, const LevelPartition& partition,
                                    const ScalingImages& images, const std::vector<double>& a_hat);

struct SingularBlockSolution {
    Eigen::VectorXd z;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    double condition = 0.0;
    double residual = 0.0; // ||A z - (c - B h)||
};

// z = A^-1 (c - B h). Throws IllConditionedError when the smallest
// eigenvalue of A is below 1e-12 trace(A).
SingularBlockSolution solve_singular_block(const SingularBlockSystem& system);

// sum over K_0m of z_k phi_mk
PeriodicSignal singular_estimate(const PeriodizedBasis& basis, int m, const std::vector<long>& affected,
                                 const Eigen::VectorXd& z);

} // namespace hwv
