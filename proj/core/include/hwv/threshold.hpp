#pragma once

#include "hwv/vaguelette.hpp"
#include "hwv/wavelet.hpp"

#include <cstddef>
#include <vector>

namespace hwv {

enum class BlockSide { left, right, none };

struct Block {
    int level = 0;
    BlockSide side = BlockSide::none; // position relative to the nearest singularity window
    std::vector<long> members;
};

struct BlockLayout {
    std::size_t block_size = 1;
    int lowest = 0;
    int highest = 0;
    std::vector<std::vector<Block>> levels;

    const std::vector<Block>& level(int j) const { return levels.at(static_cast<std::size_t>(j - lowest)); }
};

// ln(1/eps) rounded, at least one.
std::size_t block_size_for(double eps);

// Tiles the free wavelet indices of every partition level into blocks
// running outward from the singularity windows.
BlockLayout build_blocks(const IndexPartition& partition, double eps);

// eps times the summed weights of the block members.
double risk_bound(const BlockLayout& layout, const VarianceWeights& weights, int j, std::size_t l, double eps);

enum class ThresholdKind { block, hard };

struct ThresholdRule {
    ThresholdKind kind = ThresholdKind::hard;
    double constant = 1.0; // tau for blocks, t for single coefficients
    double eps = 0.0;

    static ThresholdRule block(double tau, double eps) { return {ThresholdKind::block, tau, eps}; }
    static ThresholdRule hard(double t, double eps) { return {ThresholdKind::hard, t, eps}; }
    static double default_hard_constant(std::size_t n);
};

// Keep/kill on free wavelet coefficients. Affected entries of both the
// scaling and the wavelet part are zeroed; free scaling entries pass through.
CoefficientTree apply_threshold(const CoefficientTree& tree, const BlockLayout& layout, const ThresholdRule& rule,
                                const IndexPartition& partition, const VarianceWeights& weights);

// min(log2 n - 1, ceil(2 / (alpha + beta + 2) log2(1/eps)))
int default_top_level(std::size_t n, double eps, double alpha, double beta);

struct FreeEstimate {
    PeriodicSignal signal;
    CoefficientTree tree;
};

FreeEstimate singularity_free_estimate(const PeriodizedBasis& basis, int m, const CoefficientEstimates& estimates,
                                       const IndexPartition& partition, const BlockLayout& layout,
                                       const ThresholdRule& rule, const VarianceWeights& weights);

} // namespace hwv
