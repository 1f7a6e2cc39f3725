#include "hwv/threshold.hpp"

#include "hwv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hwv {

namespace {

void tile(long first, long last, bool from_right, std::size_t size, int level, BlockSide side,
          std::vector<Block>& out)
{
    const long s = static_cast<long>(size);
    if (first > last) return;
    std::vector<Block> run;
    if (!from_right) {
        for (long b = first; b <= last; b += s) {
            Block blk{level, side, {}};
            for (long k = b; k <= std::min(last, b + s - 1); ++k) blk.members.push_back(k);
            run.push_back(std::move(blk));
        }
    } else {
        for (long e = last; e >= first; e -= s) {
            Block blk{level, side, {}};
            for (long k = std::max(first, e - s + 1); k <= e; ++k) blk.members.push_back(k);
            run.push_back(std::move(blk));
        }
        std::reverse(run.begin(), run.end());
    }
    for (auto& b : run) out.push_back(std::move(b));
}

std::vector<Block> level_blocks(const LevelPartition& lp, const std::vector<Singularity>& sing, int D,
                                std::size_t size)
{
    const long count = 1L << lp.level;
    // cut[k]: a singular boundary sits between k-1 and k.
    std::vector<char> cut(static_cast<std::size_t>(count) + 1, 0);
    if (D == 0) {
        for (const auto& s : sing) {
            const long p = static_cast<long>(std::ceil(std::ldexp(s.location, lp.level))) % count;
            cut[static_cast<std::size_t>(p)] = 1;
        }
    }
    std::vector<Block> out;
    long k = 0;
    while (k < count) {
        if (lp.is_affected[static_cast<std::size_t>(k)]) {
            ++k;
            continue;
        }
        const long first = k;
        long last = k;
        while (last + 1 < count && !lp.is_affected[static_cast<std::size_t>(last + 1)] &&
               !cut[static_cast<std::size_t>(last + 1)])
            ++last;
        const bool left_sing = (first > 0 && lp.is_affected[static_cast<std::size_t>(first - 1)]) ||
                               cut[static_cast<std::size_t>(first)];
        const bool right_sing = (last + 1 < count && lp.is_affected[static_cast<std::size_t>(last + 1)]) ||
                                (last + 1 < count && cut[static_cast<std::size_t>(last + 1)]) ||
                                (last + 1 == count && cut[0]);
        if (left_sing && right_sing) {
            const long mid = (first + last + 1) / 2;
            tile(first, mid - 1, false, size, lp.level, BlockSide::right, out);
            tile(mid, last, true, size, lp.level, BlockSide::left, out);
        } else if (left_sing) {
            tile(first, last, false, size, lp.level, BlockSide::right, out);
        } else if (right_sing) {
            tile(first, last, true, size, lp.level, BlockSide::left, out);
        } else {
            tile(first, last, false, size, lp.level, BlockSide::none, out);
        }
        k = last + 1;
    }
    return out;
}

} // namespace

std::size_t block_size_for(double eps)
{
    require(eps > 0.0 && eps < 1.0, "block size: eps must lie in (0, 1)");
    return static_cast<std::size_t>(std::max(1.0, std::round(std::log(1.0 / eps))));
}

BlockLayout build_blocks(const IndexPartition& partition, double eps)
{
    BlockLayout layout;
    layout.block_size = block_size_for(eps);
    layout.lowest = partition.lowest;
    layout.highest = partition.highest;
    for (int j = partition.lowest; j <= partition.highest; ++j)
        layout.levels.push_back(
            level_blocks(partition.wavelet_level(j), partition.singularities, partition.D, layout.block_size));
    return layout;
}

double risk_bound(const BlockLayout& layout, const VarianceWeights& weights, int j, std::size_t l, double eps)
{
    const auto& blocks = layout.level(j);
    require(l < blocks.size(), "risk_bound: block index out of range");
    double acc = 0.0;
    for (long k : blocks[l].members) acc += weights.at(j, k, BasisKind::wavelet);
    return eps * acc;
}

double ThresholdRule::default_hard_constant(std::size_t n) { return std::sqrt(2.0 * std::log(static_cast<double>(n))); }

CoefficientTree apply_threshold(const CoefficientTree& tree, const BlockLayout& layout, const ThresholdRule& rule,
                                const IndexPartition& partition, const VarianceWeights& weights)
{
    require(rule.constant >= 0.0, "apply_threshold: threshold constant must be nonnegative");
    require(tree.m >= partition.lowest && tree.J - 1 <= partition.highest && tree.J - 1 <= layout.highest,
            "apply_threshold: tree levels exceed the partition");
    CoefficientTree out = tree;

    const auto& k0 = partition.scaling_level(tree.m);
    for (std::size_t k = 0; k < out.a.size(); ++k)
        if (k0.is_affected[k]) out.a[k] = 0.0;

    const double c2 = rule.constant * rule.constant;
    for (int j = tree.m; j < tree.J; ++j) {
        const auto& in = tree.detail(j);
        auto& dst = out.detail(j);
        std::fill(dst.begin(), dst.end(), 0.0);
        const auto& blocks = layout.level(j);
        for (std::size_t l = 0; l < blocks.size(); ++l) {
            const auto& members = blocks[l].members;
            if (rule.kind == ThresholdKind::block) {
                double stat = 0.0;
                for (long k : members) stat += in[static_cast<std::size_t>(k)] * in[static_cast<std::size_t>(k)];
                if (stat >= c2 * risk_bound(layout, weights, j, l, rule.eps))
                    for (long k : members) dst[static_cast<std::size_t>(k)] = in[static_cast<std::size_t>(k)];
            } else {
                for (long k : members) {
                    const double b = in[static_cast<std::size_t>(k)];
                    if (b * b >= c2 * rule.eps * weights.at(j, k, BasisKind::wavelet))
                        dst[static_cast<std::size_t>(k)] = b;
                }
            }
        }
    }
    return out;
}

int default_top_level(std::size_t n, double eps, double alpha, double beta)
{
    require(eps > 0.0 && eps < 1.0, "top level: eps must lie in (0, 1)");
    const int cap = log2_exact(n) - 1;
    const double raw = std::ceil(2.0 / (alpha + beta + 2.0) * std::log2(1.0 / eps));
    return std::min(cap, static_cast<int>(raw));
}

FreeEstimate singularity_free_estimate(const PeriodizedBasis& basis, int m, const CoefficientEstimates& estimates,
                                       const IndexPartition& partition, const BlockLayout& layout,
                                       const ThresholdRule& rule, const VarianceWeights& weights)
{
    require(m >= basis.m1() && m <= basis.J() - 1,
            "singularity_free_estimate: level " + std::to_string(m) + " outside [m1, J-1]");
    FreeEstimate fe{PeriodicSignal(basis.n()),
                    apply_threshold(estimates.tree(m), layout, rule, partition, weights)};
    fe.signal = reconstruct(basis, fe.tree);
    return fe;
}

} // namespace hwv
