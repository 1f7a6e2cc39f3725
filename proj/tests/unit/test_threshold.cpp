#include "doctest.h"
#include "hwv/errors.hpp"
#include "hwv/harness.hpp"
#include "hwv/threshold.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace hwv;

namespace {

struct Fixture {
    std::size_t n = 1024;
    PeriodizedBasis basis{1024, 1, 8};
    ForwardOperator op;
    VagueletteTable table;
    IndexPartition partition;
    VarianceWeights weights;

    explicit Fixture(double alpha, int D = 3, int D0 = 4)
        : op(kernel_q1(5.0, 1024), [&] {
              ProfileParams p;
              p.alpha = alpha;
              return make_mu_profile(alpha > 0 ? ProfileKind::power_zero : ProfileKind::constant, p, 1024);
          }()),
          table(build_vaguelettes(op.kernel(), basis)),
          partition(partition_indices(basis, op.singularities(), D, D0)),
          weights(variance_weights(WeightMode::numeric, op, table))
    {
    }
};

CoefficientTree random_tree(int m, int J, unsigned seed, double scale)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, scale);
    auto t = CoefficientTree::zeros(m, J);
    for (double& a : t.a) a = nd(gen);
    for (auto& lvl : t.b)
        for (double& b : lvl) b = nd(gen);
    return t;
}

} // namespace

TEST_CASE("block size")
{
    CHECK(block_size_for(std::exp(-10.0)) == 10);
    CHECK(block_size_for(0.9) == 1);
    CHECK(block_size_for(0.02 * 0.02 / 1024) == 15);
    CHECK_THROWS_AS(block_size_for(0.0), PreconditionError);
    CHECK_THROWS_AS(block_size_for(1.5), PreconditionError);
}

TEST_CASE("block layout")
{
    const Fixture fx(2.0);
    const double eps = 0.02 * 0.02 / 1024;
    const auto layout = build_blocks(fx.partition, eps);
    for (int j = 1; j < 8; ++j) {
        CAPTURE(j);
        const auto& lp = fx.partition.wavelet_level(j);
        std::set<long> covered;
        for (const auto& b : layout.level(j)) {
            CHECK(b.members.size() <= layout.block_size);
            CHECK(!b.members.empty());
            for (std::size_t i = 1; i < b.members.size(); ++i) CHECK(b.members[i] == b.members[i - 1] + 1);
            for (long k : b.members) CHECK(covered.insert(k).second);
        }
        CHECK(covered == std::set<long>(lp.free.begin(), lp.free.end()));
    }
    // levels narrower than a block: one block on each side of the window
    CHECK(layout.level(3).size() <= 2);

    SUBCASE("blocks run outward from the window")
    {
        // window at level 7 is 40..45
        long first_right = 1000, last_left = -1;
        for (const auto& b : layout.level(7)) {
            if (b.side == BlockSide::right) first_right = std::min(first_right, b.members.front());
            if (b.side == BlockSide::left) last_left = std::max(last_left, b.members.back());
        }
        CHECK(first_right == 46);
        CHECK(last_left == 39);
    }
    SUBCASE("no window, no singular boundary")
    {
        const Fixture flat(0.0);
        const auto l = build_blocks(flat.partition, eps);
        for (int j = 1; j < 8; ++j) {
            std::size_t total = 0;
            for (const auto& b : l.level(j)) total += b.members.size();
            CHECK(total == (1u << j));
        }
    }
}

TEST_CASE("risk bounds")
{
    const double eps = 1e-6;
    SUBCASE("homogeneous blocks share a bound")
    {
        const Fixture fx(0.0);
        const auto layout = build_blocks(fx.partition, eps);
        for (int j = 4; j < 8; ++j) {
            const auto& blocks = layout.level(j);
            const double ref = risk_bound(layout, fx.weights, j, 0, eps) / blocks[0].members.size();
            for (std::size_t l = 0; l < blocks.size(); ++l)
                CHECK(risk_bound(layout, fx.weights, j, l, eps) / blocks[l].members.size() ==
                      doctest::Approx(ref).epsilon(0.01));
        }
    }
    SUBCASE("risk falls with distance from the zero")
    {
        const Fixture fx(2.0);
        const double k0 = 64.0 / 3.0;
        const auto centre = [&](const Block& b) {
            double c = 0.0;
            for (long k : b.members) c += static_cast<double>(k);
            return index_distance(std::lround(c / static_cast<double>(b.members.size())), k0, 6);
        };
        // single-coefficient blocks (eps = 1/2 gives S = 1)
        const auto unit = build_blocks(fx.partition, 0.5);
        REQUIRE(unit.block_size == 1);
        std::size_t nearest = 0, farthest = 0;
        for (std::size_t l = 0; l < unit.level(6).size(); ++l) {
            if (centre(unit.level(6)[l]) < centre(unit.level(6)[nearest])) nearest = l;
            if (centre(unit.level(6)[l]) > centre(unit.level(6)[farthest])) farthest = l;
        }
        CHECK(risk_bound(unit, fx.weights, 6, nearest, 0.5) / risk_bound(unit, fx.weights, 6, farthest, 0.5) > 10.0);

        // full-size blocks on the right of the window, walking outward
        const auto layout = build_blocks(fx.partition, eps);
        std::vector<std::pair<double, double>> right;
        for (std::size_t l = 0; l < layout.level(6).size(); ++l) {
            const auto& b = layout.level(6)[l];
            if (b.side == BlockSide::right && b.members.size() == layout.block_size)
                right.emplace_back(centre(b), risk_bound(layout, fx.weights, 6, l, eps));
        }
        std::sort(right.begin(), right.end());
        REQUIRE(right.size() >= 2);
        for (std::size_t i = 1; i < right.size(); ++i) CHECK(right[i].second < right[i - 1].second);

        CHECK(risk_bound(layout, fx.weights, 6, 0, eps / 4) ==
              doctest::Approx(risk_bound(layout, fx.weights, 6, 0, eps) / 4).epsilon(1e-12));
    }
}

TEST_CASE("threshold decisions")
{
    const Fixture fx(2.0);
    const double eps = 0.02 * 0.02 / 1024;
    const auto layout = build_blocks(fx.partition, eps);
    const auto tree = random_tree(2, 8, 7, 0.05);

    SUBCASE("block rule against a scalar re-implementation")
    {
        const auto rule = ThresholdRule::block(1.0, eps);
        const auto out = apply_threshold(tree, layout, rule, fx.partition, fx.weights);
        for (int j = 2; j < 8; ++j)
            for (const auto& b : layout.level(j)) {
                double stat = 0.0, risk = 0.0;
                for (long k : b.members) {
                    stat += tree.detail(j)[k] * tree.detail(j)[k];
                    risk += eps * fx.weights.at(j, k, BasisKind::wavelet);
                }
                const bool keep = stat >= risk;
                for (long k : b.members) CHECK(out.detail(j)[k] == (keep ? tree.detail(j)[k] : 0.0));
            }
    }
    SUBCASE("hard rule against a scalar re-implementation")
    {
        const double t = ThresholdRule::default_hard_constant(1024);
        CHECK(t == doctest::Approx(std::sqrt(2.0 * std::log(1024.0))));
        const auto out = apply_threshold(tree, layout, ThresholdRule::hard(t, eps), fx.partition, fx.weights);
        for (int j = 2; j < 8; ++j)
            for (long k : fx.partition.wavelet_level(j).free) {
                const double b = tree.detail(j)[k];
                const bool keep = b * b >= t * t * eps * fx.weights.at(j, k, BasisKind::wavelet);
                CHECK(out.detail(j)[k] == (keep ? b : 0.0));
            }
    }
    SUBCASE("affected entries are always zero")
    {
        for (const auto& rule : {ThresholdRule::block(0.0, eps), ThresholdRule::hard(0.0, eps)}) {
            const auto out = apply_threshold(tree, layout, rule, fx.partition, fx.weights);
            for (int j = 2; j < 8; ++j) {
                for (long k : fx.partition.wavelet_level(j).affected) CHECK(out.detail(j)[k] == 0.0);
                for (long k : fx.partition.wavelet_level(j).free) CHECK(out.detail(j)[k] == tree.detail(j)[k]);
            }
            for (long k : fx.partition.scaling_level(2).affected) CHECK(out.a[k] == 0.0);
            for (long k : fx.partition.scaling_level(2).free) CHECK(out.a[k] == tree.a[k]);
        }
    }
    SUBCASE("idempotent and monotone in the constant")
    {
        for (auto kind : {ThresholdKind::block, ThresholdKind::hard}) {
            const ThresholdRule lo{kind, 0.5, eps}, hi{kind, 2.0, eps};
            const auto once = apply_threshold(tree, layout, lo, fx.partition, fx.weights);
            const auto twice = apply_threshold(once, layout, lo, fx.partition, fx.weights);
            const auto strict = apply_threshold(tree, layout, hi, fx.partition, fx.weights);
            for (int j = 2; j < 8; ++j)
                for (std::size_t k = 0; k < tree.detail(j).size(); ++k) {
                    CHECK(twice.detail(j)[k] == once.detail(j)[k]);
                    if (strict.detail(j)[k] != 0.0) CHECK(once.detail(j)[k] != 0.0);
                }
        }
    }
    SUBCASE("zero tree")
    {
        const auto out = apply_threshold(CoefficientTree::zeros(2, 8), layout, ThresholdRule::block(1.0, eps),
                                         fx.partition, fx.weights);
        CHECK(out.squared_sum() == 0.0);
    }
}

TEST_CASE("top level")
{
    CHECK(default_top_level(1024, 0.02 * 0.02 / 1024, 4.0, 4.0) == 5);
    CHECK(default_top_level(1024, std::exp2(-20.0), 2.0, 4.0) == 5);
    CHECK(default_top_level(64, 1e-12, 0.0, 4.0) == 5);
    CHECK_THROWS_AS(default_top_level(1024, 0.0, 1.0, 4.0), PreconditionError);
}

TEST_CASE("singularity-free estimate")
{
    const std::size_t n = 1024;
    const PeriodizedBasis basis(n, 1, 8);
    const auto q = kernel_q1(5.0, n);
    const ForwardOperator op(q, make_mu_profile(ProfileKind::constant, {}, n));
    const auto table = build_vaguelettes(q, basis);
    const auto weights = variance_weights(WeightMode::numeric, op, table);
    const auto f = make_test_signal("blip", n);
    const auto est = estimate_coefficients(op.apply(f), op, table);

    SUBCASE("no windows, no noise, no threshold reproduces the projection")
    {
        const auto part = partition_indices(basis, {{1.0 / 3.0, 2.0}}, 0, 0);
        const auto layout = build_blocks(part, 1e-6);
        const auto fe = singularity_free_estimate(basis, 2, est, part, layout, ThresholdRule::block(0.0, 1e-6), weights);
        auto truth = analyze(basis, f, 2);
        for (int j = 8; j < truth.J; ++j) std::fill(truth.detail(j).begin(), truth.detail(j).end(), 0.0);
        const auto proj = reconstruct(basis, truth);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(fe.signal[i] - proj[i]) < 1e-6);
    }
    SUBCASE("affected coefficients vanish")
    {
        const auto part = partition_indices(basis, {{1.0 / 3.0, 2.0}}, 3, 4);
        const auto layout = build_blocks(part, 1e-6);
        const auto fe = singularity_free_estimate(basis, 3, est, part, layout, ThresholdRule::block(0.0, 1e-6), weights);
        for (int j = 3; j < 8; ++j)
            for (long k : part.wavelet_level(j).affected) CHECK(fe.tree.detail(j)[k] == 0.0);
        const auto back = analyze(basis, fe.signal, 3);
        for (long k : part.wavelet_level(5).affected) CHECK(std::abs(back.detail(5)[k]) < 1e-10);
    }
    CHECK_THROWS_AS(singularity_free_estimate(basis, 8, est, partition_indices(basis, {}, 0, 0),
                                              build_blocks(partition_indices(basis, {}, 0, 0), 1e-6),
                                              ThresholdRule::hard(1.0, 1e-6), weights),
                    PreconditionError);
}
