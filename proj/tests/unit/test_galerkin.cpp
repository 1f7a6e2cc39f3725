#include "doctest.h"
#include "hwv/adaptive.hpp"
#include "hwv/errors.hpp"
#include "hwv/galerkin.hpp"
#include "hwv/harness.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace hwv;

namespace {

ForwardOperator make_op(std::size_t n, double alpha)
{
    ProfileParams p;
    p.alpha = alpha;
    return ForwardOperator(kernel_q1(5.0, n), make_mu_profile(alpha > 0 ? ProfileKind::power_zero : ProfileKind::constant, p, n));
}

std::vector<double> free_values(const std::vector<double>& a, const LevelPartition& lp)
{
    std::vector<double> h(a.size(), 0.0);
    for (long v : lp.free) h[static_cast<std::size_t>(v)] = a[static_cast<std::size_t>(v)];
    return h;
}

} // namespace

TEST_CASE("scaling images")
{
    const std::size_t n = 1024;
    const PeriodizedBasis basis(n, 1, 7);
    SUBCASE("shift invariant without a multiplier")
    {
        const auto op = make_op(n, 0.0);
        const auto im = forward_scaling_images(4, op, basis);
        REQUIRE(im.images.size() == 16);
        for (double v : im.norms) CHECK(std::abs(v - im.norms[0]) < 1e-8);
        const auto direct = op.apply(synthesize_basis_function(basis, 4, 5, BasisKind::scaling));
        for (std::size_t i = 0; i < n; ++i) CHECK(im.images[5][i] == doctest::Approx(direct[i]).epsilon(1e-12));
    }
    SUBCASE("smallest next to the zero")
    {
        const auto op = make_op(n, 2.0);
        for (int m : {3, 4, 5}) {
            const auto im = forward_scaling_images(m, op, basis);
            const auto best = std::min_element(im.norms.begin(), im.norms.end()) - im.norms.begin();
            // db4 scaling functions put their energy well left of 2^-m k
            long nearest = 0;
            double gap = 1.0;
            for (long k = 0; k < (1L << m); ++k) {
                const auto phi = synthesize_basis_function(basis, m, k, BasisKind::scaling);
                double c = 0.0, e = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = static_cast<double>(i) / static_cast<double>(n);
                    c += phi[i] * phi[i] * std::remainder(x - 1.0 / 3.0, 1.0);
                    e += phi[i] * phi[i];
                }
                if (std::abs(c / e) < gap) gap = std::abs(c / e), nearest = k;
            }
            CAPTURE(m);
            CHECK(std::abs(best - nearest) <= 1);
        }
    }
}

TEST_CASE("system assembly")
{
    const std::size_t n = 1024;
    const PeriodizedBasis basis(n, 1, 7);
    const auto f = make_test_signal("blip", n);

    SUBCASE("entries are grid inner products")
    {
        const auto op = make_op(n, 2.0);
        const auto part = partition_indices(basis, op.singularities(), 3, 4);
        const int m = 4;
        const auto im = forward_scaling_images(m, op, basis);
        const auto y = op.apply(f);
        const auto a = analyze(basis, f, m).a;
        const auto sys = assemble_system(m, y, part.scaling_level(m), im, a);
        REQUIRE(sys.A.rows() == static_cast<long>(part.scaling_level(m).affected.size()));
        REQUIRE(sys.B.cols() == static_cast<long>(part.scaling_level(m).free.size()));
        CHECK((sys.A - sys.A.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (long l = 0; l < sys.A.rows(); ++l) {
            const auto& wl = im.images[static_cast<std::size_t>(sys.affected[static_cast<std::size_t>(l)])].values();
            CHECK(std::abs(sys.c(l) - oracle::dot(wl, y.values())) < 1e-8);
            for (long k = 0; k < sys.A.cols(); ++k) {
                const auto& wk = im.images[static_cast<std::size_t>(sys.affected[static_cast<std::size_t>(k)])].values();
                CHECK(std::abs(sys.A(l, k) - oracle::dot(wl, wk)) < 1e-12);
            }
        }
        for (long v = 0; v < sys.h.size(); ++v) CHECK(sys.h(v) == a[static_cast<std::size_t>(sys.free[static_cast<std::size_t>(v)])]);
    }
    SUBCASE("Toeplitz without a multiplier")
    {
        const auto op = make_op(n, 0.0);
        const auto part = partition_indices(basis, {{1.0 / 3.0, 2.0}}, 3, 4);
        const auto im = forward_scaling_images(5, op, basis);
        const auto sys = assemble_system(5, op.apply(f), part.scaling_level(5), im, std::vector<double>(32, 0.0));
        for (long l = 0; l + 1 < sys.A.rows(); ++l)
            for (long k = 0; k + 1 < sys.A.cols(); ++k) CHECK(std::abs(sys.A(l, k) - sys.A(l + 1, k + 1)) <= 1e-8);
    }
    SUBCASE("empty window is rejected")
    {
        const auto op = make_op(n, 2.0);
        const auto part = partition_indices(basis, op.singularities(), 0, 0);
        const auto im = forward_scaling_images(3, op, basis);
        CHECK_THROWS_AS(assemble_system(3, op.apply(f), part.scaling_level(3), im, std::vector<double>(8, 0.0)),
                        PreconditionError);
    }
}

TEST_CASE("singular block solve")
{
    const std::size_t n = 1024;
    const PeriodizedBasis basis(n, 1, 7);

    SUBCASE("in-span recovery")
    {
        for (double alpha : {1.0, 2.0, 3.0, 4.0}) {
            const auto op = make_op(n, alpha);
            const auto part = partition_indices(basis, op.singularities(), 3, 4);
            for (int m = 2; m <= 6; ++m) {
                const auto& lp = part.scaling_level(m);
                const auto im = forward_scaling_images(m, op, basis);
                for (long kstar : lp.affected) {
                    CAPTURE(alpha);
                    CAPTURE(m);
                    CAPTURE(kstar);
                    const auto f = synthesize_basis_function(basis, m, kstar, BasisKind::scaling);
                    const auto sys = assemble_system(m, op.apply(f), lp, im, free_values(analyze(basis, f, m).a, lp));
                    const auto sol = solve_singular_block(sys);
                    CHECK(sol.min_eigenvalue > 0.0);
                    CHECK(sol.residual <= 1e-8 * std::max(1.0, sys.c.norm()));
                    for (long i = 0; i < sol.z.size(); ++i)
                        CHECK(std::abs(sol.z(i) - (sys.affected[static_cast<std::size_t>(i)] == kstar ? 1.0 : 0.0)) <= 1e-6);
                }
            }
        }
    }
    SUBCASE("zero right-hand side")
    {
        const auto op = make_op(n, 2.0);
        const auto part = partition_indices(basis, op.singularities(), 3, 4);
        const auto im = forward_scaling_images(4, op, basis);
        auto sys = assemble_system(4, op.apply(make_test_signal("blip", n)), part.scaling_level(4), im,
                                   analyze(basis, make_test_signal("blip", n), 4).a);
        sys.c = sys.B * sys.h;
        const auto sol = solve_singular_block(sys);
        CHECK(sol.z.cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("singular matrix")
    {
        SingularBlockSystem sys;
        sys.A = Eigen::MatrixXd::Ones(2, 2);
        sys.B = Eigen::MatrixXd::Zero(2, 1);
        sys.c = Eigen::VectorXd::Ones(2);
        sys.h = Eigen::VectorXd::Zero(1);
        sys.affected = {0, 1};
        sys.free = {2};
        CHECK_THROWS_AS(solve_singular_block(sys), IllConditionedError);
        try {
            solve_singular_block(sys);
        } catch (const IllConditionedError& e) {
            CHECK(e.condition() > 1e12);
        }
    }
    SUBCASE("noiseless bias shrinks with the level")
    {
        const auto op = make_op(n, 2.0);
        const auto part = partition_indices(basis, op.singularities(), 3, 4);
        const auto f = make_test_signal("blip", n);
        std::vector<double> err;
        for (int m = 3; m <= 6; ++m) {
            const auto& lp = part.scaling_level(m);
            const auto a = analyze(basis, f, m).a;
            const auto sol = solve_singular_block(assemble_system(m, op.apply(f), lp, forward_scaling_images(m, op, basis), a));
            double e = 0.0;
            for (long i = 0; i < sol.z.size(); ++i)
                e = std::max(e, std::abs(sol.z(i) - a[static_cast<std::size_t>(lp.affected[static_cast<std::size_t>(i)])]));
            err.push_back(e);
        }
        for (std::size_t i = 1; i < err.size(); ++i) CHECK(err[i] < err[i - 1]);
    }
}

TEST_CASE("linear estimate")
{
    const std::size_t n = 1024;
    const PeriodizedBasis basis(n, 1, 7);
    const std::vector<long> affected{6, 7, 8};
    const auto zero = singular_estimate(basis, 4, affected, Eigen::VectorXd::Zero(3));
    for (double v : zero.values()) CHECK(v == 0.0);

    Eigen::VectorXd unit = Eigen::VectorXd::Zero(3);
    unit(1) = 1.0;
    const auto one = singular_estimate(basis, 4, affected, unit);
    const auto phi = synthesize_basis_function(basis, 4, 7, BasisKind::scaling);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(one[i] - phi[i]) < 1e-14);

    const std::vector<Singularity> sing{{1.0 / 3.0, 2.0}};
    const auto part = partition_indices(basis, sing, 3, 4);
    for (int m = 2; m <= 6; ++m) {
        const auto& lp = part.scaling_level(m);
        const auto est = singular_estimate(basis, m, lp.affected, Eigen::VectorXd::Ones(static_cast<long>(lp.affected.size())));
        const auto mask = omega_neighborhood(m, n, sing, SupportBounds::of(basis.filter()), 3, 4);
        double outside = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += est[i] * est[i];
            if (!mask[i]) outside += est[i] * est[i];
        }
        CHECK(outside <= 1e-10 * total);
    }
    CHECK_THROWS_AS(singular_estimate(basis, 4, affected, Eigen::VectorXd::Zero(2)), PreconditionError);
}
