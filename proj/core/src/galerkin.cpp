#include "hwv/galerkin.hpp"

#include "hwv/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hwv {

ScalingImages forward_scaling_images(int m, const ForwardOperator& op, const PeriodizedBasis& basis)
{
    require(op.size() == basis.n(), "forward_scaling_images: operator and basis sizes differ");
    require(m >= 0 && m <= basis.finest(), "forward_scaling_images: level out of range");
    ScalingImages out;
    out.level = m;
    const PeriodicSignal phi0 = synthesize_basis_function(basis, m, 0, BasisKind::scaling);
    const long step = static_cast<long>(basis.n() >> m);
    for (long k = 0; k < (1L << m); ++k) {
        out.images.push_back(op.apply(phi0.shifted(k * step)));
        out.norms.push_back(norm(out.images.back()));
    }
    return out;
}

SingularBlockSystem assemble_system(int m, const PeriodicSignal& y, const LevelPartition& partition,
                                    const ScalingImages& images, const std::vector<double>& a_hat)
{
    require(partition.level == m && images.level == m, "assemble_system: level mismatch");
    require(!partition.affected.empty(), "assemble_system: K_0m is empty");
    require(a_hat.size() == images.images.size(), "assemble_system: scaling estimate size mismatch");
    SingularBlockSystem s;
    s.level = m;
    s.affected = partition.affected;
    s.free = partition.free;
    const auto na = static_cast<Eigen::Index>(s.affected.size());
    const auto nf = static_cast<Eigen::Index>(s.free.size());
    const auto img = [&](long k) -> const PeriodicSignal& { return images.images[static_cast<std::size_t>(k)]; };

    s.A.resize(na, na);
    s.B.resize(na, nf);
    s.c.resize(na);
    s.h.resize(nf);
    for (Eigen::Index l = 0; l < na; ++l) {
        const auto& wl = img(s.affected[static_cast<std::size_t>(l)]);
        for (Eigen::Index k = l; k < na; ++k) {
            const double v = inner_product(wl, img(s.affected[static_cast<std::size_t>(k)]));
            s.A(l, k) = v;
            s.A(k, l) = v;
        }
        for (Eigen::Index v = 0; v < nf; ++v) s.B(l, v) = inner_product(wl, img(s.free[static_cast<std::size_t>(v)]));
        s.c(l) = inner_product(wl, y);
    }
    for (Eigen::Index v = 0; v < nf; ++v) s.h(v) = a_hat[static_cast<std::size_t>(s.free[static_cast<std::size_t>(v)])];
    return s;
}

SingularBlockSolution solve_singular_block(const SingularBlockSystem& system)
{
    const Eigen::Index na = system.A.rows();
    require(na > 0 && system.A.cols() == na, "solve_singular_block: A must be square and nonempty");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system.A, Eigen::EigenvaluesOnly);
    SingularBlockSolution sol;
    sol.min_eigenvalue = eig.eigenvalues().minCoeff();
    sol.max_eigenvalue = eig.eigenvalues().maxCoeff();
    sol.condition = sol.min_eigenvalue > 0.0 ? sol.max_eigenvalue / sol.min_eigenvalue
                                             : std::numeric_limits<double>::infinity();
    if (!(sol.min_eigenvalue > 1e-12 * system.A.trace())) {
        std::ostringstream msg;
        msg << "Galerkin matrix at level " << system.level << " is numerically singular (min eigenvalue "
            << sol.min_eigenvalue << ", condition " << sol.condition << ")";
        throw IllConditionedError(msg.str(), sol.condition);
    }
    const Eigen::VectorXd rhs = system.B.cols() > 0 ? Eigen::VectorXd(system.c - system.B * system.h) : system.c;
    sol.z = system.A.ldlt().solve(rhs);
    sol.residual = (system.A * sol.z - rhs).norm();
    return sol;
}

PeriodicSignal singular_estimate(const PeriodizedBasis& basis, int m, const std::vector<long>& affected,
                                 const Eigen::VectorXd& z)
{
    require(static_cast<Eigen::Index>(affected.size()) == z.size(), "singular_estimate: size mismatch");
    CoefficientTree t = CoefficientTree::zeros(m, m);
    for (std::size_t i = 0; i < affected.size(); ++i) t.a.at(static_cast<std::size_t>(affected[i])) = z(static_cast<Eigen::Index>(i));
    return reconstruct(basis, t);
}

} // namespace hwv
