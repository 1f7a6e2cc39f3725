#include "hwv/adaptive.hpp"

#include "hwv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hwv {

namespace {

PeriodizedBasis make_basis(const ForwardOperator& op, double eps, const EstimatorSettings& s)
{
    const std::size_t n = op.size();
    int J = 0;
    if (s.top_level) {
        J = *s.top_level;
    } else {
        require(eps > 0.0, "HybridEstimator: sigma = 0 needs an explicit top level J");
        J = default_top_level(n, eps, op.inhomogeneity(), op.kernel().ill_posedness());
    }
    J = std::max(J, s.m1 + 1);
    return PeriodizedBasis(n, s.m1, J, WaveletFilter::daubechies(s.vanishing_moments));
}

} // namespace

SupportBounds SupportBounds::of(const WaveletFilter& filter)
{
    return {filter.support_lower(), filter.support_upper(), filter.support_lower(), filter.support_upper()};
}

std::vector<char> omega_neighborhood(int m, std::size_t n, const std::vector<Singularity>& singularities,
                                     const SupportBounds& supports, int D, int D0)
{
    const double lo = std::min(supports.phi_lower - D0, supports.psi_lower - D);
    const double hi = std::max(supports.phi_upper + D0, supports.psi_upper + D);
    const double scale = std::ldexp(1.0, m);
    std::vector<char> mask(n, 0);
    for (const auto& s : singularities) {
        for (std::size_t i = 0; i < n; ++i) {
            double d = static_cast<double>(i) / static_cast<double>(n) - s.location;
            d -= std::round(d); // circular offset in [-1/2, 1/2]
            const double u = scale * d;
            const bool in = (hi - lo >= scale) || (lo < u && u < hi) || (lo < u + scale && u + scale < hi) ||
                            (lo < u - scale && u - scale < hi);
            if (in) mask[i] = 1;
        }
    }
    return mask;
}

HybridEstimator::HybridEstimator(ForwardOperator op, double sigma, EstimatorSettings settings)
    : op_(std::move(op)),
      settings_(settings),
      sigma_(sigma),
      eps_(sigma * sigma / static_cast<double>(op_.size())),
      basis_(make_basis(op_, eps_, settings_)),
      table_(build_vaguelettes(op_.kernel(), basis_))
{
    require(sigma >= 0.0 && std::isfinite(sigma), "HybridEstimator: sigma must be finite and nonnegative");
    require(settings_.kappa > 0.0, "HybridEstimator: kappa must be positive");
    int D = 0, D0 = 0;
    if (settings_.singularity_aware) {
        D = settings_.D.value_or(static_cast<int>(std::ceil(table_.d_U())));
        D0 = settings_.D0.value_or(static_cast<int>(std::ceil(table_.d_T())));
    }
    partition_ = partition_indices(basis_, op_.singularities(), D, D0);
    weights_ = variance_weights(settings_.weights, op_, table_);

    if (eps_ > 0.0) {
        layout_ = build_blocks(partition_, eps_);
    } else {
        layout_ = build_blocks(partition_, std::exp(-1.0));
        layout_.block_size = 1;
    }
    const double c = settings_.threshold_constant.value_or(
        settings_.threshold == ThresholdKind::hard ? ThresholdRule::default_hard_constant(n()) : 1.0);
    rule_ = ThresholdRule{settings_.threshold, c, eps_};

    const auto supports = SupportBounds::of(basis_.filter());
    const auto& rho = op_.noise_profile();
    for (int m = m1(); m < J(); ++m) {
        const auto& part = partition_.scaling_level(m);
        images_.push_back(part.affected.empty() ? ScalingImages{m, {}, {}} : forward_scaling_images(m, op_, basis_));
        omega_.push_back(omega_neighborhood(m, n(), op_.singularities(), supports, D, D0));

        const double t2 = std::pow(table_.level(m, BasisKind::scaling).norm, 2);
        double acc = 0.0;
        for (long k : part.free) acc += rho[static_cast<std::size_t>(k) * (n() >> m)] * t2;
        if (settings_.lepski_sigma_squared) acc *= sigma_ * sigma_;
        lambda_inv2_.push_back(acc);
    }
}

bool HybridEstimator::uses_lepski() const
{
    return settings_.singularity_aware && !op_.singularities().empty() && (D() > 0 || D0() > 0) && J() - 1 > m1();
}

const ScalingImages& HybridEstimator::images(int m) const
{
    require(m >= m1() && m < J(), "HybridEstimator: level out of range");
    return images_[static_cast<std::size_t>(m - m1())];
}

const std::vector<char>& HybridEstimator::omega(int m) const
{
    require(m >= m1() && m < J(), "HybridEstimator: level out of range");
    return omega_[static_cast<std::size_t>(m - m1())];
}

LevelEstimate hybrid_at_level(const HybridEstimator& est, int m, const PeriodicSignal& y,
                              const CoefficientEstimates& coefficients)
{
    require(m >= est.m1() && m < est.J(), "hybrid_at_level: level " + std::to_string(m) + " outside [m1, J-1]");
    LevelEstimate out;
    out.m = m;
    FreeEstimate fe = singularity_free_estimate(est.basis(), m, coefficients, est.partition(), est.layout(),
                                                est.rule(), est.weights());
    out.fc = std::move(fe.signal);
    out.tree = std::move(fe.tree);
    const auto& part = est.partition().scaling_level(m);
    if (part.affected.empty()) {
        out.f0 = PeriodicSignal(est.n());
    } else {
        const auto system = assemble_system(m, y, part, est.images(m), coefficients.scaling_at(m));
        out.solution = solve_singular_block(system);
        out.f0 = singular_estimate(est.basis(), m, part.affected, out.solution.z);
        out.has_singular_block = true;
    }
    out.combined = out.f0 + out.fc;
    return out;
}

LevelEstimate hybrid_at_level(const HybridEstimator& est, int m, const PeriodicSignal& y)
{
    return hybrid_at_level(est, m, y, estimate_coefficients(y, est.op(), est.table()));
}

double LepskiTrace::row_max(int m) const
{
    double mx = 0.0;
    for (int j = m + 1; j <= highest; ++j) mx = std::max(mx, at(m, j));
    return mx;
}

LepskiTrace lepski_matrix(const std::vector<LevelEstimate>& estimates, const std::vector<std::vector<char>>& omega,
                          double sigma, std::size_t n, const std::vector<double>& lambda_inv2)
{
    require(!estimates.empty(), "lepski_matrix: no estimates");
    require(omega.size() == estimates.size() && lambda_inv2.size() == estimates.size(),
            "lepski_matrix: per-level inputs disagree in length");
    LepskiTrace t;
    t.lowest = estimates.front().m;
    t.highest = estimates.back().m;
    t.lambda_inv2 = lambda_inv2;
    const std::size_t levels = estimates.size();
    t.L.assign(levels, std::vector<double>(levels, 0.0));
    const double base = sigma * sigma / static_cast<double>(n) * std::log(static_cast<double>(n));
    for (std::size_t a = 0; a < levels; ++a) {
        const auto& fm = estimates[a].combined;
        for (std::size_t b = a + 1; b < levels; ++b) {
            const auto& fj = estimates[b].combined;
            double num = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (omega[a][i]) num += (fm[i] - fj[i]) * (fm[i] - fj[i]);
            num /= static_cast<double>(n);
            const double den = base * lambda_inv2[b];
            if (den > 0.0)
                t.L[a][b] = num / den;
            else
                t.L[a][b] = num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        }
    }
    return t;
}

int select_level(LepskiTrace& trace, double kappa)
{
    require(kappa > 0.0, "select_level: kappa must be positive");
    trace.kappa = kappa;
    for (int m = trace.lowest; m <= trace.highest; ++m) {
        if (trace.row_max(m) <= kappa * kappa) {
            trace.m_hat = m;
            trace.fallback = m == trace.highest && trace.highest > trace.lowest;
            return m;
        }
    }
    trace.m_hat = trace.highest;
    trace.fallback = true;
    return trace.m_hat;
}

HybridEstimate adaptive_estimate(const HybridEstimator& est, const PeriodicSignal& y)
{
    require(y.size() == est.n(), "adaptive_estimate: data size does not match the estimator");
    const CoefficientEstimates coefficients = estimate_coefficients(y, est.op(), est.table());
    HybridEstimate out;
    if (!est.uses_lepski()) {
        out.levels.push_back(hybrid_at_level(est, est.m1(), y, coefficients));
        out.trace.lowest = out.trace.highest = out.trace.m_hat = est.m1();
        out.trace.kappa = est.settings().kappa;
        out.trace.L = {{0.0}};
        out.trace.lambda_inv2 = {est.lambda_inv2().front()};
    } else {
        for (int m = est.m1(); m < est.J(); ++m) out.levels.push_back(hybrid_at_level(est, m, y, coefficients));
        out.trace = lepski_matrix(out.levels, est.omegas(), est.sigma(), est.n(), est.lambda_inv2());
        select_level(out.trace, est.settings().kappa);
    }
    const auto& chosen = out.levels[static_cast<std::size_t>(out.trace.m_hat - out.levels.front().m)];
    out.m = chosen.m;
    out.f0 = chosen.f0;
    out.fc = chosen.fc;
    out.combined = chosen.combined;
    return out;
}

TheoreticalLevels theoretical_levels(double eps, double alpha, double beta, double s, double p, std::size_t n,
                                     const WaveletFilter& filter)
{
    require(eps > 0.0 && eps < 1.0, "theoretical_levels: eps must lie in (0, 1)");
    require(alpha >= 0.0 && beta > 0.0 && s > 0.0 && p >= 1.0, "theoretical_levels: parameters out of range");
    const double sp = s + 0.5 - 1.0 / p;
    const double log_inv = std::log2(1.0 / eps);
    auto floor_tol = [](double v) { return static_cast<int>(std::floor(v + 1e-9)); };

    TheoreticalLevels t;
    t.J = floor_tol(2.0 / (alpha + beta + 2.0) * log_inv);
    double base = eps;
    if (alpha == 1.0) base *= std::log(1.0 / eps);
    t.m0 = floor_tol(-std::log2(base) / (2.0 * sp + alpha + beta));
    t.m1 = 0;
    while (std::ldexp(1.0, t.m1) <= static_cast<double>(filter.length() - 1)) ++t.m1;
    if (n > 0) {
        const int cap = log2_exact(n) - 1;
        t.J = std::min(t.J, cap);
        t.m0 = std::min(t.m0, cap);
        t.m1 = std::min(t.m1, cap);
    }
    return t;
}

} // namespace hwv
