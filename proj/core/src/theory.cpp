#include "hwv/theory.hpp"

#include "hwv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hwv {

double one_minus_two_over_p(double p) { return std::isinf(p) ? 1.0 : 1.0 - 2.0 / p; }

double BesovParams::s_prime() const { return s + 0.5 - (std::isinf(p) ? 0.0 : 1.0 / p); }

double BesovParams::s_star() const { return std::min(s, s_prime()); }

void BesovParams::validate() const
{
    require(p >= 1.0 && q >= 1.0, "Besov indices must satisfy p, q >= 1");
    require(s > std::max(std::isinf(p) ? 0.0 : 1.0 / p, 0.5), "Besov smoothness must exceed max(1/p, 1/2)");
    require(A > 0.0, "Besov radius must be positive");
}

void ProblemParams::validate() const
{
    require(alpha >= 0.0, "alpha must be nonnegative");
    require(beta > 0.0, "beta must be positive");
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
}

namespace {

// sign of 2s(alpha - 1) - (beta + 1)(1 - 2/p), zero within rounding
int boundary_side(const BesovParams& bp, const ProblemParams& pp)
{
    const double lhs = 2.0 * bp.s * (pp.alpha - 1.0);
    const double rhs = (pp.beta + 1.0) * one_minus_two_over_p(bp.p);
    if (std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)})) return 0;
    return lhs > rhs ? 1 : -1;
}

} // namespace

RateRegime classify_regime(const BesovParams& bp, const ProblemParams& pp)
{
    return boundary_side(bp, pp) >= 0 ? RateRegime::sparse : RateRegime::dense;
}

MinimaxRate minimax_rate(const BesovParams& bp, const ProblemParams& pp)
{
    bp.validate();
    pp.validate();
    MinimaxRate r;
    r.regime = classify_regime(bp, pp);
    const double a = pp.alpha, b = pp.beta;
    if (r.regime == RateRegime::sparse) {
        const double sp = bp.s_prime();
        r.exponent = 2.0 * sp / (2.0 * sp + a + b);
        r.delta = std::pow(bp.A, 2.0 * (a + b) / (2.0 * sp + a + b)) * std::pow(pp.eps, r.exponent);
    } else {
        r.exponent = 2.0 * bp.s / (2.0 * bp.s + b + 1.0);
        r.delta = std::pow(bp.A, 2.0 * (b + 1.0) / (2.0 * bp.s + b + 1.0)) * std::pow(pp.eps, r.exponent);
    }
    return r;
}

double log_exponent(const BesovParams& bp, const ProblemParams& pp)
{
    bp.validate();
    pp.validate();
    const double a = pp.alpha, b = pp.beta, p = bp.p;
    if (a == 1.0) {
        const double ss = bp.s_star();
        return 2.0 * ss / (2.0 * ss + b + 1.0);
    }
    double rho = 0.0;
    if (boundary_side(bp, pp) == 0) rho += 1.0;
    if (a < 1.0 && p < 2.0) rho += (1.0 - a) * (2.0 - p) / (2.0 - a * p);
    return rho;
}

TheoreticalThreshold theoretical_threshold(double Cu, double Clambda, double alpha, double beta)
{
    require(Cu > 0.0 && Clambda > 0.0, "theoretical_threshold: constants must be positive");
    require(alpha >= 0.0 && beta > 0.0, "theoretical_threshold: degrees out of range");
    TheoreticalThreshold t;
    t.chi2 = 4.0 * (beta + std::max(1.0, alpha)) / (2.0 + alpha + beta);
    const double chi = std::sqrt(t.chi2);
    t.tau2 = 4.0 * Cu * Clambda * std::pow(std::sqrt(2.0) * chi + 1.0, 2);
    return t;
}

} // namespace hwv
