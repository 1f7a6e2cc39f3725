#pragma once

#include <limits>

namespace hwv {

inline constexpr double infinite_index = std::numeric_limits<double>::infinity();

struct BesovParams {
    double s = 1.0;
    double p = 2.0; // infinite_index allowed
    double q = 2.0; // infinite_index allowed
    double A = 1.0;

    double s_prime() const;
    double s_star() const;
    void validate() const;
};

struct ProblemParams {
    double alpha = 0.0;
    double beta = 4.0;
    double eps = 1e-4;
    void validate() const;
};

enum class RateRegime { sparse, dense };

struct MinimaxRate {
    double delta = 0.0;
    double exponent = 0.0; // Delta ~ eps^exponent
    RateRegime regime = RateRegime::dense;
};

// 1 - 2/p, read as 1 at p = infinity.
double one_minus_two_over_p(double p);

// sparse: 2s(alpha - 1) >= (beta + 1)(1 - 2/p); dense otherwise.
RateRegime classify_regime(const BesovParams& bp, const ProblemParams& pp);
MinimaxRate minimax_rate(const BesovParams& bp, const ProblemParams& pp);
double log_exponent(const BesovParams& bp, const ProblemParams& pp);

struct TheoreticalThreshold {
    double tau2 = 0.0;
    double chi2 = 0.0;
    bool reference_only = true; // relies on unknowable constants, never used by estimation
};

// chi^2 = 4 (beta + max(1, alpha)) / (2 + alpha + beta) at its lower bound,
// tau^2 = 4 Cu Clambda (sqrt(2) chi + 1)^2.
TheoreticalThreshold theoretical_threshold(double Cu, double Clambda, double alpha, double beta);

} // namespace hwv
