#pragma once

#include "hwv/spectral.hpp"

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace hwv {

// Zero of the multiplier (or design density) at `location`, of order `order`:
// mu^2 ~ |x - x0|^order near x0 (g ~ |x - x0|^order in design mode).
struct Singularity {
    double location = 0.0;
    double order = 0.0;
};

struct ConvolutionKernel {
    std::string name;
    Spectrum spectrum;        // q_w on the grid frequencies
    double decay_order = 0.0; // r, with |q_w| ~ |w|^-r

    std::size_t size() const { return spectrum.size(); }
    double ill_posedness() const { return 2.0 * decay_order; }
};

ConvolutionKernel kernel_identity(std::size_t n);
// q1(x) = sum_k exp(-lambda |x + k|)
ConvolutionKernel kernel_q1(double lambda, std::size_t n);
// q2(x) = sum_{k >= 0} exp(-lambda (x + k)) (x + k)^N, spectrum by quadrature.
ConvolutionKernel kernel_q2(double lambda, int N, std::size_t n);

struct DecayFit {
    double order = 0.0;   // fitted r
    double c_lower = 0.0; // min over the range of |q_w| (|w|+1)^r
    double c_upper = 0.0; // max over the range of |q_w| (|w|+1)^r
    long omega_min = 0;
    long omega_max = 0;
};

// Least-squares slope of log|q_w| against log w over dyadic frequencies
// in [omega_min, omega_max] (clipped to n/2).
DecayFit estimate_decay_order(const ConvolutionKernel& kernel, long omega_min = 16, long omega_max = 256);

enum class ProfileKind { constant, power_zero, am_cosine, custom_grid };

struct ProfileParams {
    double x0 = 1.0 / 3.0;
    double h = 1.0 / 6.0;
    double alpha = 0.0;
    double omega = 0.0;
    double theta = 0.0;
    int theta_sign = 1;                     // am-cosine uses cos(2 pi omega x + sign*theta)
    std::vector<double> grid_values;        // custom-grid samples
    std::vector<Singularity> singularities; // custom-grid zero list
};

struct MultiplierProfile {
    ProfileKind kind = ProfileKind::constant;
    ProfileParams params;
    PeriodicSignal mu;
    std::vector<Singularity> singularities;
};

MultiplierProfile make_mu_profile(ProfileKind kind, const ProfileParams& params, std::size_t n);

// Zeros of an amplitude envelope: local minima of the 5-point circular
// moving average of |v| that fall below a quarter of its maximum.
std::vector<double> envelope_zeros(const std::vector<double>& v);

enum class DensityKind { uniform, power_zero, linear, custom_grid };

// Design density g on [0,1] with its c.d.f. G. Nodes are the n + 1 closed
// grid points i/n; g is linear between nodes so G is piecewise quadratic.
struct DesignDensity {
    std::vector<double> g_nodes;   // g(i/n), i = 0..n
    std::vector<double> cdf_nodes; // G(i/n), i = 0..n
    std::vector<Singularity> singularities;

    std::size_t size() const { return g_nodes.size() - 1; }
    double cdf(double x) const;
    double quantile(double u) const;
};

DesignDensity make_design_density(DensityKind kind, const ProfileParams& params, std::size_t n);
// Normalizes the node values so the density integrates to one.
DesignDensity design_from_nodes(std::vector<double> g_nodes, std::vector<Singularity> singularities);

// x_i = G^-1(i/n_points), i = 0..n_points-1.
std::vector<double> design_quantiles(const DesignDensity& g, std::size_t n_points);

PeriodicSignal apply_forward(const ConvolutionKernel& kernel, const MultiplierProfile& profile, const PeriodicSignal& f);
PeriodicSignal apply_forward(const ConvolutionKernel& kernel, const DesignDensity& design, const PeriodicSignal& f);

// Periodic linear interpolation of grid samples at an arbitrary point.
double interpolate_periodic(const PeriodicSignal& s, double x);

// Kernel plus either a multiplier profile or a design density.
class ForwardOperator {
public:
    ForwardOperator(ConvolutionKernel kernel, MultiplierProfile profile);
    ForwardOperator(ConvolutionKernel kernel, DesignDensity design);

    const ConvolutionKernel& kernel() const { return kernel_; }
    std::size_t size() const { return kernel_.size(); }
    bool design_mode() const { return std::holds_alternative<DesignDensity>(shape_); }
    const MultiplierProfile& profile() const { return std::get<MultiplierProfile>(shape_); }
    const DesignDensity& design() const { return std::get<DesignDensity>(shape_); }

    const std::vector<Singularity>& singularities() const;
    // Largest singularity order (0 when there are none).
    double inhomogeneity() const;

    PeriodicSignal apply(const PeriodicSignal& f) const;

    // Data mapped to the deconvolution scale: y/mu (zero where mu vanishes)
    // or y composed with G.
    PeriodicSignal observation_transform(const PeriodicSignal& y) const;

    // Var(Y_i)/sigma^2 on the grid: 1/mu_i^2 or 1/g_i, +inf at zeros.
    const std::vector<double>& noise_profile() const { return noise_profile_; }

private:
    ConvolutionKernel kernel_;
    std::variant<MultiplierProfile, DesignDensity> shape_;
    std::vector<double> noise_profile_;
};

} // namespace hwv
