#include "hwv/operator.hpp"

#include "hwv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hwv {

namespace {

constexpr double pi = std::numbers::pi;

// Real signals need a real Nyquist coefficient; keep its modulus.
void fold_nyquist(Spectrum& s)
{
    const std::size_t nyq = s.size() / 2;
    const cplx v = s[nyq];
    s[nyq] = cplx((v.real() < 0.0 ? -1.0 : 1.0) * std::abs(v), 0.0);
}

double wrap_unit(double x)
{
    x -= std::floor(x);
    return x >= 1.0 ? 0.0 : x;
}

} // namespace

ConvolutionKernel kernel_identity(std::size_t n)
{
    Spectrum s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 1.0;
    return ConvolutionKernel{"identity", std::move(s), 0.0};
}

ConvolutionKernel kernel_q1(double lambda, std::size_t n)
{
    require(lambda > 0.0, "kernel_q1: lambda must be positive");
    Spectrum s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = static_cast<double>(s.frequency(i));
        s[i] = 2.0 * lambda / (lambda * lambda + 4.0 * pi * pi * w * w);
    }
    return ConvolutionKernel{"q1", std::move(s), 2.0};
}

ConvolutionKernel kernel_q2(double lambda, int N, std::size_t n)
{
    require(lambda > 0.0, "kernel_q2: lambda must be positive");
    require(N >= 1, "kernel_q2: N must be a positive integer");
    require(n >= 8 && is_power_of_two(n), "kernel_q2: grid size must be a power of two >= 8");

    // Periodic trapezoid rule on a fine grid; aliasing decays like
    // (n / fine)^(N+1).
    const std::size_t fine = std::min<std::size_t>(n * 64, std::size_t{1} << 22);
    std::vector<double> v(fine);
    for (std::size_t i = 0; i < fine; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(fine);
        double acc = 0.0;
        for (int k = 0;; ++k) {
            const double t = x + k;
            const double term = std::exp(-lambda * t) * std::pow(t, N);
            acc += term;
            if (t * lambda > N && term < 1e-18 * std::max(acc, 1e-300)) break;
        }
        v[i] = acc;
    }
    const Spectrum full = forward_transform(PeriodicSignal(std::move(v)));
    Spectrum s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = full.at(s.frequency(i));
    fold_nyquist(s);
    return ConvolutionKernel{"q2", std::move(s), static_cast<double>(N + 1)};
}

DecayFit estimate_decay_order(const ConvolutionKernel& kernel, long omega_min, long omega_max)
{
    const long nyq = static_cast<long>(kernel.size() / 2);
    omega_max = std::min(omega_max, nyq);
    require(omega_min >= 1 && omega_min < omega_max, "estimate_decay_order: empty frequency range");

    std::vector<double> lx, ly;
    for (long w = omega_min; w <= omega_max; w *= 2) {
        const double mag = std::abs(kernel.spectrum.at(w));
        require(mag > 0.0, "estimate_decay_order: zero coefficient at frequency " + std::to_string(w));
        lx.push_back(std::log(static_cast<double>(w)));
        ly.push_back(std::log(mag));
    }
    require(lx.size() >= 2, "estimate_decay_order: need at least two dyadic frequencies");
    const double k = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    DecayFit fit;
    fit.order = -sxy / sxx;
    fit.omega_min = omega_min;
    fit.omega_max = omega_max;
    fit.c_lower = std::numeric_limits<double>::infinity();
    for (long w = omega_min; w <= omega_max; ++w) {
        const double c = std::abs(kernel.spectrum.at(w)) * std::pow(static_cast<double>(w) + 1.0, fit.order);
        fit.c_lower = std::min(fit.c_lower, c);
        fit.c_upper = std::max(fit.c_upper, c);
    }
    return fit;
}

std::vector<double> envelope_zeros(const std::vector<double>& v)
{
    const std::size_t n = v.size();
    require(n >= 5, "envelope_zeros: need at least five samples");
    std::vector<double> avg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t d = 0; d < 5; ++d) acc += std::abs(v[(i + n + d - 2) % n]);
        avg[i] = acc / 5.0;
    }
    const double cut = 0.25 * *std::max_element(avg.begin(), avg.end());
    std::vector<double> zeros;
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = avg[(i + n - 1) % n];
        const double next = avg[(i + 1) % n];
        if (avg[i] < cut && avg[i] <= prev && avg[i] < next)
            zeros.push_back(static_cast<double>(i) / static_cast<double>(n));
    }
    return zeros;
}

MultiplierProfile make_mu_profile(ProfileKind kind, const ProfileParams& params, std::size_t n)
{
    MultiplierProfile p;
    p.kind = kind;
    p.params = params;
    switch (kind) {
    case ProfileKind::constant:
        p.mu = PeriodicSignal(n, 1.0);
        break;
    case ProfileKind::power_zero: {
        require(params.h > 0.0 && params.h < std::min(params.x0, 1.0 - params.x0),
                "power-zero profile: window must satisfy 0 < h < min(x0, 1 - x0)");
        require(params.alpha >= 0.0, "power-zero profile: alpha must be nonnegative");
        p.mu = PeriodicSignal::sample(n, [&](double x) {
            const double u = std::abs(x - params.x0) / params.h;
            return u > 1.0 ? 1.0 : std::pow(u, params.alpha / 2.0);
        });
        if (params.alpha > 0.0) p.singularities = {{params.x0, params.alpha}};
        break;
    }
    case ProfileKind::am_cosine: {
        require(params.omega > 0.0, "am-cosine profile: omega must be positive");
        require(params.theta_sign == 1 || params.theta_sign == -1, "am-cosine profile: theta sign must be +1 or -1");
        const double phase = params.theta_sign * params.theta;
        p.mu = PeriodicSignal::sample(n, [&](double x) { return std::cos(2.0 * pi * params.omega * x + phase); });
        for (double z : envelope_zeros(p.mu.values())) p.singularities.push_back({z, 2.0});
        break;
    }
    case ProfileKind::custom_grid:
        require(params.grid_values.size() == n, "custom profile: expected " + std::to_string(n) + " samples");
        p.mu = PeriodicSignal(params.grid_values);
        p.singularities = params.singularities;
        break;
    }
    for (const auto& s : p.singularities) require(s.order >= 0.0, "singularity order must be nonnegative");
    std::sort(p.singularities.begin(), p.singularities.end(),
              [](const Singularity& a, const Singularity& b) { return a.location < b.location; });
    return p;
}

double DesignDensity::cdf(double x) const
{
    const std::size_t n = size();
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double pos = x * static_cast<double>(n);
    const std::size_t i = std::min(static_cast<std::size_t>(pos), n - 1);
    const double t = pos - static_cast<double>(i);
    const double dx = 1.0 / static_cast<double>(n);
    return cdf_nodes[i] + dx * (g_nodes[i] * t + 0.5 * (g_nodes[i + 1] - g_nodes[i]) * t * t);
}

double DesignDensity::quantile(double u) const
{
    const std::size_t n = size();
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    auto it = std::upper_bound(cdf_nodes.begin(), cdf_nodes.end(), u);
    std::size_t i = static_cast<std::size_t>(std::distance(cdf_nodes.begin(), it)) - 1;
    i = std::min(i, n - 1);
    const double dx = 1.0 / static_cast<double>(n);
    // dx (g_i t + (g_{i+1} - g_i) t^2 / 2) = u - G_i
    const double a = 0.5 * dx * (g_nodes[i + 1] - g_nodes[i]);
    const double b = dx * g_nodes[i];
    const double c = u - cdf_nodes[i];
    double t = 0.0;
    const double disc = std::max(b * b + 4.0 * a * c, 0.0);
    const double denom = b + std::sqrt(disc);
    if (denom > 0.0) t = 2.0 * c / denom;
    t = std::clamp(t, 0.0, 1.0);
    return (static_cast<double>(i) + t) * dx;
}

DesignDensity design_from_nodes(std::vector<double> g_nodes, std::vector<Singularity> singularities)
{
    require(g_nodes.size() >= 9 && is_power_of_two(g_nodes.size() - 1),
            "design density needs n + 1 nodes with n a power of two >= 8");
    for (double v : g_nodes) require(std::isfinite(v) && v >= 0.0, "design density must be finite and nonnegative");
    const std::size_t n = g_nodes.size() - 1;
    const double dx = 1.0 / static_cast<double>(n);
    std::vector<double> G(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) G[i + 1] = G[i] + 0.5 * dx * (g_nodes[i] + g_nodes[i + 1]);
    const double total = G[n];
    require(total > 0.0, "design density integrates to zero");
    for (double& v : g_nodes) v /= total;
    for (double& v : G) v /= total;
    G[n] = 1.0;
    DesignDensity d{std::move(g_nodes), std::move(G), std::move(singularities)};
    std::sort(d.singularities.begin(), d.singularities.end(),
              [](const Singularity& a, const Singularity& b) { return a.location < b.location; });
    return d;
}

DesignDensity make_design_density(DensityKind kind, const ProfileParams& params, std::size_t n)
{
    require(n >= 8 && is_power_of_two(n), "design density grid must be a power of two >= 8");
    std::vector<double> nodes(n + 1);
    std::vector<Singularity> sing;
    const auto x_of = [n](std::size_t i) { return static_cast<double>(i) / static_cast<double>(n); };
    switch (kind) {
    case DensityKind::uniform:
        std::fill(nodes.begin(), nodes.end(), 1.0);
        break;
    case DensityKind::power_zero:
        require(params.h > 0.0 && params.h < std::min(params.x0, 1.0 - params.x0),
                "power-zero density: window must satisfy 0 < h < min(x0, 1 - x0)");
        require(params.alpha >= 0.0, "power-zero density: alpha must be nonnegative");
        for (std::size_t i = 0; i <= n; ++i) {
            const double u = std::abs(x_of(i) - params.x0) / params.h;
            nodes[i] = u > 1.0 ? 1.0 : std::pow(u, params.alpha);
        }
        if (params.alpha > 0.0) sing = {{params.x0, params.alpha}};
        break;
    case DensityKind::linear:
        for (std::size_t i = 0; i <= n; ++i) nodes[i] = 2.0 * x_of(i);
        sing = {{0.0, 1.0}};
        break;
    case DensityKind::custom_grid:
        require(params.grid_values.size() == n || params.grid_values.size() == n + 1,
                "custom density: expected n or n + 1 samples");
        std::copy(params.grid_values.begin(), params.grid_values.end(), nodes.begin());
        if (params.grid_values.size() == n) nodes[n] = nodes[0];
        sing = params.singularities;
        break;
    }
    return design_from_nodes(std::move(nodes), std::move(sing));
}

std::vector<double> design_quantiles(const DesignDensity& g, std::size_t n_points)
{
    for (std::size_t i = 0; i + 1 < g.cdf_nodes.size(); ++i)
        require(g.cdf_nodes[i + 1] >= g.cdf_nodes[i], "design_quantiles: c.d.f. is not monotone");
    std::vector<double> x(n_points);
    for (std::size_t i = 0; i < n_points; ++i)
        x[i] = g.quantile(static_cast<double>(i) / static_cast<double>(n_points));
    return x;
}

double interpolate_periodic(const PeriodicSignal& s, double x)
{
    const std::size_t n = s.size();
    const double pos = wrap_unit(x) * static_cast<double>(n);
    const std::size_t i = std::min(static_cast<std::size_t>(pos), n - 1);
    const double t = pos - static_cast<double>(i);
    return (1.0 - t) * s[i] + t * s[(i + 1) % n];
}

PeriodicSignal apply_forward(const ConvolutionKernel& kernel, const MultiplierProfile& profile, const PeriodicSignal& f)
{
    require(profile.mu.size() == f.size(), "apply_forward: profile size mismatch");
    PeriodicSignal out = circular_convolve(f, kernel.spectrum);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= profile.mu[i];
    return out;
}

PeriodicSignal apply_forward(const ConvolutionKernel& kernel, const DesignDensity& design, const PeriodicSignal& f)
{
    require(design.size() == f.size(), "apply_forward: design size mismatch");
    const PeriodicSignal h = circular_convolve(f, kernel.spectrum);
    const auto x = design_quantiles(design, f.size());
    PeriodicSignal out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = interpolate_periodic(h, x[i]);
    return out;
}

ForwardOperator::ForwardOperator(ConvolutionKernel kernel, MultiplierProfile profile)
    : kernel_(std::move(kernel)), shape_(std::move(profile))
{
    const auto& mu = std::get<MultiplierProfile>(shape_).mu;
    require(mu.size() == kernel_.size(), "ForwardOperator: profile and kernel sizes differ");
    noise_profile_.resize(mu.size());
    bool any = false;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        noise_profile_[i] = mu[i] == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (mu[i] * mu[i]);
        any = any || mu[i] != 0.0;
    }
    require(any, "ForwardOperator: multiplier vanishes everywhere");
}

ForwardOperator::ForwardOperator(ConvolutionKernel kernel, DesignDensity design)
    : kernel_(std::move(kernel)), shape_(std::move(design))
{
    const auto& d = std::get<DesignDensity>(shape_);
    require(d.size() == kernel_.size(), "ForwardOperator: density and kernel sizes differ");
    noise_profile_.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        noise_profile_[i] = d.g_nodes[i] == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / d.g_nodes[i];
}

const std::vector<Singularity>& ForwardOperator::singularities() const
{
    return design_mode() ? design().singularities : profile().singularities;
}

double ForwardOperator::inhomogeneity() const
{
    double a = 0.0;
    for (const auto& s : singularities()) a = std::max(a, s.order);
    return a;
}

PeriodicSignal ForwardOperator::apply(const PeriodicSignal& f) const
{
    return design_mode() ? apply_forward(kernel_, design(), f) : apply_forward(kernel_, profile(), f);
}

PeriodicSignal ForwardOperator::observation_transform(const PeriodicSignal& y) const
{
    require(y.size() == size(), "observation_transform: size mismatch");
    PeriodicSignal Y(y.size());
    if (design_mode()) {
        const auto& d = design();
        for (std::size_t k = 0; k < y.size(); ++k)
            Y[k] = interpolate_periodic(y, d.cdf(static_cast<double>(k) / static_cast<double>(y.size())));
    } else {
        const auto& mu = profile().mu;
        for (std::size_t i = 0; i < y.size(); ++i) Y[i] = mu[i] == 0.0 ? 0.0 : y[i] / mu[i];
    }
    return Y;
}

} // namespace hwv
