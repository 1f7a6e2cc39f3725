#include "hwv/harness.hpp"

#include "hwv/csv.hpp"
#include "hwv/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <thread>

namespace hwv {

namespace {

constexpr double pi = std::numbers::pi;

double quantile_of(std::vector<double> v, double q)
{
    require(!v.empty(), "quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept = nullptr)
{
    const double k = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    if (intercept) *intercept = my - slope * mx;
    return slope;
}

std::vector<double> moving_average5(const PeriodicSignal& y)
{
    const std::size_t n = y.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t d = 0; d < 5; ++d) acc += std::abs(y[(i + n + d - 2) % n]);
        out[i] = acc / 5.0;
    }
    return out;
}

// Residual of the least-squares fit env ~ A(x) |cos(2 pi delta x + theta)|.
// Without windows A is a global quadratic; with windows only samples within
// `half` of a window centre enter and A is a separate quadratic per window.
double envelope_residual(const std::vector<double>& env, double delta, double theta,
                         const std::vector<double>& windows = {}, double half = 0.0)
{
    const std::size_t n = env.size();
    const auto cols = static_cast<Eigen::Index>(3 * std::max<std::size_t>(windows.size(), 1));
    std::vector<std::size_t> rows;
    std::vector<int> owner;
    for (std::size_t i = 0; i < n; ++i) {
        if (windows.empty()) {
            rows.push_back(i);
            owner.push_back(-1);
            continue;
        }
        const double x = static_cast<double>(i) / static_cast<double>(n);
        for (std::size_t w = 0; w < windows.size(); ++w) {
            double d = x - windows[w];
            d -= std::round(d);
            if (std::abs(d) < half) {
                rows.push_back(i);
                owner.push_back(static_cast<int>(w));
                break;
            }
        }
    }
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), cols);
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double x = static_cast<double>(rows[r]) / static_cast<double>(n);
        const double e = std::abs(std::cos(2.0 * pi * delta * x + theta));
        const auto ri = static_cast<Eigen::Index>(r);
        if (owner[r] < 0) {
            X(ri, 0) = e;
            X(ri, 1) = e * x;
            X(ri, 2) = e * x * x;
        } else {
            double d = x - windows[static_cast<std::size_t>(owner[r])];
            d -= std::round(d);
            X(ri, 3 * owner[r]) = e;
            X(ri, 3 * owner[r] + 1) = e * d;
            X(ri, 3 * owner[r] + 2) = e * d * d;
        }
        b(ri) = env[rows[r]];
    }
    const Eigen::VectorXd c = X.colPivHouseholderQr().solve(b);
    return (X * c - b).squaredNorm();
}

// Golden-section minimum of f on [a, b].
template <class F>
double golden_min(F f, double a, double b, int iterations = 40)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < iterations; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

std::vector<double> envelope_zero_set(double delta, double theta)
{
    // 2 pi delta x + theta = pi/2 + k pi
    std::vector<double> zeros;
    const int span = static_cast<int>(2.0 * std::abs(delta)) + 2;
    for (int k = -span; k <= span; ++k) {
        const double x = (pi / 2.0 + k * pi - theta) / (2.0 * pi * delta);
        if (x >= 0.0 && x < 1.0) zeros.push_back(x);
    }
    std::sort(zeros.begin(), zeros.end());
    return zeros;
}

struct Prepared {
    PeriodicSignal f;
    ForwardOperator op;
    std::optional<HybridEstimator> hybrid;
    std::optional<HybridEstimator> wvd;
};

EstimatorSettings wvd_settings(EstimatorSettings s)
{
    s.singularity_aware = false;
    return s;
}

Prepared prepare(const ExperimentConfig& cfg)
{
    Prepared p{make_test_signal(cfg.signal, cfg.n), build_operator(cfg), std::nullopt, std::nullopt};
    if (!cfg.detect_am_zeros) {
        if (cfg.estimator_mode != EstimatorMode::wvd) p.hybrid.emplace(p.op, cfg.sigma, cfg.estimator);
        if (cfg.estimator_mode != EstimatorMode::hybrid) p.wvd.emplace(p.op, cfg.sigma, wvd_settings(cfg.estimator));
    }
    return p;
}

ReplicationResult replicate(const ExperimentConfig& cfg, const Prepared& prep, int index)
{
    ReplicationResult r;
    r.index = index;
    r.seed = replication_seed(cfg.seed, static_cast<std::uint64_t>(index));
    const Dataset data = generate_dataset(prep.op, prep.f, cfg.sigma, r.seed);
    r.snr = snr(prep.f, data.gamma, cfg.sigma, cfg.n);

    const HybridEstimator* hybrid = prep.hybrid ? &*prep.hybrid : nullptr;
    const HybridEstimator* wvd = prep.wvd ? &*prep.wvd : nullptr;
    std::optional<HybridEstimator> local_hybrid, local_wvd;
    if (cfg.detect_am_zeros) {
        const auto am = detect_am_phase(data.y, cfg.params.omega);
        r.detected_zeros = am.zeros;
        MultiplierProfile prof = prep.op.profile();
        prof.singularities.clear();
        for (double z : am.zeros) prof.singularities.push_back({z, 2.0});
        const ForwardOperator op_est(prep.op.kernel(), prof);
        if (cfg.estimator_mode != EstimatorMode::wvd) hybrid = &local_hybrid.emplace(op_est, cfg.sigma, cfg.estimator);
        if (cfg.estimator_mode != EstimatorMode::hybrid)
            wvd = &local_wvd.emplace(op_est, cfg.sigma, wvd_settings(cfg.estimator));
    }

    const double f2 = squared_norm(prep.f);
    r.mse_wvd = std::numeric_limits<double>::quiet_NaN();
    if (wvd) {
        const HybridEstimate w = adaptive_estimate(*wvd, data.y);
        r.mse_wvd = mean_squared_error(w.combined, prep.f);
        if (!hybrid) {
            r.mse = r.mse_wvd;
            r.m_hat = w.m;
            r.trace = w.trace;
        }
    }
    if (hybrid) {
        HybridEstimate h = adaptive_estimate(*hybrid, data.y);
        r.mse = mean_squared_error(h.combined, prep.f);
        r.m_hat = h.m;
        r.fallback = h.trace.fallback;
        const auto truth = decompose_truth(prep.f, hybrid->basis(), h.m, hybrid->op().singularities(), hybrid->D(),
                                           hybrid->D0());
        r.f0_error = mean_squared_error(h.f0, truth.f0);
        r.fc_error = mean_squared_error(h.fc, truth.fc);
        r.trace = std::move(h.trace);
    }
    r.relative_mse = f2 > 0.0 ? r.mse / f2 : r.mse;
    return r;
}

ExperimentSummary summarize(const std::vector<ReplicationResult>& reps)
{
    ExperimentSummary s;
    std::vector<double> mse, wvd;
    std::map<int, int> counts;
    for (const auto& r : reps) {
        mse.push_back(r.mse);
        if (!std::isnan(r.mse_wvd)) {
            wvd.push_back(r.mse_wvd);
            ++s.compared;
            if (r.mse < r.mse_wvd) ++s.hybrid_wins;
        }
        ++counts[r.m_hat];
    }
    s.median_mse = quantile_of(mse, 0.5);
    s.iqr_mse = quantile_of(mse, 0.75) - quantile_of(mse, 0.25);
    if (!wvd.empty()) {
        s.median_mse_wvd = quantile_of(wvd, 0.5);
        s.iqr_mse_wvd = quantile_of(wvd, 0.75) - quantile_of(wvd, 0.25);
    } else {
        s.median_mse_wvd = std::numeric_limits<double>::quiet_NaN();
        s.iqr_mse_wvd = std::numeric_limits<double>::quiet_NaN();
    }
    int best = -1;
    for (const auto& [m, c] : counts)
        if (c > best) {
            best = c;
            s.modal_m_hat = m;
        }
    return s;
}

} // namespace

PeriodicSignal make_test_signal(std::string_view name, std::size_t n)
{
    if (name == "blip")
        return PeriodicSignal::sample(n, [](double t) {
            return t <= 0.8 ? 0.32 + 0.6 * t + 0.3 * std::exp(-100.0 * (t - 0.3) * (t - 0.3))
                            : -0.28 + 0.6 * t + 0.3 * std::exp(-100.0 * (t - 1.3) * (t - 1.3));
        });
    if (name == "flat") return PeriodicSignal(n, 1.0);
    if (name == "triangle") return PeriodicSignal::sample(n, [](double t) { return 1.0 - std::abs(4.0 * t - 2.0); });
    if (name == "sine") return PeriodicSignal::sample(n, [](double t) { return std::sin(2.0 * pi * t); });
    throw PreconditionError("unknown test signal '" + std::string(name) + "'");
}

double NormalStream::uniform_open()
{
    // 53 random bits mapped into (0, 1]
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::next()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 2.0 * pi * uniform_open();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t r)
{
    std::uint64_t z = master + (r + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Dataset generate_heteroscedastic(const ForwardOperator& op, const PeriodicSignal& f, double sigma, std::uint64_t seed)
{
    require(!op.design_mode(), "generate_heteroscedastic needs a multiplier operator");
    require(sigma >= 0.0, "noise level must be nonnegative");
    Dataset d;
    const std::size_t n = f.size();
    d.f = f;
    d.clean = op.apply(f);
    d.y = d.clean;
    d.sigma = sigma;
    d.seed = seed;
    NormalStream noise(seed);
    for (std::size_t i = 0; i < n; ++i) d.y[i] += sigma * noise.next();
    d.Y = op.observation_transform(d.y);
    d.x.resize(n);
    d.gamma.resize(n);
    const auto& mu = op.profile().mu;
    for (std::size_t i = 0; i < n; ++i) {
        d.x[i] = static_cast<double>(i) / static_cast<double>(n);
        d.gamma[i] = mu[i] == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::abs(mu[i]);
    }
    return d;
}

Dataset generate_irregular(const ForwardOperator& op, const PeriodicSignal& f, double sigma, std::uint64_t seed)
{
    require(op.design_mode(), "generate_irregular needs a design-density operator");
    require(sigma >= 0.0, "noise level must be nonnegative");
    Dataset d;
    const std::size_t n = f.size();
    d.f = f;
    d.clean = op.apply(f);
    d.y = d.clean;
    d.sigma = sigma;
    d.seed = seed;
    NormalStream noise(seed);
    for (std::size_t i = 0; i < n; ++i) d.y[i] += sigma * noise.next();
    d.Y = op.observation_transform(d.y);
    d.x = design_quantiles(op.design(), n);
    d.gamma.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.gamma[i] = std::sqrt(op.noise_profile()[i]);
    return d;
}

Dataset generate_dataset(const ForwardOperator& op, const PeriodicSignal& f, double sigma, std::uint64_t seed)
{
    return op.design_mode() ? generate_irregular(op, f, sigma, seed) : generate_heteroscedastic(op, f, sigma, seed);
}

double snr(const PeriodicSignal& f, const std::vector<double>& gamma, double sigma, std::size_t n)
{
    require(gamma.size() == f.size(), "snr: gamma size mismatch");
    require(sigma > 0.0, "snr: sigma must be positive");
    double mean = 0.0;
    for (double v : f.values()) mean += v;
    mean /= static_cast<double>(f.size());
    double var = 0.0;
    for (double v : f.values()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(f.size());
    double g2 = 0.0;
    for (double g : gamma) g2 += g * g;
    const double gnorm = std::sqrt(g2 / static_cast<double>(gamma.size()));
    return std::sqrt(static_cast<double>(n)) * std::sqrt(var) / (gnorm * sigma);
}

AmPhaseEstimate detect_am_phase(const PeriodicSignal& y, double omega)
{
    const std::size_t n = y.size();
    const double half = static_cast<double>(n) / 2.0;
    const double delta = omega - half * std::round(omega / half);
    require(delta != 0.0, "detect_am_phase: carrier aliases to a constant envelope");
    const auto env = moving_average5(y);

    const int steps = 720;
    double best_theta = 0.0, best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < steps; ++k) {
        const double theta = pi * k / steps;
        const double r = envelope_residual(env, delta, theta);
        if (r < best) {
            best = r;
            best_theta = theta;
        }
    }
    double theta = golden_min([&](double t) { return envelope_residual(env, delta, t); }, best_theta - pi / steps,
                              best_theta + pi / steps);

    // Local pass: amplitude fitted on windows around the provisional zeros
    // removes the bias of the global amplitude model.
    const double window = std::min(0.25, 0.25 / std::abs(delta));
    const auto provisional = envelope_zero_set(delta, theta);
    if (!provisional.empty())
        theta = golden_min([&](double t) { return envelope_residual(env, delta, t, provisional, window); },
                           theta - 0.1, theta + 0.1);

    AmPhaseEstimate out;
    out.theta = std::fmod(std::fmod(theta, pi) + pi, pi);
    out.residual = envelope_residual(env, delta, out.theta, provisional, window);
    out.zeros = envelope_zero_set(delta, out.theta);
    return out;
}

double mean_squared_error(const PeriodicSignal& estimate, const PeriodicSignal& truth)
{
    return squared_norm(estimate - truth);
}

void ExperimentConfig::validate() const
{
    require(n >= 8 && is_power_of_two(n), "n must be a power of two >= 8");
    require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
    require(replications >= 1, "replications must be at least 1");
    require(!detect_am_zeros || (mode == OperatorMode::multiplier && profile == ProfileKind::am_cosine),
            "AM zero detection needs an am-cosine multiplier profile");
}

ConvolutionKernel build_kernel(const KernelSpec& spec, std::size_t n)
{
    if (spec.kind == "q1") return kernel_q1(spec.lambda, n);
    if (spec.kind == "q2") return kernel_q2(spec.lambda, spec.N, n);
    if (spec.kind == "identity") return kernel_identity(n);
    throw PreconditionError("unknown kernel kind '" + spec.kind + "'");
}

ForwardOperator build_operator(const ExperimentConfig& cfg)
{
    ConvolutionKernel q = build_kernel(cfg.kernel, cfg.n);
    if (cfg.mode == OperatorMode::design) return ForwardOperator(std::move(q), make_design_density(cfg.density, cfg.params, cfg.n));
    return ForwardOperator(std::move(q), make_mu_profile(cfg.profile, cfg.params, cfg.n));
}

TrueDecomposition decompose_truth(const PeriodicSignal& f, const PeriodizedBasis& basis, int m,
                                  const std::vector<Singularity>& singularities, int D, int D0)
{
    CoefficientTree t = analyze(basis, f, m);
    const IndexPartition part = partition_indices(m, basis.finest() - 1, singularities, D, D0);
    const auto& k0 = part.scaling_level(m);
    for (std::size_t k = 0; k < t.a.size(); ++k)
        if (!k0.is_affected[k]) t.a[k] = 0.0;
    for (int j = m; j < t.J; ++j) {
        const auto& k1 = part.wavelet_level(j);
        auto& b = t.detail(j);
        for (std::size_t k = 0; k < b.size(); ++k)
            if (!k1.is_affected[k]) b[k] = 0.0;
    }
    TrueDecomposition out{reconstruct(basis, t), PeriodicSignal(f.size())};
    out.fc = f - out.f0;
    return out;
}

ReplicationResult run_replication(const ExperimentConfig& config, int index)
{
    config.validate();
    return replicate(config, prepare(config), index);
}

ExperimentResult run_experiment(const ExperimentConfig& config)
{
    config.validate();
    const Prepared prep = prepare(config);
    ExperimentResult res;
    res.config = config;
    res.replications.resize(static_cast<std::size_t>(config.replications));

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        std::min<unsigned>(config.threads > 0 ? static_cast<unsigned>(config.threads) : hw,
                           static_cast<unsigned>(config.replications));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mtx;
    const auto work = [&] {
        for (int i = next++; i < config.replications; i = next++) {
            try {
                res.replications[static_cast<std::size_t>(i)] = replicate(config, prep, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mtx);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    res.summary = summarize(res.replications);
    return res;
}

void write_experiment_artifacts(const ExperimentResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    CsvTable reps;
    std::vector<double> idx, seed, mse, rel, wvd, snrv, mh, fb, e0, ec;
    for (const auto& r : result.replications) {
        idx.push_back(r.index);
        seed.push_back(static_cast<double>(r.seed));
        mse.push_back(r.mse);
        rel.push_back(r.relative_mse);
        wvd.push_back(r.mse_wvd);
        snrv.push_back(r.snr);
        mh.push_back(r.m_hat);
        fb.push_back(r.fallback ? 1.0 : 0.0);
        e0.push_back(r.f0_error);
        ec.push_back(r.fc_error);
    }
    reps.add("replication", idx);
    reps.add("seed", seed);
    reps.add("mse", mse);
    reps.add("relative_mse", rel);
    reps.add("mse_wvd", wvd);
    reps.add("snr", snrv);
    reps.add("m_hat", mh);
    reps.add("fallback", fb);
    reps.add("f0_error", e0);
    reps.add("fc_error", ec);
    write_csv(dir / "replications.csv", reps);

    const auto& s = result.summary;
    CsvTable sum;
    sum.add("median_mse", {s.median_mse});
    sum.add("iqr_mse", {s.iqr_mse});
    sum.add("median_mse_wvd", {s.median_mse_wvd});
    sum.add("iqr_mse_wvd", {s.iqr_mse_wvd});
    sum.add("modal_m_hat", {static_cast<double>(s.modal_m_hat)});
    sum.add("hybrid_wins", {static_cast<double>(s.hybrid_wins)});
    sum.add("compared", {static_cast<double>(s.compared)});
    write_csv(dir / "summary.csv", sum);

    std::vector<double> tr, tm, tj, tl;
    for (const auto& r : result.replications)
        for (int m = r.trace.lowest; m <= r.trace.highest; ++m)
            for (int j = m + 1; j <= r.trace.highest; ++j) {
                tr.push_back(r.index);
                tm.push_back(m);
                tj.push_back(j);
                tl.push_back(r.trace.at(m, j));
            }
    CsvTable traces;
    traces.add("replication", tr);
    traces.add("m", tm);
    traces.add("j", tj);
    traces.add("L", tl);
    write_csv(dir / "lepski_traces.csv", traces);
}

RateStudyResult rate_study(const ExperimentConfig& base, const std::vector<std::size_t>& ns, int replications,
                           const BesovParams& smoothness)
{
    require(ns.size() >= 4, "rate_study: need at least four grid sizes");
    require(replications >= 10, "rate_study: need at least ten replications per grid size");
    require(base.sigma > 0.0, "rate_study: sigma = 0 leaves eps undefined");
    RateStudyResult out;
    std::vector<double> lx_eps, lx_n, ly;
    double alpha = 0.0, beta = 0.0;
    for (std::size_t n : ns) {
        ExperimentConfig cfg = base;
        cfg.n = n;
        cfg.replications = replications;
        const ExperimentResult res = run_experiment(cfg);
        RateStudyRow row;
        row.n = n;
        row.eps = cfg.eps();
        for (const auto& r : res.replications) row.mse.push_back(r.mse);
        row.median_mse = res.summary.median_mse;
        lx_eps.push_back(std::log2(row.eps));
        lx_n.push_back(std::log2(static_cast<double>(n)));
        ly.push_back(std::log2(row.median_mse));
        out.rows.push_back(std::move(row));
        if (out.rows.size() == 1) {
            const ForwardOperator op = build_operator(cfg);
            alpha = op.inhomogeneity();
            beta = op.kernel().ill_posedness();
        }
    }
    out.slope_eps = ols_slope(lx_eps, ly, &out.intercept);
    out.slope_n = ols_slope(lx_n, ly);
    out.theory = minimax_rate(smoothness, ProblemParams{alpha, beta, out.rows.front().eps});
    return out;
}

const char* to_string(ProfileKind k)
{
    switch (k) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::power_zero: return "power-zero";
    case ProfileKind::am_cosine: return "am-cosine";
    case ProfileKind::custom_grid: return "custom-grid";
    }
    return "?";
}

const char* to_string(DensityKind k)
{
    switch (k) {
    case DensityKind::uniform: return "uniform";
    case DensityKind::power_zero: return "power-zero";
    case DensityKind::linear: return "linear";
    case DensityKind::custom_grid: return "custom-grid";
    }
    return "?";
}

const char* to_string(EstimatorMode k)
{
    switch (k) {
    case EstimatorMode::hybrid: return "hybrid";
    case EstimatorMode::wvd: return "wvd";
    case EstimatorMode::both: return "both";
    }
    return "?";
}

} // namespace hwv
