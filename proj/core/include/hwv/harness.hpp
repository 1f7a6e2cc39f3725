#pragma once

#include "hwv/adaptive.hpp"
#include "hwv/operator.hpp"
#include "hwv/spectral.hpp"
#include "hwv/theory.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace hwv {

// "blip", "flat", "triangle" or "sine".
PeriodicSignal make_test_signal(std::string_view name, std::size_t n);

// Standard normal draws: 64-bit Mersenne Twister (std::mt19937_64) feeding
// the Box-Muller transform, so a seed gives the same stream everywhere.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    double uniform_open();
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Seed of replication r derived from the master seed by SplitMix64.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t r);

struct Dataset {
    std::vector<double> x;  // observation points
    PeriodicSignal f;       // truth on the grid
    PeriodicSignal clean;   // noiseless observations Qf
    PeriodicSignal y;       // observations
    PeriodicSignal Y;       // deconvolution-scale data
    std::vector<double> gamma; // noise multiplier of Y
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// y_i = mu(i/n) (q*f)(i/n) + sigma xi_i and Y = y / mu.
Dataset generate_heteroscedastic(const ForwardOperator& op, const PeriodicSignal& f, double sigma, std::uint64_t seed);
// y_i = (q*f)(x_i) + sigma xi_i at x_i = G^-1(i/n).
Dataset generate_irregular(const ForwardOperator& op, const PeriodicSignal& f, double sigma, std::uint64_t seed);
Dataset generate_dataset(const ForwardOperator& op, const PeriodicSignal& f, double sigma, std::uint64_t seed);

// sqrt(n) std(f) / (||gamma|| sigma), ||.|| the discrete L2 norm.
double snr(const PeriodicSignal& f, const std::vector<double>& gamma, double sigma, std::size_t n);

struct AmPhaseEstimate {
    double theta = 0.0;
    std::vector<double> zeros;
    double residual = 0.0;
};

// Fits the smoothed |y| to a quadratic times |cos(2 pi (omega - n/2) x + theta)|
// over theta in [0, pi) and reads the zeros off the fitted envelope.
AmPhaseEstimate detect_am_phase(const PeriodicSignal& y, double omega);

double mean_squared_error(const PeriodicSignal& estimate, const PeriodicSignal& truth);

enum class OperatorMode { multiplier, design };
enum class EstimatorMode { hybrid, wvd, both };

struct KernelSpec {
    std::string kind = "q1"; // identity, q1, q2
    double lambda = 5.0;
    int N = 2;
};

struct ExperimentConfig {
    std::size_t n = 1024;
    double sigma = 0.02;
    std::uint64_t seed = 1;
    int replications = 1;
    std::string signal = "blip";
    KernelSpec kernel;
    OperatorMode mode = OperatorMode::multiplier;
    ProfileKind profile = ProfileKind::power_zero;
    DensityKind density = DensityKind::uniform;
    ProfileParams params = default_params();
    bool detect_am_zeros = false; // take AM singularities from the data
    EstimatorSettings estimator;
    EstimatorMode estimator_mode = EstimatorMode::both;
    int threads = 0; // 0: hardware concurrency

    double eps() const { return sigma * sigma / static_cast<double>(n); }
    // Power-zero window at 1/3 with h = 1/6 and alpha = 3.
    static ProfileParams default_params()
    {
        ProfileParams p;
        p.alpha = 3.0;
        return p;
    }
    void validate() const;
};

ConvolutionKernel build_kernel(const KernelSpec& spec, std::size_t n);
ForwardOperator build_operator(const ExperimentConfig& config);

struct ReplicationResult {
    int index = 0;
    std::uint64_t seed = 0;
    double mse = 0.0;          // hybrid (or the only estimator run)
    double relative_mse = 0.0; // mse / ||f||^2
    double mse_wvd = 0.0;      // wavelet-vaguelette only; NaN when not run
    double snr = 0.0;
    int m_hat = 0;
    bool fallback = false;
    double f0_error = 0.0; // ||f0_hat - f_{0,m_hat}||^2
    double fc_error = 0.0; // ||fc_hat - f_{c,m_hat}||^2
    std::vector<double> detected_zeros;
    LepskiTrace trace;
};

struct ExperimentSummary {
    double median_mse = 0.0;
    double iqr_mse = 0.0;
    double median_mse_wvd = 0.0;
    double iqr_mse_wvd = 0.0;
    int modal_m_hat = 0;
    int hybrid_wins = 0;  // paired replications with hybrid MSE below WVD
    int compared = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ReplicationResult> replications;
    ExperimentSummary summary;
};

// One replication: simulate, estimate with the configured estimator(s).
ReplicationResult run_replication(const ExperimentConfig& config, int index);
ExperimentResult run_experiment(const ExperimentConfig& config);
// replications.csv, summary.csv and lepski_traces.csv under dir.
void write_experiment_artifacts(const ExperimentResult& result, const std::filesystem::path& dir);

struct RateStudyRow {
    std::size_t n = 0;
    double eps = 0.0;
    double median_mse = 0.0;
    std::vector<double> mse;
};

struct RateStudyResult {
    std::vector<RateStudyRow> rows;
    double slope_eps = 0.0; // OLS slope of log2 median MSE on log2 eps
    double slope_n = 0.0;   // the same against log2 n at fixed sigma
    double intercept = 0.0;
    MinimaxRate theory;
};

RateStudyResult rate_study(const ExperimentConfig& base, const std::vector<std::size_t>& ns, int replications,
                           const BesovParams& smoothness);

// Splits f at level m into its singularity-affected part
// sum_{K_0m} a phi + sum_{j >= m} sum_{K_1j} b psi and the remainder.
struct TrueDecomposition {
    PeriodicSignal f0;
    PeriodicSignal fc;
};
TrueDecomposition decompose_truth(const PeriodicSignal& f, const PeriodizedBasis& basis, int m,
                                  const std::vector<Singularity>& singularities, int D, int D0);

const char* to_string(ProfileKind k);
const char* to_string(DensityKind k);
const char* to_string(EstimatorMode k);

} // namespace hwv
