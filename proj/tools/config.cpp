#include "config.hpp"

#include "hwv/csv.hpp"
#include "hwv/errors.hpp"

#include <fstream>
#include <set>
#include <string>

namespace hwv::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed)
{
    require(j.is_object(), std::string(where) + " must be a JSON object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        require(ok.count(key) > 0, std::string("unknown key '") + key + "' in " + where);
}

template <class T>
void get(const json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& out)
{
    if (!j.contains(key) || j.at(key).is_null()) return;
    T v{};
    get(j, key, v);
    out = v;
}

ProfileKind profile_kind(const std::string& s)
{
    if (s == "constant") return ProfileKind::constant;
    if (s == "power-zero") return ProfileKind::power_zero;
    if (s == "am-cosine") return ProfileKind::am_cosine;
    if (s == "custom-grid") return ProfileKind::custom_grid;
    throw PreconditionError("unknown profile '" + s + "'");
}

DensityKind density_kind(const std::string& s)
{
    if (s == "uniform") return DensityKind::uniform;
    if (s == "power-zero") return DensityKind::power_zero;
    if (s == "linear") return DensityKind::linear;
    if (s == "custom-grid") return DensityKind::custom_grid;
    throw PreconditionError("unknown density '" + s + "'");
}

EstimatorMode estimator_mode(const std::string& s)
{
    if (s == "hybrid") return EstimatorMode::hybrid;
    if (s == "wvd") return EstimatorMode::wvd;
    if (s == "both") return EstimatorMode::both;
    throw PreconditionError("unknown estimator mode '" + s + "'");
}

void read_params(const json& j, ProfileParams& p, std::size_t n)
{
    check_keys(j, "params", {"x0", "h", "alpha", "omega", "theta", "theta_sign", "grid_file", "singularities"});
    get(j, "x0", p.x0);
    get(j, "h", p.h);
    get(j, "alpha", p.alpha);
    get(j, "omega", p.omega);
    get(j, "theta", p.theta);
    get(j, "theta_sign", p.theta_sign);
    if (j.contains("grid_file")) p.grid_values = load_grid_profile(j.at("grid_file").get<std::string>(), n);
    if (j.contains("singularities")) {
        p.singularities.clear();
        for (const auto& s : j.at("singularities")) {
            check_keys(s, "singularity", {"location", "order"});
            Singularity z;
            get(s, "location", z.location);
            get(s, "order", z.order);
            p.singularities.push_back(z);
        }
    }
}

void read_estimator(const json& j, EstimatorSettings& e)
{
    check_keys(j, "estimator", {"m1", "J", "vanishing_moments", "kappa", "threshold", "threshold_constant", "weights",
                                "D", "D0", "lepski_sigma_squared", "singularity_aware"});
    get(j, "m1", e.m1);
    get(j, "J", e.top_level);
    get(j, "vanishing_moments", e.vanishing_moments);
    get(j, "kappa", e.kappa);
    if (j.contains("threshold")) {
        const auto t = j.at("threshold").get<std::string>();
        require(t == "hard" || t == "block", "threshold must be 'hard' or 'block'");
        e.threshold = t == "hard" ? ThresholdKind::hard : ThresholdKind::block;
    }
    get(j, "threshold_constant", e.threshold_constant);
    if (j.contains("weights")) {
        const auto w = j.at("weights").get<std::string>();
        require(w == "numeric" || w == "closed-form", "weights must be 'numeric' or 'closed-form'");
        e.weights = w == "numeric" ? WeightMode::numeric : WeightMode::closed_form;
    }
    get(j, "D", e.D);
    get(j, "D0", e.D0);
    get(j, "lepski_sigma_squared", e.lepski_sigma_squared);
    get(j, "singularity_aware", e.singularity_aware);
}

} // namespace

ExperimentConfig config_from_json(const json& j)
{
    check_keys(j, "config", {"n", "sigma", "seed", "replications", "signal", "kernel", "mode", "profile", "density",
                             "params", "detect_am_zeros", "estimator", "estimator_mode", "threads"});
    ExperimentConfig c;
    get(j, "n", c.n);
    get(j, "sigma", c.sigma);
    get(j, "seed", c.seed);
    get(j, "replications", c.replications);
    get(j, "signal", c.signal);
    if (j.contains("kernel")) {
        const auto& k = j.at("kernel");
        check_keys(k, "kernel", {"kind", "lambda", "N"});
        get(k, "kind", c.kernel.kind);
        get(k, "lambda", c.kernel.lambda);
        get(k, "N", c.kernel.N);
    }
    if (j.contains("mode")) {
        const auto m = j.at("mode").get<std::string>();
        require(m == "multiplier" || m == "design", "mode must be 'multiplier' or 'design'");
        c.mode = m == "design" ? OperatorMode::design : OperatorMode::multiplier;
    }
    if (j.contains("profile")) c.profile = profile_kind(j.at("profile").get<std::string>());
    if (j.contains("density")) c.density = density_kind(j.at("density").get<std::string>());
    if (j.contains("params")) read_params(j.at("params"), c.params, c.n);
    get(j, "detect_am_zeros", c.detect_am_zeros);
    if (j.contains("estimator")) read_estimator(j.at("estimator"), c.estimator);
    if (j.contains("estimator_mode")) c.estimator_mode = estimator_mode(j.at("estimator_mode").get<std::string>());
    get(j, "threads", c.threads);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    require(in.good(), "cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw PreconditionError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c)
{
    json e{{"m1", c.estimator.m1},
           {"vanishing_moments", c.estimator.vanishing_moments},
           {"kappa", c.estimator.kappa},
           {"threshold", c.estimator.threshold == ThresholdKind::hard ? "hard" : "block"},
           {"weights", c.estimator.weights == WeightMode::numeric ? "numeric" : "closed-form"},
           {"lepski_sigma_squared", c.estimator.lepski_sigma_squared},
           {"singularity_aware", c.estimator.singularity_aware}};
    if (c.estimator.top_level) e["J"] = *c.estimator.top_level;
    if (c.estimator.threshold_constant) e["threshold_constant"] = *c.estimator.threshold_constant;
    if (c.estimator.D) e["D"] = *c.estimator.D;
    if (c.estimator.D0) e["D0"] = *c.estimator.D0;
    json sing = json::array();
    for (const auto& s : c.params.singularities) sing.push_back({{"location", s.location}, {"order", s.order}});
    return {{"n", c.n},
            {"sigma", c.sigma},
            {"seed", c.seed},
            {"replications", c.replications},
            {"signal", c.signal},
            {"kernel", {{"kind", c.kernel.kind}, {"lambda", c.kernel.lambda}, {"N", c.kernel.N}}},
            {"mode", c.mode == OperatorMode::design ? "design" : "multiplier"},
            {"profile", to_string(c.profile)},
            {"density", to_string(c.density)},
            {"params",
             {{"x0", c.params.x0},
              {"h", c.params.h},
              {"alpha", c.params.alpha},
              {"omega", c.params.omega},
              {"theta", c.params.theta},
              {"theta_sign", c.params.theta_sign},
              {"singularities", sing}}},
            {"detect_am_zeros", c.detect_am_zeros},
            {"estimator", e},
            {"estimator_mode", to_string(c.estimator_mode)},
            {"threads", c.threads}};
}

} // namespace hwv::cli
