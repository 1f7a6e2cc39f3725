#include "config.hpp"

#include "hwv/hwv.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace hwv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json nan_safe(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

void emit_json(const json& j, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    require(out.good(), "cannot write " + path);
    out << j.dump(2) << '\n';
}

std::vector<double> parse_sizes(const std::string& s)
{
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw PreconditionError("bad grid size '" + item + "'");
        }
    }
    return out;
}

// The operator the estimator sees: with AM detection it carries the
// zeros read off the data instead of the true ones.
ForwardOperator estimation_operator(const ExperimentConfig& cfg, const ForwardOperator& op, const PeriodicSignal& y,
                                    std::vector<double>* zeros)
{
    if (!cfg.detect_am_zeros) return op;
    const auto am = detect_am_phase(y, cfg.params.omega);
    if (zeros) *zeros = am.zeros;
    MultiplierProfile prof = op.profile();
    prof.singularities.clear();
    for (double z : am.zeros) prof.singularities.push_back({z, 2.0});
    return ForwardOperator(op.kernel(), prof);
}

EstimatorSettings settings_for(const ExperimentConfig& cfg)
{
    EstimatorSettings s = cfg.estimator;
    if (cfg.estimator_mode == EstimatorMode::wvd) s.singularity_aware = false;
    return s;
}

struct Loaded {
    ExperimentConfig cfg;
    ForwardOperator op;
    PeriodicSignal y;
    std::optional<PeriodicSignal> f;
    std::vector<double> x;
};

Loaded load_data(const std::string& config, const std::string& data)
{
    const ExperimentConfig cfg = cli::load_config(config);
    const CsvTable t = read_csv(data);
    require(t.has("y"), data + ": no 'y' column");
    require(t.rows() == cfg.n, data + ": expected " + std::to_string(cfg.n) + " rows, found " + std::to_string(t.rows()));
    Loaded l{cfg, build_operator(cfg), PeriodicSignal(t.column("y")), std::nullopt, {}};
    if (t.has("f")) l.f = PeriodicSignal(t.column("f"));
    if (t.has("x")) l.x = t.column("x");
    else
        for (std::size_t i = 0; i < cfg.n; ++i) l.x.push_back(static_cast<double>(i) / static_cast<double>(cfg.n));
    return l;
}

int cmd_simulate(const std::string& config, int replication, const std::string& out)
{
    const auto cfg = cli::load_config(config);
    const auto op = build_operator(cfg);
    const auto f = make_test_signal(cfg.signal, cfg.n);
    const auto seed = replication_seed(cfg.seed, static_cast<std::uint64_t>(replication));
    const auto d = generate_dataset(op, f, cfg.sigma, seed);
    CsvTable t;
    t.add("x", d.x);
    t.add("f", d.f.values());
    t.add("y", d.y.values());
    t.add("Y", d.Y.values());
    t.add("gamma", d.gamma);
    write_csv(out, t);
    std::fprintf(stderr, "wrote %s (n=%zu, seed=%llu, snr=%.4g)\n", out.c_str(), cfg.n,
                 static_cast<unsigned long long>(seed), snr(f, d.gamma, cfg.sigma, cfg.n));
    return 0;
}

int cmd_estimate(const std::string& config, const std::string& data, const std::string& out, const std::string& summary)
{
    const Loaded l = load_data(config, data);
    std::vector<double> zeros;
    const HybridEstimator est(estimation_operator(l.cfg, l.op, l.y, &zeros), l.cfg.sigma, settings_for(l.cfg));
    const auto h = adaptive_estimate(est, l.y);

    CsvTable t;
    t.add("x", l.x);
    t.add("f", l.f ? l.f->values() : std::vector<double>(l.cfg.n, std::nan("")));
    t.add("f_hat", h.combined.values());
    t.add("f0_hat", h.f0.values());
    t.add("fc_hat", h.fc.values());
    write_csv(out, t);

    std::vector<double> gamma(l.cfg.n);
    const auto& rho = l.op.noise_profile();
    for (std::size_t i = 0; i < l.cfg.n; ++i) gamma[i] = std::sqrt(rho[i]);
    json j{{"mse", l.f ? nan_safe(mean_squared_error(h.combined, *l.f)) : json(nullptr)},
           {"snr", l.f ? nan_safe(snr(*l.f, gamma, l.cfg.sigma, l.cfg.n)) : json(nullptr)},
           {"m_hat", h.m},
           {"kappa", h.trace.kappa},
           {"seed", l.cfg.seed},
           {"fallback", h.trace.fallback},
           {"J", est.J()},
           {"D", est.D()},
           {"D0", est.D0()}};
    if (l.cfg.detect_am_zeros) j["detected_zeros"] = zeros;
    emit_json(j, summary);
    return 0;
}

int cmd_lepski_trace(const std::string& config, const std::string& data, const std::string& out)
{
    const Loaded l = load_data(config, data);
    const HybridEstimator est(estimation_operator(l.cfg, l.op, l.y, nullptr), l.cfg.sigma, settings_for(l.cfg));
    const auto h = adaptive_estimate(est, l.y);
    std::vector<double> ms, js, ls;
    for (int m = h.trace.lowest; m <= h.trace.highest; ++m)
        for (int j = m + 1; j <= h.trace.highest; ++j) {
            ms.push_back(m);
            js.push_back(j);
            ls.push_back(h.trace.at(m, j));
        }
    CsvTable t;
    t.add("m", ms);
    t.add("j", js);
    t.add("L", ls);
    write_csv(out, t);
    std::fprintf(stderr, "m_hat=%d kappa=%g%s\n", h.m, h.trace.kappa, h.trace.fallback ? " (fallback)" : "");
    return 0;
}

int cmd_rate_study(const std::string& config, const std::string& sizes, int reps, double s, double p,
                   const std::string& out, const std::string& summary)
{
    const auto cfg = cli::load_config(config);
    std::vector<std::size_t> ns;
    for (double v : parse_sizes(sizes)) ns.push_back(static_cast<std::size_t>(v));
    const auto rs = rate_study(cfg, ns, reps, BesovParams{s, p, 2.0, 1.0});
    CsvTable t;
    std::vector<double> n, eps, med;
    for (const auto& r : rs.rows) {
        n.push_back(static_cast<double>(r.n));
        eps.push_back(r.eps);
        med.push_back(r.median_mse);
    }
    t.add("n", n);
    t.add("eps", eps);
    t.add("median_mse", med);
    if (!out.empty()) write_csv(out, t);
    emit_json({{"slope_eps", rs.slope_eps},
               {"slope_n", rs.slope_n},
               {"intercept", rs.intercept},
               {"theory_exponent", rs.theory.exponent},
               {"regime", rs.theory.regime == RateRegime::sparse ? "sparse" : "dense"},
               {"seed", cfg.seed}},
              summary);
    return 0;
}

json summary_json(const ExperimentResult& res)
{
    const auto& s = res.summary;
    double mean_snr = 0.0;
    for (const auto& r : res.replications) mean_snr += r.snr / static_cast<double>(res.replications.size());
    return {{"mse", nan_safe(s.median_mse)},
            {"mse_iqr", nan_safe(s.iqr_mse)},
            {"mse_wvd", nan_safe(s.median_mse_wvd)},
            {"snr", nan_safe(mean_snr)},
            {"m_hat", s.modal_m_hat},
            {"kappa", res.config.estimator.kappa},
            {"seed", res.config.seed},
            {"hybrid_wins", s.hybrid_wins},
            {"compared", s.compared}};
}

int cmd_am_demo(const std::string& config, const std::string& dir, const std::string& summary)
{
    ExperimentConfig cfg;
    if (!config.empty()) {
        cfg = cli::load_config(config);
    } else {
        cfg.n = 512;
        cfg.sigma = 0.01;
        cfg.replications = 20;
        cfg.profile = ProfileKind::am_cosine;
        cfg.params.omega = 256.5;
        cfg.params.theta = std::acos(-1.0) / 6.0;
        cfg.detect_am_zeros = true;
    }
    require(cfg.profile == ProfileKind::am_cosine, "am-demo needs an am-cosine profile");
    const auto res = run_experiment(cfg);
    if (!dir.empty()) write_experiment_artifacts(res, dir);
    json j = summary_json(res);
    json zeros = json::array();
    for (const auto& r : res.replications) zeros.push_back(r.detected_zeros);
    j["detected_zeros"] = zeros;
    emit_json(j, summary);
    return 0;
}

int cmd_run(const std::string& config, const std::string& dir, const std::string& summary)
{
    const auto res = run_experiment(cli::load_config(config));
    if (!dir.empty()) write_experiment_artifacts(res, dir);
    emit_json(summary_json(res), summary);
    return 0;
}

int cmd_snr_check(const std::string& config, const std::vector<double>& alphas)
{
    const auto cfg = cli::load_config(config);
    const auto f = make_test_signal(cfg.signal, cfg.n);
    json rows = json::array();
    auto one = [&](const ExperimentConfig& c) {
        const auto d = generate_dataset(build_operator(c), f, c.sigma, c.seed);
        return snr(f, d.gamma, c.sigma, c.n);
    };
    if (alphas.empty()) {
        rows.push_back({{"alpha", cfg.params.alpha}, {"snr", nan_safe(one(cfg))}});
    } else {
        for (double a : alphas) {
            auto c = cfg;
            c.params.alpha = a;
            rows.push_back({{"alpha", a}, {"snr", nan_safe(one(c))}});
        }
    }
    emit_json({{"sigma", cfg.sigma}, {"n", cfg.n}, {"seed", cfg.seed}, {"snr", rows}}, "");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hybrid wavelet-vaguelette / Galerkin estimation"};
    app.require_subcommand(1);

    std::string config, data, out, summary, dir, sizes = "256,512,1024,2048";
    int replication = 0, reps = 10;
    double s = 1.5, p = 2.0;
    std::vector<double> alphas;

    auto* sim = app.add_subcommand("simulate", "write one simulated dataset as CSV (x, f, y, Y, gamma)");
    sim->add_option("-c,--config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sim->add_option("-r,--replication", replication, "replication index (seed derived from the master seed)");
    sim->add_option("-o,--out", out, "output CSV")->required();

    auto* est = app.add_subcommand("estimate", "estimate f from a dataset CSV");
    est->add_option("-c,--config", config)->required()->check(CLI::ExistingFile);
    est->add_option("-d,--data", data, "CSV with a y column")->required()->check(CLI::ExistingFile);
    est->add_option("-o,--out", out, "output CSV (x, f, f_hat, f0_hat, fc_hat)")->required();
    est->add_option("-s,--summary", summary, "JSON summary path, stdout by default");

    auto* tr = app.add_subcommand("lepski-trace", "write the L matrix of the level selection");
    tr->add_option("-c,--config", config)->required()->check(CLI::ExistingFile);
    tr->add_option("-d,--data", data)->required()->check(CLI::ExistingFile);
    tr->add_option("-o,--out", out, "output CSV (m, j, L)")->required();

    auto* rate = app.add_subcommand("rate-study", "fit the MSE decay over grid sizes");
    rate->add_option("-c,--config", config)->required()->check(CLI::ExistingFile);
    rate->add_option("--sizes", sizes, "comma-separated grid sizes");
    rate->add_option("--reps", reps, "replications per size");
    rate->add_option("--s", s, "Besov smoothness for the reference exponent");
    rate->add_option("--p", p, "Besov integrability for the reference exponent");
    rate->add_option("-o,--out", out, "per-size CSV");
    rate->add_option("--summary", summary, "JSON summary path, stdout by default");

    auto* am = app.add_subcommand("am-demo", "AM experiment with zeros detected from the data");
    am->add_option("-c,--config", config)->check(CLI::ExistingFile);
    am->add_option("--artifacts", dir, "directory for replication/summary/trace CSVs");
    am->add_option("--summary", summary, "JSON summary path, stdout by default");

    auto* run = app.add_subcommand("run", "run a configured experiment");
    run->add_option("-c,--config", config)->required()->check(CLI::ExistingFile);
    run->add_option("--artifacts", dir, "directory for replication/summary/trace CSVs");
    run->add_option("--summary", summary, "JSON summary path, stdout by default");

    auto* sn = app.add_subcommand("snr-check", "signal-to-noise ratio of the configured problem");
    sn->add_option("-c,--config", config)->required()->check(CLI::ExistingFile);
    sn->add_option("--alpha", alphas, "override the zero order, repeatable");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*sim) return cmd_simulate(config, replication, out);
        if (*est) return cmd_estimate(config, data, out, summary);
        if (*tr) return cmd_lepski_trace(config, data, out);
        if (*rate) return cmd_rate_study(config, sizes, reps, s, p, out, summary);
        if (*am) return cmd_am_demo(config, dir, summary);
        if (*run) return cmd_run(config, dir, summary);
        if (*sn) return cmd_snr_check(config, alphas);
    } catch (const PreconditionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IllConditionedError& e) {
        std::fprintf(stderr, "error: %s (condition %.3g)\n", e.what(), e.condition());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
