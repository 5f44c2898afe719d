#include "srmimo/cli.hpp"
#include "srmimo/efficiency.hpp"
#include "srmimo/error.hpp"
#include "srmimo/montecarlo.hpp"
#include "srmimo/rmt.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace srmimo::cli
{

namespace
{

constexpr double z95 = 1.959963984540054;

// Runs `fn`, reporting invalid user-supplied scenarios as configuration errors.
template <class F>
auto as_config(F &&fn) -> decltype(fn())
{
    try
    {
        return fn();
    }
    catch (const Error &e)
    {
        switch (e.code())
        {
        case Errc::InvalidArgument:
        case Errc::BadDimensions:
        case Errc::BadCoefficient:
        case Errc::NonHermitian:
        case Errc::NotPsd:
        case Errc::EmptyInput:
            throw ConfigError(e.what());
        default:
            throw;
        }
    }
}

arma::uword size_key(const Params &p, std::string_view key)
{
    const auto v = p.integer(key);
    if (v == 0)
        throw ConfigError("key '" + std::string(key) + "' must be positive");
    return arma::uword(v);
}

// "opt" selects gamma*; anything else must be a nonnegative number.
std::optional<double> gamma_value(const std::string &text, std::string_view key)
{
    if (text == "opt")
        return std::nullopt;
    const double g = parse_number(text, key);
    if (!(g >= 0.0))
        throw ConfigError("key '" + std::string(key) + "' must be nonnegative or 'opt'");
    return g;
}

std::vector<double> sweep_list(const Params &p, std::string_view key)
{
    auto values = p.numbers(key);
    if (values.empty())
        throw ConfigError("empty sweep: key '" + std::string(key) + "' has no values");
    return values;
}

std::vector<double> antenna_list(const Params &p)
{
    auto values = sweep_list(p, "m_list");
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (!(values[i] >= 1.0) || values[i] != std::floor(values[i]))
            throw ConfigError("key 'm_list': antenna counts must be positive integers");
        if (i > 0 && values[i] <= values[i - 1])
            throw ConfigError("key 'm_list': values must be strictly increasing");
    }
    return values;
}

// Scenario scalars shared by all commands; M defaults to `M` when the command has no 'm' key.
SystemConfig base_config(const Params &p, arma::uword M)
{
    SystemConfig cfg;
    cfg.M = p.has("m") ? size_key(p, "m") : M;
    cfg.K = p.has("k") ? size_key(p, "k") : 1;
    cfg.Pa = p.has("pa") ? p.number("pa") : 1.0;
    cfg.sigma2 = p.has("sigma2") ? p.number("sigma2") : 1.0;
    cfg.eta_a = p.has("eta_a") ? p.number("eta_a") : 1.0;
    cfg.gamma = 1.0;
    cfg.corr = as_config([&] { return parse_correlation(p.has("corr") ? p.text("corr") : "identity", cfg.M); });
    return cfg;
}

std::vector<std::string> header_comments(const Params &p)
{
    std::vector<std::string> out{"srmimo " + std::string(to_string(p.command()))};
    for (const auto &[key, value] : p.entries())
        out.push_back(key + " = " + value);
    return out;
}

rmt::Spectrum spectrum_of(const SystemConfig &cfg)
{
    return rmt::Spectrum(CorrelatedChannel(cfg.corr).eigenvalues(), cfg.K);
}

// ---------------------------------------------------------------------------

CsvTable gamma_sweep(const Params &p, const RunOptions &opt)
{
    mc::ExperimentPlan plan;
    plan.base = base_config(p, 0);
    plan.trials = size_key(p, "trials");
    plan.master_seed = p.integer("seed");
    plan.workers = opt.workers;
    plan.sweep = mc::SweepParam::Gamma;
    as_config([&] { plan.base.validate(); return 0; });

    auto axis = sweep_list(p, "norm_axis");
    for (double v : axis)
        if (!(v > 0.0))
            throw ConfigError("key 'norm_axis': values must be positive");

    const SystemConfig &cfg = plan.base;
    const double scale = 1.0 / cfg.load() - 1.0; // norm_axis = scale / gamma
    const rmt::Spectrum spectrum = spectrum_of(cfg);
    const double gamma_star = rmt::optimal_gamma(spectrum, cfg.Pa, cfg.sigma2);

    // Sort by increasing norm_axis (decreasing gamma) and add the gamma* row.
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    const double star_axis = scale / gamma_star;
    auto close = [&](double v) { return std::abs(v - star_axis) <= 1e-12 * star_axis; };
    if (std::none_of(axis.begin(), axis.end(), close))
        axis.insert(std::upper_bound(axis.begin(), axis.end(), star_axis), star_axis);

    for (double v : axis)
        plan.values.push_back(close(v) ? gamma_star : scale / v);
    as_config([&] { plan.validate(); return 0; });
    const auto records = mc::run_plan(plan);

    std::optional<efficiency::EfficiencyComputation> eff;
    const CorrelatedChannel channel(cfg.corr);
    if (!channel.is_identity())
        eff.emplace(channel.eigenvalues(), cfg.K);

    CsvTable t;
    t.comments = header_comments(p);
    t.comments.push_back("gamma_star = " + format_number(gamma_star));
    t.header = {"gamma", "norm_axis", "is_gamma_star", "mean_sinr_db", "sinr_ci_db", "sinr_de_db", "eta_t",
                "clip_fraction"};
    for (std::size_t i = 0; i < records.size(); ++i)
    {
        const auto &r = records[i];
        const double eta = eff ? eff->eta_t(r.gamma, cfg.Pa, cfg.eta_a)
                               : efficiency::eta_t_iid(r.gamma, cfg.Pa, cfg.eta_a, cfg.M, cfg.K);
        t.rows.push_back({r.gamma, axis[i], (long long)(close(axis[i])), r.mean_sinr_db, r.sinr_ci_halfwidth_db,
                          to_db(r.de->sinr_bar), eta, r.clip_fraction});
    }
    return t;
}

CsvTable sinr_vs_m(const Params &p, const RunOptions &opt)
{
    const auto Ms = antenna_list(p);
    const auto series = p.items("series");
    if (series.empty())
        throw ConfigError("empty sweep: key 'series' has no values");

    CsvTable t;
    t.comments = header_comments(p);
    t.header = {"series", "M", "gamma", "mean_sinr_db", "sinr_ci_db", "sinr_de_db", "clip_fraction", "mean_power"};

    std::vector<mc::ExperimentPlan> plans;
    for (const auto &s : series)
    {
        mc::ExperimentPlan plan;
        plan.base = base_config(p, arma::uword(Ms.front()));
        plan.trials = size_key(p, "trials");
        plan.master_seed = p.integer("seed");
        plan.workers = opt.workers;
        plan.sweep = mc::SweepParam::M;
        plan.values = Ms;
        const auto g = gamma_value(s, "series");
        plan.optimal_gamma = !g;
        plan.base.gamma = g.value_or(1.0);
        as_config([&] { plan.validate(); return 0; });
        plans.push_back(std::move(plan));
    }
    for (std::size_t s = 0; s < series.size(); ++s)
        for (const auto &r : mc::run_plan(plans[s]))
            t.rows.push_back({series[s], (long long)r.swept_value, r.gamma, r.mean_sinr_db, r.sinr_ci_halfwidth_db,
                              to_db(r.de->sinr_bar), r.clip_fraction, r.mean_power});
    return t;
}

CsvTable papr_compare(const Params &p, const RunOptions &opt)
{
    const auto Ms = antenna_list(p);
    mc::ExperimentPlan plan;
    plan.base = base_config(p, arma::uword(Ms.front()));
    plan.trials = size_key(p, "trials");
    plan.master_seed = p.integer("seed");
    plan.workers = opt.workers;
    plan.sweep = mc::SweepParam::M;
    plan.values = Ms;
    const auto g = gamma_value(p.text("gamma"), "gamma");
    plan.optimal_gamma = !g;
    plan.base.gamma = g.value_or(1.0);
    as_config([&] { plan.validate(); return 0; });

    mc::ExperimentPlan mmse = plan;
    mmse.precoder = mc::PrecoderKind::Mmse;
    mmse.optimal_gamma = false;
    mmse.emit_de = false;

    const auto proposed = mc::run_plan(plan);
    const auto baseline = mc::run_plan(mmse);

    CsvTable t;
    t.comments = header_comments(p);
    t.header = {"M",           "gamma",       "proposed_sinr_db", "proposed_ci_db", "mmse_sinr_db",
                "mmse_ci_db",  "papr_db",     "clip_fraction",    "sinr_de_db"};
    for (std::size_t i = 0; i < proposed.size(); ++i)
    {
        const auto &a = proposed[i];
        const auto &b = baseline[i];
        t.rows.push_back({(long long)a.swept_value, a.gamma, a.mean_sinr_db, a.sinr_ci_halfwidth_db, b.mean_sinr_db,
                          b.sinr_ci_halfwidth_db, a.papr_db, a.clip_fraction, to_db(a.de->sinr_bar)});
    }
    return t;
}

CsvTable efficiency_curve(const Params &p, const RunOptions &opt)
{
    SystemConfig cfg = base_config(p, 0);
    as_config([&] { cfg.validate(); return 0; });
    const auto gammas = sweep_list(p, "gamma_list");
    for (double g : gammas)
        if (!(g > 0.0))
            throw ConfigError("key 'gamma_list': values must be positive");
    const std::size_t trials = size_key(p, "trials");

    efficiency::EfficiencyOptions eopt;
    eopt.y_points = size_key(p, "y_points");
    eopt.z_points = size_key(p, "z_points");
    if (eopt.y_points < 16 || eopt.z_points < 16)
        throw ConfigError("keys 'y_points' and 'z_points' must be at least 16");

    const CorrelatedChannel channel(cfg.corr);
    std::optional<efficiency::EfficiencyComputation> eff;
    CsvTable t;
    t.comments = header_comments(p);
    if (channel.is_identity())
        t.comments.push_back("path = exact (Z ~ BetaPrime(K, M - K + 1))");
    else
    {
        eff.emplace(channel.eigenvalues(), cfg.K, eopt);
        t.comments.push_back("path = saddle-point, f_Y raw mass = " + format_number(eff->raw_mass()) +
                             ", f_Z mass = " + format_number(eff->z_density().mass()));
    }

    const auto z = mc::sample_normalized_zf_power(cfg, trials, p.integer("seed"), opt.workers);

    t.header = {"gamma", "eta_t", "eta_mc", "eta_mc_ci", "clip_probability_mc"};
    for (double g : gammas)
    {
        const double eta = eff ? eff->eta_t(g, cfg.Pa, cfg.eta_a) : efficiency::eta_t_iid(g, cfg.Pa, cfg.eta_a, cfg.M, cfg.K);
        double sum = 0.0, sum_sq = 0.0, clipped = 0.0;
        for (double zi : z)
        {
            const double v = std::min(g * zi, cfg.Pa) / cfg.Pa;
            sum += v;
            sum_sq += v * v;
            clipped += g * zi > cfg.Pa ? 1.0 : 0.0;
        }
        const double n = double(z.size());
        const double mean = sum / n;
        const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
        t.rows.push_back({g, eta, cfg.eta_a * mean, cfg.eta_a * z95 * std::sqrt(var / n), clipped / n});
    }
    return t;
}

CsvTable validate_de(const Params &p, const RunOptions &opt)
{
    const auto Ms = antenna_list(p);
    mc::ValidationPlan plan;
    plan.base = base_config(p, arma::uword(Ms.front()));
    for (double m : Ms)
        plan.M.push_back(arma::uword(m));
    plan.load = p.number("k_ratio");
    if (!(plan.load > 0.0 && plan.load < 1.0))
        throw ConfigError("key 'k_ratio' must lie in (0, 1)");
    plan.trials = size_key(p, "trials");
    plan.master_seed = p.integer("seed");
    plan.workers = opt.workers;
    const auto g = gamma_value(p.text("gamma"), "gamma");
    plan.optimal_gamma = !g;
    plan.base.gamma = g.value_or(1.0);
    as_config([&] {
        for (auto M : plan.M)
        {
            SystemConfig c = plan.base;
            c.M = M;
            c.K = arma::uword(std::lround(plan.load * double(M)));
            c.corr = c.corr.resized(M);
            c.validate();
        }
        return 0;
    });

    const auto table = mc::validate_de(plan);
    CsvTable t;
    t.comments = header_comments(p);
    t.comments.push_back(std::string("sinr_gaps_monotone = ") + (table.sinr_monotone ? "1" : "0") +
                         ", power_gaps_monotone = " + (table.power_monotone ? "1" : "0"));
    t.header = {"M",         "K",        "gamma",   "sinr_mc_db",    "sinr_de_db",    "sinr_gap_db",    "sinr_ci_db",
                "power_gap", "power_ci", "rho_gap", "clip_fraction", "sinr_monotone", "power_monotone"};
    for (const auto &r : table.rows)
        t.rows.push_back({(long long)r.M, (long long)r.K, r.gamma, r.sinr_mc_db, r.sinr_de_db, r.sinr_gap_db,
                          r.sinr_ci_db, r.power_gap, r.power_ci, r.rho_gap, r.clip_fraction,
                          (long long)r.sinr_monotone, (long long)r.power_monotone});
    return t;
}

CsvTable de_point(const Params &p, const RunOptions &)
{
    SystemConfig cfg = base_config(p, 0);
    const auto g = gamma_value(p.text("gamma"), "gamma");
    as_config([&] { cfg.validate(); return 0; });

    const rmt::Spectrum spectrum = spectrum_of(cfg);
    cfg.gamma = g ? *g : rmt::optimal_gamma(spectrum, cfg.Pa, cfg.sigma2);
    const auto de = rmt::compute_equivalents(spectrum, cfg.gamma, cfg.Pa, cfg.sigma2);

    CsvTable t;
    t.comments = header_comments(p);
    t.header = {"M",       "K",    "c",       "Pa",    "sigma2", "gamma",    "gamma_star",  "clipping",
                "alpha",   "beta", "trace_T", "rho_bar", "p_bar", "sinr_bar", "sinr_bar_db"};
    t.rows.push_back({(long long)cfg.M, (long long)cfg.K, cfg.load(), cfg.Pa, cfg.sigma2, cfg.gamma, de.gamma_star,
                      (long long)de.clipping, de.alpha, de.beta, de.trace_T, de.rho_bar, de.p_bar, de.sinr_bar,
                      to_db(de.sinr_bar)});
    return t;
}

} // namespace

CsvTable run_command(const Params &params, const RunOptions &options)
{
    switch (params.command())
    {
    case Command::GammaSweep:
        return gamma_sweep(params, options);
    case Command::SinrVsM:
        return sinr_vs_m(params, options);
    case Command::PaprCompare:
        return papr_compare(params, options);
    case Command::Efficiency:
        return efficiency_curve(params, options);
    case Command::ValidateDe:
        return validate_de(params, options);
    case Command::DePoint:
        return de_point(params, options);
    }
    throw ConfigError("unknown command");
}

int main_entry(int argc, char **argv)
{
    CLI::App app{"Power-constrained single-RF massive MIMO precoding: Monte Carlo and large-system analysis"};
    app.require_subcommand(1);

    struct Flags
    {
        std::string config, out, seed, trials, m, k, pa, sigma2, gamma, corr;
        unsigned workers = 0;
        bool print_config = false;
        std::vector<std::string> overrides;
    } flags;

    const std::pair<const char *, const char *> descriptions[] = {
        {"gamma-sweep", "SINR and eta_t versus the normalized axis (1/c - 1)/gamma"},
        {"sinr-vs-m", "SINR versus M for gamma* and fixed gamma series"},
        {"papr-compare", "proposed precoder versus MMSE, with PAPR"},
        {"efficiency", "average power efficiency eta_t versus gamma"},
        {"validate-de", "Monte Carlo versus deterministic equivalents for growing M"},
        {"de-point", "deterministic equivalents of one scenario"},
    };
    for (const auto &[name, text] : descriptions)
    {
        CLI::App *sub = app.add_subcommand(name, text);
        sub->add_option("--config", flags.config, "flat key=value file");
        sub->add_option("--out", flags.out, "output CSV path (default: stdout)");
        sub->add_option("--seed", flags.seed, "master seed");
        sub->add_option("--workers", flags.workers, "parallel trials (0: all cores)");
        sub->add_option("--trials", flags.trials, "Monte Carlo trials per point");
        sub->add_flag("--print-config", flags.print_config, "print the resolved configuration and exit");
        sub->add_option("--m", flags.m, "antenna count M");
        sub->add_option("--k", flags.k, "user count K");
        sub->add_option("--pa", flags.pa, "power cap Pa (linear)");
        sub->add_option("--sigma2", flags.sigma2, "noise variance (linear)");
        sub->add_option("--gamma", flags.gamma, "design scalar, or 'opt' for gamma*");
        sub->add_option("--corr", flags.corr, "identity | exp:<re>,<im> | file:<path>");
        sub->add_option("overrides", flags.overrides, "key=value overrides");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try
    {
        Params params = Params::defaults(*parse_command(name));
        if (!flags.config.empty())
            params.load_file(flags.config);
        for (const auto &o : flags.overrides)
            params.apply(o);
        const std::pair<const char *, const std::string *> named[] = {
            {"seed", &flags.seed}, {"trials", &flags.trials}, {"m", &flags.m},         {"k", &flags.k},
            {"pa", &flags.pa},     {"sigma2", &flags.sigma2}, {"gamma", &flags.gamma}, {"corr", &flags.corr},
        };
        for (const auto &[key, value] : named)
            if (!value->empty())
                params.set(key, *value);

        if (flags.print_config)
        {
            for (const auto &[key, value] : params.entries())
                std::cout << key << " = " << value << '\n';
            return 0;
        }

        RunOptions options;
        options.workers = flags.workers;
        const CsvTable table = run_command(params, options);

        std::ostringstream csv;
        write_csv(csv, table);
        if (flags.out.empty())
            std::cout << csv.str();
        else
        {
            std::ofstream file(flags.out, std::ios::binary);
            if (!file || !(file << csv.str()))
                throw ConfigError("cannot write '" + flags.out + "'");
        }
        return 0;
    }
    catch (const ConfigError &e)
    {
        std::cerr << "srmimo " << name << ": configuration error: " << e.what() << '\n';
        return 2;
    }
    catch (const Error &e)
    {
        std::cerr << "srmimo " << name << ": numerical failure in " << e.operation() << ": " << e.what() << '\n';
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "srmimo " << name << ": unexpected failure: " << e.what() << '\n';
        return 3;
    }
}

} // namespace srmimo::cli
