#include "srmimo/montecarlo.hpp"
#include "srmimo/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace srmimo::mc
{

namespace
{

constexpr double z95 = 1.959963984540054;
constexpr int max_attempts_per_trial = 64;

struct TrialResult
{
    double signal = 0.0;
    double impairment = 0.0;
    double power = 0.0;
    double rho = 0.0;
    double power_at_rho_bar = 0.0;
    bool clipped = false;
    std::size_t rejected = 0;
};

struct PointSetup
{
    SystemConfig cfg;
    const CorrelatedChannel *channel = nullptr;
    std::uint64_t stream = 0;
    double delta_bar = 0.0; // K rho-bar; 0 when not clipping
};

TrialResult run_trial(const PointSetup &point, const ExperimentPlan &plan, std::size_t trial)
{
    const SystemConfig &cfg = point.cfg;
    TrialResult r;
    for (int attempt = 0;; ++attempt)
    {
        if (attempt >= max_attempts_per_trial)
            throw Error(Errc::TooManyRejections, "run_plan",
                        "trial " + std::to_string(trial) + " stayed ill-conditioned after " +
                            std::to_string(max_attempts_per_trial) + " draws");
        const SeedTag tag{plan.master_seed, point.stream, trial, std::uint64_t(attempt)};
        const ChannelRealization real = point.channel->sample(cfg.K, tag);

        std::optional<GramEigen> gram;
        try
        {
            gram.emplace(real.H);
        }
        catch (const Error &e)
        {
            if (e.code() != Errc::SingularChannel)
                throw;
            ++r.rejected;
            continue;
        }

        if (plan.precoder == PrecoderKind::Mmse)
        {
            const arma::cx_vec x = mmse_precode(real.H, *gram, real.u, cfg.sigma2, cfg.Pa);
            const SinrTerms t = receive_scaled_sinr_terms(real.H, x, real.u, cfg.sigma2);
            r.signal = t.signal;
            r.impairment = t.impairment;
            r.power = arma::cdot(x, x).real();
            return r;
        }

        const PrecodeResult res = constrained_precode(real.H, *gram, real.u, cfg.gamma, cfg.Pa);
        const SinrTerms t = sinr_terms(real.H, res.x, real.u, cfg.gamma, cfg.sigma2);
        r.signal = t.signal;
        r.impairment = t.impairment;
        r.power = res.power;
        r.clipped = res.kind == PrecodeCase::Clipped;
        r.rho = res.delta / double(cfg.K);
        if (point.delta_bar > 0.0)
            r.power_at_rho_bar = rzf_power(*gram, real.u, cfg.gamma, point.delta_bar);
        return r;
    }
}

// Evaluates fn(i) for every trial index on up to `workers` threads. Results
// land in slot i, so the output does not depend on scheduling; the failure
// with the lowest trial index is rethrown.
template <class T, class F>
std::vector<T> parallel_trials(std::size_t trials, unsigned workers, F &&fn)
{
    std::vector<T> results(trials);
    workers = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
    workers = unsigned(std::min<std::size_t>(workers, trials));

    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::size_t failed_trial = std::numeric_limits<std::size_t>::max();
    std::exception_ptr failure;

    auto work = [&] {
        for (std::size_t i = next++; i < trials; i = next++)
        {
            try
            {
                results[i] = fn(i);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (i < failed_trial)
                {
                    failed_trial = i;
                    failure = std::current_exception();
                }
            }
        }
    };

    if (workers <= 1)
        work();
    else
    {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto &t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return results;
}

ExperimentRecord aggregate(const std::vector<TrialResult> &results, const SystemConfig &cfg)
{
    const double n = double(results.size());
    ExperimentRecord rec;
    rec.gamma = cfg.gamma;
    rec.trials_used = results.size();

    double sum_signal = 0.0, sum_impairment = 0.0, sum_ratio = 0.0, sum_power = 0.0;
    double sum_rho = 0.0, sum_fixed = 0.0, clipped = 0.0;
    for (const TrialResult &r : results)
    {
        sum_signal += r.signal;
        sum_impairment += r.impairment;
        sum_ratio += r.impairment > 0.0 ? r.signal / r.impairment : 0.0;
        sum_power += r.power;
        sum_rho += r.rho;
        sum_fixed += r.power_at_rho_bar;
        clipped += r.clipped ? 1.0 : 0.0;
        rec.rejected_trials += r.rejected;
    }
    const double ratio = sum_signal / sum_impairment;
    rec.mean_sinr_db = to_db(ratio);
    rec.avg_sinr_db = to_db(sum_ratio / n);
    rec.mean_power = sum_power / n;
    rec.clip_fraction = clipped / n;
    rec.mean_rho = sum_rho / n;
    rec.mean_power_at_rho_bar = sum_fixed / n;

    std::vector<double> powers(results.size());
    std::transform(results.begin(), results.end(), powers.begin(), [](const TrialResult &r) { return r.power; });
    rec.papr_db = papr_estimate(powers, cfg.Pa);

    // Delta method for the ratio of means: var ~ var(S_i - ratio D_i) / (n Dbar^2).
    if (results.size() > 1)
    {
        const double mean_impairment = sum_impairment / n;
        double ss = 0.0, ss_fixed = 0.0;
        for (const TrialResult &r : results)
        {
            const double e = r.signal - ratio * r.impairment;
            ss += e * e;
            const double d = r.power_at_rho_bar - rec.mean_power_at_rho_bar;
            ss_fixed += d * d;
        }
        const double se = std::sqrt(ss / (n - 1.0) / n) / mean_impairment;
        const double lo = ratio - z95 * se;
        const double hi = ratio + z95 * se;
        rec.sinr_ci_halfwidth_db =
            lo > 0.0 ? 0.5 * (to_db(hi) - to_db(lo)) : std::numeric_limits<double>::infinity();
        rec.power_at_rho_bar_ci = z95 * std::sqrt(ss_fixed / (n - 1.0) / n);
    }
    else
    {
        rec.sinr_ci_halfwidth_db = std::numeric_limits<double>::infinity();
        rec.power_at_rho_bar_ci = std::numeric_limits<double>::infinity();
    }
    return rec;
}

bool strictly_ordered(const std::vector<double> &v)
{
    auto increasing = std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    auto decreasing = std::adjacent_find(v.begin(), v.end(), std::less_equal<>()) == v.end();
    return increasing || decreasing;
}

} // namespace

std::string_view to_string(SweepParam p)
{
    switch (p)
    {
    case SweepParam::M:
        return "M";
    case SweepParam::Gamma:
        return "gamma";
    case SweepParam::CorrCoeff:
        return "a";
    case SweepParam::Sigma2:
        return "sigma2";
    }
    return "?";
}

std::string_view to_string(PrecoderKind p)
{
    return p == PrecoderKind::Mmse ? "mmse" : "proposed";
}

SystemConfig config_for(const ExperimentPlan &plan, std::size_t index)
{
    if (index >= plan.values.size())
        throw Error(Errc::InvalidArgument, "config_for", "sweep index out of range");
    const double v = plan.values[index];
    SystemConfig cfg = plan.base;
    switch (plan.sweep)
    {
    case SweepParam::M:
        if (!(v >= 1.0) || v != std::floor(v))
            throw Error(Errc::InvalidArgument, "config_for", "swept M must be a positive integer");
        cfg.M = arma::uword(v);
        cfg.corr = cfg.corr.resized(cfg.M);
        break;
    case SweepParam::Gamma:
        cfg.gamma = v;
        break;
    case SweepParam::CorrCoeff:
        cfg.corr = CorrelationSpec::exponential(cfg.M, {v, 0.0});
        break;
    case SweepParam::Sigma2:
        cfg.sigma2 = v;
        break;
    }
    return cfg;
}

void ExperimentPlan::validate() const
{
    if (values.empty())
        throw Error(Errc::EmptyInput, "run_plan", "empty sweep");
    if (trials < 1)
        throw Error(Errc::InvalidArgument, "run_plan", "trials must be at least 1");
    if (!strictly_ordered(values))
        throw Error(Errc::InvalidArgument, "run_plan", "sweep values must be strictly ordered");
    for (std::size_t i = 0; i < values.size(); ++i)
        config_for(*this, i).validate();
}

std::vector<ExperimentRecord> run_plan(const ExperimentPlan &plan)
{
    plan.validate();

    std::vector<ExperimentRecord> out;
    out.reserve(plan.values.size());
    for (std::size_t index = 0; index < plan.values.size(); ++index)
    {
        PointSetup point;
        point.cfg = config_for(plan, index);
        point.stream = index;
        const CorrelatedChannel channel(point.cfg.corr);
        point.channel = &channel;

        std::optional<rmt::DeterministicEquivalents> de;
        if (plan.optimal_gamma || plan.emit_de)
        {
            const auto spectrum = rmt::Spectrum(channel.eigenvalues(), point.cfg.K);
            if (plan.optimal_gamma)
                point.cfg.gamma = rmt::optimal_gamma(spectrum, point.cfg.Pa, point.cfg.sigma2);
            if (plan.emit_de && plan.precoder == PrecoderKind::Constrained)
            {
                de = rmt::compute_equivalents(spectrum, point.cfg.gamma, point.cfg.Pa, point.cfg.sigma2);
                if (de->clipping)
                    point.delta_bar = double(point.cfg.K) * de->rho_bar;
            }
        }

        const std::vector<TrialResult> results = parallel_trials<TrialResult>(
            plan.trials, plan.workers, [&](std::size_t i) { return run_trial(point, plan, i); });
        ExperimentRecord rec = aggregate(results, point.cfg);
        if (!(rec.rejected_trials * 100 <= plan.trials))
            throw Error(Errc::TooManyRejections, "run_plan",
                        std::to_string(rec.rejected_trials) + " ill-conditioned draws in " +
                            std::to_string(plan.trials) + " trials exceed 1%");
        if (point.delta_bar == 0.0)
        {
            rec.mean_power_at_rho_bar = std::numeric_limits<double>::quiet_NaN();
            rec.power_at_rho_bar_ci = std::numeric_limits<double>::quiet_NaN();
        }
        rec.swept_value = plan.values[index];
        rec.de = de;
        rec.master_seed = plan.master_seed;
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<double> sample_normalized_zf_power(const SystemConfig &cfg, std::size_t trials, std::uint64_t master_seed,
                                               unsigned workers)
{
    cfg.validate();
    if (trials < 1)
        throw Error(Errc::InvalidArgument, "sample_normalized_zf_power", "trials must be at least 1");
    const CorrelatedChannel channel(cfg.corr);

    const std::vector<double> z = parallel_trials<double>(trials, workers, [&](std::size_t i) {
        for (int attempt = 0; attempt < max_attempts_per_trial; ++attempt)
        {
            const ChannelRealization real = channel.sample(cfg.K, {master_seed, 0, i, std::uint64_t(attempt)});
            try
            {
                const GramEigen gram(real.H);
                const arma::cx_vec c = gram.eigenvectors().t() * real.u;
                return arma::accu(arma::square(arma::abs(c)) / gram.eigenvalues());
            }
            catch (const Error &e)
            {
                if (e.code() != Errc::SingularChannel)
                    throw;
            }
        }
        throw Error(Errc::TooManyRejections, "sample_normalized_zf_power",
                    "trial " + std::to_string(i) + " stayed ill-conditioned");
    });
    return z;
}

ConvergenceTable validate_de(const ValidationPlan &plan)
{
    if (plan.M.empty())
        throw Error(Errc::EmptyInput, "validate_de", "empty sweep");
    if (!(plan.load > 0.0 && plan.load < 1.0))
        throw Error(Errc::InvalidArgument, "validate_de", "load must lie in (0, 1)");

    ConvergenceTable table;
    for (std::size_t i = 0; i < plan.M.size(); ++i)
    {
        if (i > 0 && plan.M[i] <= plan.M[i - 1])
            throw Error(Errc::InvalidArgument, "validate_de", "M values must be strictly increasing");

        ExperimentPlan ep;
        ep.base = plan.base;
        ep.base.M = plan.M[i];
        ep.base.K = arma::uword(std::lround(plan.load * double(plan.M[i])));
        ep.base.corr = plan.base.corr.resized(plan.M[i]);
        ep.sweep = SweepParam::M;
        ep.values = {double(plan.M[i])};
        ep.trials = plan.trials;
        // One stream per M so that rows are independent of which other M are listed.
        ep.master_seed = plan.master_seed ^ (std::uint64_t(plan.M[i]) << 32);
        ep.emit_de = true;
        ep.optimal_gamma = plan.optimal_gamma;
        ep.workers = plan.workers;

        const ExperimentRecord rec = run_plan(ep).front();
        const rmt::DeterministicEquivalents &de = *rec.de;

        ConvergenceRow row;
        row.M = ep.base.M;
        row.K = ep.base.K;
        row.gamma = rec.gamma;
        row.sinr_mc_db = rec.mean_sinr_db;
        row.sinr_de_db = to_db(de.sinr_bar);
        row.sinr_gap_db = std::abs(row.sinr_mc_db - row.sinr_de_db);
        row.sinr_ci_db = rec.sinr_ci_halfwidth_db;
        row.clip_fraction = rec.clip_fraction;
        if (de.clipping)
        {
            row.power_gap = std::abs(rec.mean_power_at_rho_bar - de.p_bar) / ep.base.Pa;
            row.power_ci = rec.power_at_rho_bar_ci / ep.base.Pa;
            row.rho_gap = std::abs(rec.mean_rho - de.rho_bar) / de.rho_bar;
        }
        else
        {
            // ZF regime: the transmitted power is the ZF power itself
            row.power_gap = std::abs(rec.mean_power - de.p_bar) / ep.base.Pa;
            row.power_ci = std::numeric_limits<double>::quiet_NaN();
            row.rho_gap = std::numeric_limits<double>::quiet_NaN();
        }

        if (!table.rows.empty())
        {
            const ConvergenceRow &prev = table.rows.back();
            row.sinr_monotone = row.sinr_gap_db <= prev.sinr_gap_db + row.sinr_ci_db;
            row.power_monotone = !(row.power_gap > prev.power_gap + row.power_ci);
        }
        table.sinr_monotone = table.sinr_monotone && row.sinr_monotone;
        table.power_monotone = table.power_monotone && row.power_monotone;
        table.rows.push_back(row);
    }
    return table;
}

} // namespace srmimo::mc
