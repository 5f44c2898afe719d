#pragma once

#include "srmimo/precoder.hpp"
#include "srmimo/rmt.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace srmimo::mc
{

enum class SweepParam
{
    M,         // antenna count
    Gamma,     // design scalar
    CorrCoeff, // real exponential correlation coefficient a
    Sigma2,    // noise variance (linear)
};

enum class PrecoderKind
{
    Constrained, // instantaneous-power-constrained ZF/RZF
    Mmse,        // normalized MMSE baseline, receive-scaled SINR
};

std::string_view to_string(SweepParam p);
std::string_view to_string(PrecoderKind p);

struct ExperimentPlan
{
    SystemConfig base;
    SweepParam sweep = SweepParam::M;
    std::vector<double> values; // strictly ordered
    std::size_t trials = 1000;
    std::uint64_t master_seed = 1;
    bool emit_de = true;
    PrecoderKind precoder = PrecoderKind::Constrained;
    bool optimal_gamma = false; // replace gamma by the large-system gamma* of each swept config
    unsigned workers = 0;       // 0: std::thread::hardware_concurrency()

    // Throws Error(EmptyInput / InvalidArgument / BadDimensions ...).
    void validate() const;
};

// Scenario of sweep point `index` (gamma is the base or swept value, not gamma*).
SystemConfig config_for(const ExperimentPlan &plan, std::size_t index);

struct ExperimentRecord
{
    double swept_value = 0.0;
    double gamma = 0.0; // value actually used

    double mean_sinr_db = 0.0;        // 10 log10(sum signal / sum impairment)
    double sinr_ci_halfwidth_db = 0.0; // 95%, half the width of the dB interval
    double avg_sinr_db = 0.0;         // 10 log10 of the mean per-trial linear SINR (diagnostic)

    double mean_power = 0.0;
    double papr_db = 0.0;
    double clip_fraction = 0.0;
    double mean_rho = 0.0; // mean of delta / K over trials

    // Mean power of the RZF vector at the fixed multiplier K rho-bar and its
    // 95% half-width; NaN unless the large-system regime is clipping.
    double mean_power_at_rho_bar = 0.0;
    double power_at_rho_bar_ci = 0.0;

    std::optional<rmt::DeterministicEquivalents> de;
    std::size_t trials_used = 0;
    std::size_t rejected_trials = 0; // ill-conditioned draws replaced by a fresh attempt
    std::uint64_t master_seed = 0;
};

// Per trial: sample_realization -> precoder -> SINR terms. Trial seeds are
// (master_seed, sweep index, trial index, attempt); results do not depend on
// the worker count. Throws TooManyRejections if more than 1% of the trials
// needed a redraw.
std::vector<ExperimentRecord> run_plan(const ExperimentPlan &plan);

// Draws of the normalized ZF power Z = u^H (H^H H)^{-1} u (= b^H b / gamma),
// one per trial, with the same seeding as run_plan at stream 0.
std::vector<double> sample_normalized_zf_power(const SystemConfig &cfg, std::size_t trials, std::uint64_t master_seed,
                                               unsigned workers = 0);

struct ConvergenceRow
{
    arma::uword M = 0;
    arma::uword K = 0;
    double gamma = 0.0;
    double sinr_mc_db = 0.0;
    double sinr_de_db = 0.0;
    double sinr_gap_db = 0.0; // |mc - de|
    double sinr_ci_db = 0.0;
    double power_gap = 0.0; // |mean P(K rho-bar) - P-bar(rho-bar)| / Pa
    double power_ci = 0.0;  // 95% half-width, relative to Pa
    double rho_gap = 0.0;   // |mean delta/K - rho-bar| / rho-bar
    double clip_fraction = 0.0;
    bool sinr_monotone = true;  // gap <= previous gap + this row's CI
    bool power_monotone = true;
};

struct ConvergenceTable
{
    std::vector<ConvergenceRow> rows;
    bool sinr_monotone = true;
    bool power_monotone = true;
};

struct ValidationPlan
{
    SystemConfig base;          // M and K are overridden per row
    std::vector<arma::uword> M; // strictly increasing
    double load = 0.5;          // K = round(load * M)
    std::size_t trials = 500;
    std::uint64_t master_seed = 1;
    bool optimal_gamma = true;
    unsigned workers = 0;
};

ConvergenceTable validate_de(const ValidationPlan &plan);

} // namespace srmimo::mc
