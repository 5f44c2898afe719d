#include "srmimo/rmt.hpp"
#include "srmimo/error.hpp"

#include <cmath>
#include <limits>

namespace srmimo::rmt
{

Spectrum::Spectrum(arma::vec eigenvalues, arma::uword K)
    : eigs_(std::move(eigenvalues)), K_(K)
{
    if (K_ == 0 || eigs_.n_elem == 0)
        throw Error(Errc::BadDimensions, "Spectrum", "need K > 0 and M > 0");
    if (eigs_.min() < -1e-10)
        throw Error(Errc::NotPsd, "Spectrum", "correlation eigenvalues must be nonnegative");
    eigs_ = arma::clamp(eigs_, 0.0, arma::datum::inf);
    if (!(arma::accu(eigs_) > 0.0))
        throw Error(Errc::InvalidArgument, "Spectrum", "correlation matrix is zero");
}

Spectrum Spectrum::from_correlation(const arma::cx_mat &R, arma::uword K)
{
    arma::cx_mat H = 0.5 * (R + R.t());
    return Spectrum(arma::eig_sym(H), K);
}

Spectrum Spectrum::identity(arma::uword M, arma::uword K)
{
    return Spectrum(arma::ones<arma::vec>(M), K);
}

namespace
{

// (1/K) sum l_i / (1 + t l_i / (1 + t alpha))
double alpha_map(const Spectrum &s, double t, double alpha)
{
    const double a = 1.0 + t * alpha;
    return arma::accu(s.eigenvalues() * a / (a + t * s.eigenvalues())) / double(s.users());
}

void require_positive_t(double t, const char *op)
{
    if (!(t > 0.0) || !std::isfinite(t))
        throw Error(Errc::InvalidArgument, op, "t must be positive and finite");
}

// Root of 1 = (1/K) sum l_i / (a + l_i); the t -> infinity limit of alpha(t).
double zf_alpha(const Spectrum &s)
{
    const arma::vec &l = s.eigenvalues();
    const double K = double(s.users());
    auto excess = [&](double a) { return arma::accu(l / (a + l)) / K - 1.0; };

    if (double(arma::accu(l > 0.0)) <= K)
        return 0.0; // rank(R) <= K: ZF power diverges
    double lo = 0.0;
    double hi = arma::max(l);
    while (excess(hi) > 0.0)
        hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

AlphaSolution solve_alpha(const Spectrum &spectrum, double t, const FixedPointSettings &settings)
{
    require_positive_t(t, "solve_alpha");
    if (!(settings.tol > 0.0) || settings.max_iter < 1 || !(settings.damping > 0.0 && settings.damping <= 1.0))
        throw Error(Errc::InvalidArgument, "solve_alpha", "invalid fixed-point settings");

    double damping = settings.damping;
    double alpha = spectrum.normalized_trace();
    double previous = std::numeric_limits<double>::infinity();

    AlphaSolution out;
    for (int iter = 0; iter < settings.max_iter; ++iter)
    {
        const double mapped = alpha_map(spectrum, t, alpha);
        const double residual = std::abs(mapped - alpha) / alpha;
        out = {alpha, iter, residual};
        if (residual <= settings.tol)
            return out;
        if (residual > previous && damping > 1.0 / 1024.0)
            damping *= 0.5;
        previous = residual;
        alpha = (1.0 - damping) * alpha + damping * mapped;
    }
    throw Error(Errc::NoConvergence, "solve_alpha",
                "no convergence after " + std::to_string(settings.max_iter) + " iterations (residual " +
                    std::to_string(out.residual) + ")");
}

ResolventTraces resolvent_trace(const Spectrum &spectrum, double t, double alpha)
{
    const arma::vec &l = spectrum.eigenvalues();
    const double a = 1.0 + t * alpha;
    const arma::vec T = a / (a + t * l); // eigenvalues of T(t)
    const double K = double(spectrum.users());

    ResolventTraces out;
    out.trace_T = arma::accu(T) / K;
    out.trace_RT2 = arma::accu(l % arma::square(T)) / K;
    out.trace_RTRT = arma::accu(arma::square(l % T)) / K;
    return out;
}

double beta(const Spectrum &spectrum, double t, const FixedPointSettings &settings)
{
    const double alpha = solve_alpha(spectrum, t, settings).alpha;
    const ResolventTraces tr = resolvent_trace(spectrum, t, alpha);
    const double a = 1.0 + t * alpha;
    const double den = a * a - t * t * tr.trace_RTRT;
    if (!(den > 0.0))
        throw Error(Errc::DegenerateDenominator, "beta", "denominator " + std::to_string(den) + " is not positive");
    return tr.trace_RT2 / den;
}

double det_power(const Spectrum &spectrum, double rho, double gamma, const FixedPointSettings &settings)
{
    if (!(rho > 0.0))
        throw Error(Errc::InvalidArgument, "det_power", "rho must be positive");
    if (!(gamma >= 0.0))
        throw Error(Errc::InvalidArgument, "det_power", "gamma must be nonnegative");
    if (gamma == 0.0)
        return 0.0;
    return gamma / (rho * rho) * beta(spectrum, 1.0 / rho, settings);
}

double zf_power_limit(const Spectrum &spectrum, double gamma, const FixedPointSettings &)
{
    const double a = zf_alpha(spectrum);
    if (a == 0.0)
        return std::numeric_limits<double>::infinity();
    const arma::vec &l = spectrum.eigenvalues();
    const double K = double(spectrum.users());
    const double num = arma::accu(l / arma::square(a + l)) / K;
    const double den = 1.0 - arma::accu(arma::square(l / (a + l))) / K;
    return gamma * num / den;
}

namespace
{

// Within the 1e-10 power tolerance of the boundary the ZF regime already meets P-bar = Pa.
bool clips(const Spectrum &spectrum, double gamma, double Pa, const FixedPointSettings &settings)
{
    return zf_power_limit(spectrum, gamma, settings) > Pa * (1.0 + 1e-10);
}

} // namespace

double solve_rho_bar(const Spectrum &spectrum, double gamma, double Pa, const FixedPointSettings &settings)
{
    if (!(Pa > 0.0))
        throw Error(Errc::InvalidArgument, "solve_rho_bar", "Pa must be positive");
    if (!clips(spectrum, gamma, Pa, settings))
        throw Error(Errc::NoClipping, "solve_rho_bar", "the power constraint is asymptotically inactive");

    auto excess = [&](double log_rho) { return det_power(spectrum, std::exp(log_rho), gamma, settings) / Pa - 1.0; };

    // log10 rho in [-8, 8], widened if the root lies outside
    const double step = 4.0 * std::log(10.0);
    double lo = -8.0 * std::log(10.0);
    double hi = 8.0 * std::log(10.0);
    for (int i = 0; excess(lo) <= 0.0; ++i)
    {
        if (i > 20)
            throw Error(Errc::NoConvergence, "solve_rho_bar", "cannot bracket rho-bar from below");
        lo -= step;
    }
    for (int i = 0; excess(hi) >= 0.0; ++i)
    {
        if (i > 20)
            throw Error(Errc::NoConvergence, "solve_rho_bar", "cannot bracket rho-bar from above");
        hi += step;
    }

    double best = 0.5 * (lo + hi);
    double best_err = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 300 && hi - lo > 1e-15; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        const double e = excess(mid);
        if (std::abs(e) < best_err)
        {
            best = mid;
            best_err = std::abs(e);
        }
        if (e == 0.0)
            break;
        (e > 0.0 ? lo : hi) = mid;
    }
    if (best_err > 1e-10)
        throw Error(Errc::NoConvergence, "solve_rho_bar",
                    "relative power error " + std::to_string(best_err) + " above 1e-10");
    return std::exp(best);
}

double sinr_denominator(const Spectrum &spectrum, double rho, double Pa, double sigma2,
                        const FixedPointSettings &settings)
{
    if (!(rho > 0.0))
        throw Error(Errc::InvalidArgument, "det_sinr", "rho must be positive");
    const double t = 1.0 / rho;
    const double alpha = solve_alpha(spectrum, t, settings).alpha;
    const ResolventTraces tr = resolvent_trace(spectrum, t, alpha);
    const double a = 1.0 + t * alpha;
    const double den = a * a - t * t * tr.trace_RTRT;
    if (!(den > 0.0))
        throw Error(Errc::DegenerateDenominator, "beta", "denominator " + std::to_string(den) + " is not positive");
    const double b = tr.trace_RT2 / den;

    const double M = double(spectrum.antennas());
    const double K = double(spectrum.users());
    return sigma2 / (Pa * rho * rho) * b + (tr.trace_T - (M - K) / K - b / rho);
}

double det_sinr(const Spectrum &spectrum, double rho, double Pa, double sigma2, const FixedPointSettings &settings)
{
    const double den = sinr_denominator(spectrum, rho, Pa, sigma2, settings);
    if (!(den > 0.0))
        throw Error(Errc::DegenerateDenominator, "det_sinr", "SINR denominator " + std::to_string(den) + " is not positive");
    return 1.0 / den;
}

double optimal_gamma(const Spectrum &spectrum, double Pa, double sigma2, const FixedPointSettings &settings)
{
    if (!(Pa > 0.0) || !(sigma2 > 0.0))
        throw Error(Errc::InvalidArgument, "optimal_gamma", "Pa and sigma2 must be positive");
    return sigma2 * sigma2 / (Pa * beta(spectrum, Pa / sigma2, settings));
}

double det_sinr_for_gamma(const Spectrum &spectrum, double gamma, double Pa, double sigma2,
                          const FixedPointSettings &settings)
{
    if (!clips(spectrum, gamma, Pa, settings))
        return gamma / sigma2;
    return det_sinr(spectrum, solve_rho_bar(spectrum, gamma, Pa, settings), Pa, sigma2, settings);
}

DeterministicEquivalents compute_equivalents(const Spectrum &spectrum, double gamma, double Pa, double sigma2,
                                             const FixedPointSettings &settings)
{
    DeterministicEquivalents de;
    de.gamma_star = optimal_gamma(spectrum, Pa, sigma2, settings);

    if (!clips(spectrum, gamma, Pa, settings))
    {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        de.clipping = false;
        de.alpha = de.beta = de.trace_T = nan;
        de.rho_bar = 0.0;
        de.p_bar = zf_power_limit(spectrum, gamma, settings);
        de.sinr_bar = gamma / sigma2;
        return de;
    }

    de.rho_bar = solve_rho_bar(spectrum, gamma, Pa, settings);
    const double t = 1.0 / de.rho_bar;
    de.alpha = solve_alpha(spectrum, t, settings).alpha;
    de.trace_T = resolvent_trace(spectrum, t, de.alpha).trace_T;
    de.beta = beta(spectrum, t, settings);
    de.p_bar = det_power(spectrum, de.rho_bar, gamma, settings);
    de.sinr_bar = det_sinr(spectrum, de.rho_bar, Pa, sigma2, settings);
    return de;
}

} // namespace srmimo::rmt
