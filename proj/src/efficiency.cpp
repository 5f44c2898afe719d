#include "srmimo/efficiency.hpp"
#include "srmimo/error.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace srmimo::efficiency
{

namespace
{

constexpr double residual_tol = 1e-12;

double trapezoid(const arma::vec &x, const arma::vec &f)
{
    double sum = 0.0;
    for (arma::uword i = 1; i < x.n_elem; ++i)
        sum += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    return sum;
}

arma::vec log_grid(double lo, double hi, arma::uword n)
{
    return arma::exp(arma::linspace<arma::vec>(std::log(lo), std::log(hi), n));
}

void check_spectrum(const arma::vec &R, arma::uword K, const char *op)
{
    if (K == 0)
        throw Error(Errc::BadDimensions, op, "K must be positive");
    if (R.is_empty() || R.min() < 0.0)
        throw Error(Errc::InvalidArgument, op, "eigenvalues must be nonnegative");
    if (double(arma::accu(R > 0.0)) <= double(K))
        throw Error(Errc::NoRoot, op,
                    "need more than K = " + std::to_string(K) + " nonzero eigenvalues for a positive root");
}

// Bisection on a strictly decreasing function of a positive variable, in the
// log domain, starting from the bracket [start/2, start].
template <class F>
double decreasing_root(F &&excess, double start, const char *op)
{
    double hi = start;
    for (int i = 0; excess(hi) > 0.0; ++i)
    {
        if (i > 2000)
            throw Error(Errc::NoConvergence, op, "cannot bracket the root from above");
        hi *= 2.0;
    }
    double lo = 0.5 * hi;
    for (int i = 0; excess(lo) < 0.0; ++i)
    {
        if (i > 2000)
            throw Error(Errc::NoConvergence, op, "cannot bracket the root from below");
        lo *= 0.5;
    }
    for (int i = 0; i < 400; ++i)
    {
        const double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi))
            break;
        const double e = excess(mid);
        if (e == 0.0)
            return mid;
        (e > 0.0 ? lo : hi) = mid;
    }
    const double root = std::abs(excess(lo)) < std::abs(excess(hi)) ? lo : hi;
    if (!(std::abs(excess(root)) <= residual_tol))
        throw Error(Errc::NoConvergence, op, "residual " + std::to_string(excess(root)) + " above 1e-12");
    return root;
}

// Root w > 0 of the saddle equation written as s0 = -(1/R_max + 1/y) + w:
// 1 = (1/(K y)) sum_i R_i / ((1 - R_i/R_max) + R_i w). The denominators equal
// (y (1 + R_i s0) + R_i) / y without cancellation.
double solve_w(const arma::vec &R, double r_max, arma::uword K, double y)
{
    const arma::vec base = 1.0 - R / r_max;
    auto excess = [&](double w) { return arma::accu(R / (base + R * w)) / (double(K) * y) - 1.0; };
    return decreasing_root(excess, 1.0, "solve_s0");
}

double log_f_X(double x, arma::uword K)
{
    const double k = double(K);
    return std::log(k) + (k - 1.0) * std::log(k * x) - k * x - std::lgamma(k);
}

} // namespace

double solve_t(const arma::vec &R_eigs, arma::uword K, double s)
{
    check_spectrum(R_eigs, K, "solve_t");
    if (!(1.0 + R_eigs.max() * s > 0.0) || !std::isfinite(s))
        throw Error(Errc::InvalidArgument, "solve_t", "need 1 + R_max s > 0");
    const arma::vec scale = 1.0 + R_eigs * s;
    auto excess = [&](double t) { return arma::accu(R_eigs / (t * scale + R_eigs)) / double(K) - 1.0; };
    return decreasing_root(excess, 1.0, "solve_t");
}

double solve_s0(const arma::vec &R_eigs, arma::uword K, double y)
{
    check_spectrum(R_eigs, K, "solve_s0");
    if (!(y > 0.0) || !std::isfinite(y))
        throw Error(Errc::OutOfSupport, "solve_s0", "y must be positive");
    const double r_max = R_eigs.max();
    return -(1.0 / r_max + 1.0 / y) + solve_w(R_eigs, r_max, K, y);
}

double i_erg(const arma::vec &R_eigs, arma::uword K, double s)
{
    const double t = solve_t(R_eigs, K, s);
    return arma::accu(arma::log1p(R_eigs * (s + 1.0 / t))) + double(K) * (std::log(t) - 1.0);
}

double f_X(double x, arma::uword K)
{
    if (K == 0)
        throw Error(Errc::BadDimensions, "f_X", "K must be positive");
    return x > 0.0 ? std::exp(log_f_X(x, K)) : 0.0;
}

double f_Z_iid(double z, arma::uword M, arma::uword K)
{
    if (K == 0 || K >= M)
        throw Error(Errc::BadDimensions, "f_Z_iid", "need 0 < K < M");
    if (!(z > 0.0))
        return 0.0;
    const double a = double(K);
    const double b = double(M - K + 1);
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return std::exp((a - 1.0) * std::log(z) - (a + b) * std::log1p(z) - log_beta);
}

// ---------------------------------------------------------------------------

double DensityGrid::mass() const
{
    return trapezoid(x, f);
}

double DensityGrid::mean() const
{
    return trapezoid(x, x % f) / mass();
}

double DensityGrid::value(double at) const
{
    if (x.is_empty() || at < x.front() || at > x.back())
        return 0.0;
    auto it = std::upper_bound(x.begin(), x.end(), at);
    if (it == x.end())
        return f.back();
    const arma::uword k = arma::uword(it - x.begin());
    const double w = (at - x[k - 1]) / (x[k] - x[k - 1]);
    return (1.0 - w) * f[k - 1] + w * f[k];
}

double DensityGrid::clipped_mean_ratio(double threshold) const
{
    if (!(threshold > 0.0))
        throw Error(Errc::InvalidArgument, "clipped_mean_ratio", "threshold must be positive");
    const double total = mass();
    if (!(total > 0.0))
        throw Error(Errc::EmptyInput, "clipped_mean_ratio", "density has no mass");
    if (threshold <= x.front())
        return 1.0;
    if (threshold >= x.back())
        return mean() / threshold;

    // min(z / threshold, 1) f(z), with the kink inserted as a grid node
    const arma::uword k = arma::uword(std::upper_bound(x.begin(), x.end(), threshold) - x.begin());
    arma::vec xs(x.n_elem + 1), hs(x.n_elem + 1);
    for (arma::uword i = 0; i < k; ++i)
    {
        xs[i] = x[i];
        hs[i] = x[i] / threshold * f[i];
    }
    xs[k] = threshold;
    hs[k] = value(threshold);
    for (arma::uword i = k; i < x.n_elem; ++i)
    {
        xs[i + 1] = x[i];
        hs[i + 1] = f[i];
    }
    return trapezoid(xs, hs) / total;
}

// ---------------------------------------------------------------------------

EfficiencyComputation::EfficiencyComputation(arma::vec R_eigs, arma::uword K, EfficiencyOptions options)
    : R_(std::move(R_eigs)), K_(K), opts_(options)
{
    if (!R_.is_empty() && R_.min() < 0.0 && R_.min() > -1e-10)
        R_ = arma::clamp(R_, 0.0, arma::datum::inf);
    check_spectrum(R_, K_, "EfficiencyComputation");
    if (opts_.y_points < 16 || opts_.z_points < 16)
        throw Error(Errc::InvalidArgument, "EfficiencyComputation", "grids need at least 16 points");
    if (!(opts_.tail > 0.0 && opts_.tail < 1e-3))
        throw Error(Errc::InvalidArgument, "EfficiencyComputation", "tail must lie in (0, 1e-3)");

    r_max_ = R_.max();
    t0_ = solve_t(R_, K_, 0.0);
    i_erg0_ = i_erg(R_, K_, 0.0);
    M_r2_ = arma::accu(arma::square(R_ / (1.0 + R_ / t0_))) / double(K_);
    build_y_grid();
    build_z_grid();
}

SaddleTerms EfficiencyComputation::saddle(double y) const
{
    if (!(y > 0.0) || !std::isfinite(y))
        throw Error(Errc::OutOfSupport, "f_Y", "y must be positive");
    const double k = double(K_);
    const double w = solve_w(R_, r_max_, K_, y);

    SaddleTerms st;
    st.s0 = -(1.0 / r_max_ + 1.0 / y) + w;
    const arma::vec A = (1.0 - R_ / r_max_) + R_ * w; // I + R (s0 + 1/y)
    const arma::vec B = 1.0 + R_ / t0_;               // I + R / t(0)
    st.i_erg = arma::accu(arma::log(A)) + k * (std::log(y) - 1.0);

    st.M_t1 = 1.0 / (y * y);
    st.M_t2 = 1.0 / (t0_ * t0_);
    st.M_t3 = 1.0 / (t0_ * y);
    st.M_r1 = arma::accu(arma::square(R_ / A)) / k;
    st.M_r2 = M_r2_;
    st.M_r3 = arma::accu(arma::square(R_) / (A % B)) / k;

    const double d1 = 1.0 - st.M_t1 * st.M_r1;
    st.v1 = -std::log(std::abs(d1)) - std::log(std::abs(1.0 - st.M_t2 * st.M_r2)) + 2.0 -
            std::log(std::abs(1.0 - st.M_t3 * st.M_r3));
    st.v2 = opts_.verbatim_v2 ? -std::log(std::abs(st.M_r1 / d1)) : -std::log(std::abs(st.M_t1 * st.M_r1 / d1));

    // K s0 y = K (w y - y / R_max - 1)
    const double s0_y = w * y - y / r_max_ - 1.0;
    st.log_density =
        0.5 * std::log(k / (2.0 * std::numbers::pi)) + k * s0_y - st.i_erg + i_erg0_ + 0.5 * (st.v1 + st.v2);
    return st;
}

double EfficiencyComputation::f_Y_raw(double y) const
{
    return std::exp(saddle(y).log_density);
}

void EfficiencyComputation::build_y_grid()
{
    auto log_density = [&](double y) {
        try
        {
            const double v = saddle(y).log_density;
            return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
        }
        catch (const Error &)
        {
            return -std::numeric_limits<double>::infinity();
        }
    };

    // Locate the support on a coarse log grid around t(0), then refine.
    const arma::vec coarse = log_grid(t0_ * 1e-4, t0_ * 1e4, 801);
    arma::vec coarse_log(coarse.n_elem);
    for (arma::uword i = 0; i < coarse.n_elem; ++i)
        coarse_log[i] = log_density(coarse[i]);
    const double peak = coarse_log.max();
    if (!std::isfinite(peak))
        throw Error(Errc::NoConvergence, "EfficiencyComputation", "saddle-point density is nowhere finite");
    const arma::uvec inside = arma::find(coarse_log >= peak + std::log(opts_.tail));
    const arma::uword first = inside.front() > 0 ? inside.front() - 1 : 0;
    const arma::uword last = std::min<arma::uword>(inside.back() + 1, coarse.n_elem - 1);

    y_density_.x = log_grid(coarse[first], coarse[last], opts_.y_points);
    log_f_Y_.set_size(opts_.y_points);
    for (arma::uword i = 0; i < opts_.y_points; ++i)
        log_f_Y_[i] = log_density(y_density_.x[i]);
    y_density_.f = arma::exp(log_f_Y_);

    raw_mass_ = y_density_.mass();
    if (!(raw_mass_ > 0.0) || !std::isfinite(raw_mass_))
        throw Error(Errc::NoConvergence, "EfficiencyComputation", "f_Y has no finite mass");
    y_density_.f /= raw_mass_;
    log_f_Y_ -= std::log(raw_mass_);
}

double EfficiencyComputation::f_Z(double z) const
{
    if (!(z > 0.0))
        return 0.0;
    const arma::vec &y = y_density_.x;
    arma::vec integrand(y.n_elem);
    for (arma::uword i = 0; i < y.n_elem; ++i)
        integrand[i] = std::exp(std::log(y[i]) + log_f_X(z * y[i], K_) + log_f_Y_[i]);
    return trapezoid(y, integrand);
}

void EfficiencyComputation::build_z_grid()
{
    const boost::math::gamma_distribution<double> x_law(double(K_), 1.0 / double(K_));
    const double x_lo = boost::math::quantile(x_law, opts_.tail);
    const double x_hi = boost::math::quantile(boost::math::complement(x_law, opts_.tail));

    z_density_.x = log_grid(x_lo / y_density_.x.back(), x_hi / y_density_.x.front(), opts_.z_points);
    z_density_.f.set_size(opts_.z_points);
    for (arma::uword i = 0; i < opts_.z_points; ++i)
        z_density_.f[i] = f_Z(z_density_.x[i]);
}

double EfficiencyComputation::eta_t(double gamma, double Pa, double eta_a) const
{
    if (!(gamma > 0.0) || !(Pa > 0.0))
        throw Error(Errc::InvalidArgument, "eta_t", "gamma and Pa must be positive");
    if (!(eta_a > 0.0 && eta_a <= 1.0))
        throw Error(Errc::InvalidArgument, "eta_t", "eta_a must lie in (0, 1]");
    return eta_a * z_density_.clipped_mean_ratio(Pa / gamma);
}

// ---------------------------------------------------------------------------

DensityGrid exact_iid_z_density(arma::uword M, arma::uword K, arma::uword points, double tail)
{
    if (K == 0 || K >= M)
        throw Error(Errc::BadDimensions, "exact_iid_z_density", "need 0 < K < M");
    const double a = double(K);
    const double b = double(M - K + 1);
    // Z = B / (1 - B) with B ~ Beta(K, M - K + 1)
    const double q_lo = boost::math::ibeta_inv(a, b, tail);
    const double q_hi = boost::math::ibetac_inv(a, b, tail);

    DensityGrid out;
    out.x = log_grid(q_lo / (1.0 - q_lo), q_hi / (1.0 - q_hi), points);
    out.f.set_size(points);
    for (arma::uword i = 0; i < points; ++i)
        out.f[i] = f_Z_iid(out.x[i], M, K);
    return out;
}

double eta_t_iid(double gamma, double Pa, double eta_a, arma::uword M, arma::uword K)
{
    if (K == 0 || K >= M)
        throw Error(Errc::BadDimensions, "eta_t_iid", "need 0 < K < M");
    if (!(gamma > 0.0) || !(Pa > 0.0))
        throw Error(Errc::InvalidArgument, "eta_t_iid", "gamma and Pa must be positive");
    if (!(eta_a > 0.0 && eta_a <= 1.0))
        throw Error(Errc::InvalidArgument, "eta_t_iid", "eta_a must lie in (0, 1]");

    const double a = double(K);
    const double b = double(M - K + 1);
    const double threshold = Pa / gamma;
    const double p = threshold / (1.0 + threshold);
    // E[Z; Z <= th] = a/(b-1) P(Z' <= th) with Z' ~ BetaPrime(a + 1, b - 1)
    const double above = boost::math::ibetac(a, b, p);
    const double partial_mean = a / (b - 1.0) * boost::math::ibeta(a + 1.0, b - 1.0, p);
    return eta_a * (above + partial_mean / threshold);
}

double eta_t(double gamma, double Pa, double eta_a, const arma::vec &R_eigs, arma::uword K,
             const EfficiencyOptions &options)
{
    if (!R_eigs.is_empty() && arma::abs(R_eigs - 1.0).max() <= 1e-12)
        return eta_t_iid(gamma, Pa, eta_a, R_eigs.n_elem, K);
    return EfficiencyComputation(R_eigs, K, options).eta_t(gamma, Pa, eta_a);
}

} // namespace srmimo::efficiency
