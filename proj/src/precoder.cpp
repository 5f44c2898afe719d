#include "srmimo/precoder.hpp"
#include "srmimo/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace srmimo
{

void SystemConfig::validate() const
{
    if (K == 0 || M == 0 || K >= M)
        throw Error(Errc::BadDimensions, "SystemConfig", "need 0 < K < M");
    if (!(Pa > 0.0) || !std::isfinite(Pa))
        throw Error(Errc::InvalidArgument, "SystemConfig", "Pa must be positive");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw Error(Errc::InvalidArgument, "SystemConfig", "sigma2 must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw Error(Errc::InvalidArgument, "SystemConfig", "gamma must be nonnegative");
    if (!(eta_a > 0.0 && eta_a <= 1.0))
        throw Error(Errc::InvalidArgument, "SystemConfig", "eta_a must lie in (0, 1]");
    if (corr.M != M)
        throw Error(Errc::BadDimensions, "SystemConfig", "correlation size does not match M");
}

GramEigen::GramEigen(const arma::cx_mat &H, double max_condition)
{
    arma::cx_mat G = H.t() * H;
    G = 0.5 * (G + G.t());
    if (!arma::eig_sym(eigs_, V_, G))
        throw Error(Errc::SingularChannel, "GramEigen", "eigendecomposition of H^H H failed");
    if (!(eigs_.min() > 0.0) || eigs_.max() / eigs_.min() > max_condition)
        throw Error(Errc::SingularChannel, "GramEigen",
                    "H^H H is ill-conditioned (condition " + std::to_string(eigs_.max() / eigs_.min()) + ")");
}

arma::cx_vec GramEigen::apply_regularized(const arma::cx_mat &H, const arma::cx_vec &w, double shift) const
{
    arma::cx_vec c = V_.t() * w;
    c /= arma::conv_to<arma::cx_vec>::from(eigs_ + shift);
    return H * (V_ * c);
}

arma::cx_vec zf_precode(const arma::cx_mat &H, const arma::cx_vec &u, double gamma)
{
    if (H.n_cols != u.n_elem)
        throw Error(Errc::BadDimensions, "zf_precode", "H and u disagree on K");
    if (gamma == 0.0)
        return arma::zeros<arma::cx_vec>(H.n_rows);
    GramEigen gram(H);
    return gram.apply_regularized(H, std::sqrt(gamma) * u, 0.0);
}

double rzf_power(const GramEigen &gram, const arma::cx_vec &u, double gamma, double delta)
{
    const arma::vec &l = gram.eigenvalues();
    arma::vec w = arma::square(arma::abs(gram.eigenvectors().t() * u));
    return gamma * arma::accu(l % w / arma::square(l + delta));
}

PrecodeResult constrained_precode(const arma::cx_mat &H, const GramEigen &gram, const arma::cx_vec &u, double gamma,
                                  double Pa)
{
    if (H.n_cols != u.n_elem)
        throw Error(Errc::BadDimensions, "constrained_precode", "H and u disagree on K");
    if (!(Pa > 0.0))
        throw Error(Errc::InvalidArgument, "constrained_precode", "Pa must be positive");

    const arma::vec &l = gram.eigenvalues();
    const arma::vec w = gamma * arma::square(arma::abs(gram.eigenvectors().t() * u));
    auto power_at = [&](double delta) { return arma::accu(l % w / arma::square(l + delta)); };
    auto slope_at = [&](double delta) { return -2.0 * arma::accu(l % w / arma::pow(l + delta, 3)); };

    PrecodeResult out;
    const double zf_power = power_at(0.0);
    if (zf_power <= Pa)
    {
        out.x = gamma == 0.0 ? arma::cx_vec(arma::zeros<arma::cx_vec>(H.n_rows))
                             : gram.apply_regularized(H, std::sqrt(gamma) * u, 0.0);
        out.delta = 0.0;
        out.kind = PrecodeCase::ZF;
        out.power = arma::cdot(out.x, out.x).real();
        return out;
    }

    // Power is strictly decreasing in delta with limit 0; expand until it drops below Pa.
    double lo = 0.0;
    double hi = arma::accu(l) / double(l.n_elem);
    int doublings = 0;
    while (power_at(hi) >= Pa)
    {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 2000 || !std::isfinite(hi))
            throw Error(Errc::RootNotBracketed, "constrained_precode", "could not bracket the multiplier");
    }

    // Safeguarded Newton on P(delta) - Pa; falls back to bisection outside [lo, hi].
    double delta = 0.5 * (lo + hi);
    double residual = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 500; ++iter)
    {
        const double p = power_at(delta);
        if (!std::isfinite(p))
            throw Error(Errc::RootNotBracketed, "constrained_precode", "non-finite power evaluation");
        residual = (p - Pa) / Pa;
        if (std::abs(residual) <= 1e-15)
            break;
        if (p > Pa)
            lo = delta;
        else
            hi = delta;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            break;

        double next = delta - (p - Pa) / slope_at(delta);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        delta = next;
    }
    if (std::abs(residual) > 1e-10)
        throw Error(Errc::NoConvergence, "constrained_precode",
                    "multiplier search stalled at relative power error " + std::to_string(residual));

    out.x = gram.apply_regularized(H, std::sqrt(gamma) * u, delta);
    out.delta = delta;
    out.kind = PrecodeCase::Clipped;
    out.power = arma::cdot(out.x, out.x).real();
    return out;
}

PrecodeResult constrained_precode(const arma::cx_mat &H, const arma::cx_vec &u, double gamma, double Pa)
{
    GramEigen gram(H);
    return constrained_precode(H, gram, u, gamma, Pa);
}

PrecodeResult constrained_precode(const arma::cx_mat &H, const arma::cx_vec &u, const SystemConfig &cfg)
{
    return constrained_precode(H, u, cfg.gamma, cfg.Pa);
}

double stationarity_residual(const arma::cx_mat &H, const arma::cx_vec &u, double gamma, const PrecodeResult &result)
{
    arma::cx_vec r = H * (H.t() * result.x - std::sqrt(gamma) * u) + result.delta * result.x;
    return arma::norm(r);
}

double distortion(const arma::cx_mat &H, const arma::cx_vec &x, const arma::cx_vec &u, double gamma)
{
    arma::cx_vec e = H.t() * x - std::sqrt(gamma) * u;
    return arma::cdot(e, e).real();
}

arma::cx_vec mmse_precode(const arma::cx_mat &H, const GramEigen &gram, const arma::cx_vec &u, double sigma2,
                          double Pa)
{
    if (H.n_cols != u.n_elem)
        throw Error(Errc::BadDimensions, "mmse_precode", "H and u disagree on K");
    const double shift = double(H.n_cols) * sigma2 / Pa;
    arma::cx_vec x = gram.apply_regularized(H, u, shift);
    const double p = arma::cdot(x, x).real();
    if (!(p > 0.0))
        throw Error(Errc::SingularChannel, "mmse_precode", "zero precoder output");
    return x * std::sqrt(Pa / p);
}

arma::cx_vec mmse_precode(const arma::cx_mat &H, const arma::cx_vec &u, double sigma2, double Pa)
{
    GramEigen gram(H);
    return mmse_precode(H, gram, u, sigma2, Pa);
}

SinrTerms sinr_terms(const arma::cx_mat &H, const arma::cx_vec &x, const arma::cx_vec &u, double gamma,
                     double sigma2)
{
    SinrTerms t;
    t.signal = gamma * arma::cdot(u, u).real();
    t.impairment = distortion(H, x, u, gamma) + double(u.n_elem) * sigma2;
    return t;
}

double empirical_sinr(const arma::cx_mat &H, const arma::cx_vec &x, const arma::cx_vec &u, double gamma,
                      double sigma2)
{
    return sinr_terms(H, x, u, gamma, sigma2).ratio();
}

SinrTerms receive_scaled_sinr_terms(const arma::cx_mat &H, const arma::cx_vec &x, const arma::cx_vec &u,
                                    double sigma2)
{
    const arma::cx_vec hx = H.t() * x;
    const double a = arma::cdot(hx, hx).real() + double(u.n_elem) * sigma2;
    const double b = arma::cdot(u, hx).real();
    const double c = arma::cdot(u, u).real();

    SinrTerms t;
    if (!(b > 0.0))
    {
        t.signal = 0.0;
        t.impairment = a;
        return t;
    }
    const double s = a / b; // optimal sqrt(gamma)
    const arma::cx_vec e = hx - s * u;
    t.signal = s * s * c;
    t.impairment = arma::cdot(e, e).real() + double(u.n_elem) * sigma2;
    return t;
}

double papr_estimate(std::span<const double> powers, double Pa)
{
    if (powers.empty())
        throw Error(Errc::EmptyInput, "papr_estimate", "no powers supplied");
    for (double p : powers)
        if (!(p >= 0.0 && p <= Pa * (1.0 + 1e-9)))
            throw Error(Errc::InvalidArgument, "papr_estimate", "power " + std::to_string(p) + " outside [0, Pa]");
    const double mean = std::accumulate(powers.begin(), powers.end(), 0.0) / double(powers.size());
    if (!(mean > 0.0))
        throw Error(Errc::InvalidArgument, "papr_estimate", "mean power must be positive");
    return 10.0 * std::log10(Pa / mean);
}

double to_db(double linear)
{
    return 10.0 * std::log10(linear);
}

double from_db(double db)
{
    return std::pow(10.0, db / 10.0);
}

} // namespace srmimo
