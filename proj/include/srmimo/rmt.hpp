#pragma once

#include <armadillo>

namespace srmimo::rmt
{

struct FixedPointSettings
{
    double tol = 1e-12;  // relative residual of the alpha fixed point
    int max_iter = 10000;
    double damping = 1.0; // in (0, 1]; halved automatically on oscillation
};

// Eigenvalues of the common correlation matrix R together with the user
// count K. Every trace below is a spectral function of R, so this is all
// the large-system formulas need; it is computed once per scenario.
class Spectrum
{
public:
    Spectrum(arma::vec eigenvalues, arma::uword K);

    static Spectrum from_correlation(const arma::cx_mat &R, arma::uword K);
    static Spectrum identity(arma::uword M, arma::uword K);

    const arma::vec &eigenvalues() const { return eigs_; }
    arma::uword antennas() const { return eigs_.n_elem; }
    arma::uword users() const { return K_; }
    double load() const { return double(K_) / double(eigs_.n_elem); }

    // (1/K) tr R
    double normalized_trace() const { return arma::accu(eigs_) / double(K_); }

private:
    arma::vec eigs_;
    arma::uword K_;
};

struct AlphaSolution
{
    double alpha = 0.0;
    int iterations = 0;
    double residual = 0.0; // |alpha - f(alpha)| / alpha at return
};

// Unique positive root of alpha = (1/K) tr(R (I + t R / (1 + t alpha))^{-1}).
// Damped Picard iteration from alpha_0 = (1/K) tr R.
AlphaSolution solve_alpha(const Spectrum &spectrum, double t, const FixedPointSettings &settings = {});

// Traces of T(t) = (I + t R / (1 + t alpha))^{-1}, each normalized by 1/K.
struct ResolventTraces
{
    double trace_T = 0.0;    // (1/K) tr T
    double trace_RT2 = 0.0;  // (1/K) tr R T^2
    double trace_RTRT = 0.0; // (1/K) tr R T R T
};

ResolventTraces resolvent_trace(const Spectrum &spectrum, double t, double alpha);

// beta(t) = (1/K) tr(R T^2) / ((1 + t alpha)^2 - t^2 (1/K) tr(R T R T)).
// Satisfies (1/K) d/dt tr T(t) = -beta(t).
double beta(const Spectrum &spectrum, double t, const FixedPointSettings &settings = {});

// Large-system transmit power of the RZF branch at rho = delta / K:
// P-bar(rho) = gamma beta(1/rho) / rho^2. Strictly decreasing in rho.
double det_power(const Spectrum &spectrum, double rho, double gamma, const FixedPointSettings &settings = {});

// Limit of det_power as rho -> 0+, i.e. the asymptotic ZF power gamma (1/K) tr (H^H H)^{-1}.
double zf_power_limit(const Spectrum &spectrum, double gamma, const FixedPointSettings &settings = {});

// Root of P-bar(rho) = Pa. Throws NoClipping when P-bar(0+) <= Pa (the
// constraint is asymptotically inactive and delta = 0).
double solve_rho_bar(const Spectrum &spectrum, double gamma, double Pa, const FixedPointSettings &settings = {});

// Denominator of the large-system SINR at a given rho:
//   (sigma2 / (Pa rho^2)) beta(1/rho) + (1/K) tr T(1/rho) - (M - K)/K - beta(1/rho)/rho
double sinr_denominator(const Spectrum &spectrum, double rho, double Pa, double sigma2,
                        const FixedPointSettings &settings = {});

double det_sinr(const Spectrum &spectrum, double rho, double Pa, double sigma2,
                const FixedPointSettings &settings = {});

// gamma* = sigma^4 / (Pa beta(Pa / sigma2)); its rho-bar is sigma2 / Pa.
double optimal_gamma(const Spectrum &spectrum, double Pa, double sigma2, const FixedPointSettings &settings = {});

// Large-system SINR for a given gamma, covering both regimes: det_sinr at
// rho-bar when clipping is active, gamma / sigma2 (zero distortion) otherwise.
double det_sinr_for_gamma(const Spectrum &spectrum, double gamma, double Pa, double sigma2,
                          const FixedPointSettings &settings = {});

struct DeterministicEquivalents
{
    bool clipping = true; // false: ZF regime, rho_bar = 0 and alpha/beta/trace_T are NaN
    double alpha = 0.0;   // alpha(1/rho_bar)
    double beta = 0.0;    // beta(1/rho_bar)
    double trace_T = 0.0; // (1/K) tr T(1/rho_bar)
    double p_bar = 0.0;
    double rho_bar = 0.0;
    double sinr_bar = 0.0; // linear
    double gamma_star = 0.0;
};

DeterministicEquivalents compute_equivalents(const Spectrum &spectrum, double gamma, double Pa, double sigma2,
                                             const FixedPointSettings &settings = {});

// ---------------------------------------------------------------------------
// Identity correlation closed forms.
//
// iid_m is the closed form m(rho) = -2 / (1 - c - rho - sqrt((1 - c + rho)^2 + 4 c rho)).
// It is the Stieltjes transform of the M x M matrix H H^H / M normalized by
// 1/M. The power and SINR formulas need instead the limit of
// (1/K) tr(H^H H / K + rho I)^{-1}, which is m(c rho) - (1 - c)/(c rho);
// IidNormalization::Gram selects that form. See docs/math_notes.md.

double iid_m(double rho, double c);
double iid_m_prime(double rho, double c); // analytic derivative
double iid_f_bar(double rho, double c);   // m + rho m'

enum class IidNormalization
{
    Gram,       // limit of (1/K) tr(H^H H / K + rho I)^{-1}; agrees with the general-R path
    ClosedForm, // iid_m as printed
};

class IidEquivalents
{
public:
    explicit IidEquivalents(double c, IidNormalization normalization = IidNormalization::Gram);

    double load() const { return c_; }
    IidNormalization normalization() const { return norm_; }

    double m(double rho) const;
    double m_prime(double rho) const;
    double f_bar(double rho) const; // P-bar(rho) = gamma f_bar(rho)

    // g(rho) = -rho^2 m'(rho) + (sigma2 / Pa) f_bar(rho); SINR-bar = 1 / g(rho-bar)
    double g(double rho, double Pa, double sigma2) const;
    double det_sinr(double rho_bar, double Pa, double sigma2) const;

    struct Optimum
    {
        double rho_star = 0.0;
        double gamma_star = 0.0;
    };
    // rho* = sigma2 / Pa, gamma* = Pa / f_bar(rho*)
    Optimum optimal(double Pa, double sigma2) const;

private:
    double c_;
    IidNormalization norm_;
};

double iid_det_sinr(double rho_bar, double Pa, double sigma2, double c,
                    IidNormalization normalization = IidNormalization::Gram);
IidEquivalents::Optimum iid_optimal(double Pa, double sigma2, double c,
                                    IidNormalization normalization = IidNormalization::Gram);

} // namespace srmimo::rmt
