#pragma once

#include "srmimo/channel.hpp"

#include <armadillo>

#include <span>

namespace srmimo
{

// Scenario scalars. Powers and noise variance are linear.
struct SystemConfig
{
    arma::uword M = 80;
    arma::uword K = 40;
    double Pa = 1.0;     // instantaneous transmit power cap
    double sigma2 = 1.0; // per-user noise variance
    double gamma = 1.0;  // design scalar of the distortion objective
    double eta_a = 1.0;  // amplifier efficiency
    CorrelationSpec corr = CorrelationSpec::identity(80);

    double load() const { return double(K) / double(M); }

    // Throws Error(InvalidArgument / BadDimensions) when an invariant fails.
    void validate() const;
};

enum class PrecodeCase
{
    ZF,      // b^H b <= Pa, transmitted as is
    Clipped, // RZF with the multiplier chosen to land on Pa
};

struct PrecodeResult
{
    arma::cx_vec x;
    double delta = 0.0; // Lagrange multiplier of the power constraint
    PrecodeCase kind = PrecodeCase::ZF;
    double power = 0.0; // x^H x
};

// Eigendecomposition of the K x K Gram matrix H^H H. Every precoder below is
// a spectral function of it: (H^H H + d I)^{-1} = V diag(1/(l + d)) V^H.
class GramEigen
{
public:
    // Throws SingularChannel when cond(H^H H) exceeds max_condition.
    explicit GramEigen(const arma::cx_mat &H, double max_condition = 1e12);

    const arma::vec &eigenvalues() const { return eigs_; }
    const arma::cx_mat &eigenvectors() const { return V_; }
    double condition() const { return eigs_.max() / eigs_.min(); }

    // H (H^H H + shift I)^{-1} w
    arma::cx_vec apply_regularized(const arma::cx_mat &H, const arma::cx_vec &w, double shift) const;

private:
    arma::vec eigs_;
    arma::cx_mat V_;
};

// b = sqrt(gamma) H (H^H H)^{-1} u.
arma::cx_vec zf_precode(const arma::cx_mat &H, const arma::cx_vec &u, double gamma);

// Minimizes ||H^H x - sqrt(gamma) u||^2 subject to x^H x <= Pa.
PrecodeResult constrained_precode(const arma::cx_mat &H, const arma::cx_vec &u, double gamma, double Pa);
PrecodeResult constrained_precode(const arma::cx_mat &H, const arma::cx_vec &u, const SystemConfig &cfg);
PrecodeResult constrained_precode(const arma::cx_mat &H, const GramEigen &gram, const arma::cx_vec &u, double gamma,
                                  double Pa);

// x^H x of the RZF vector at multiplier delta, evaluated from the spectrum:
// gamma * sum_i l_i |(V^H u)_i|^2 / (l_i + delta)^2.
double rzf_power(const GramEigen &gram, const arma::cx_vec &u, double gamma, double delta);

// ||A(x - b) + delta x|| with A = H H^H; zero at the constrained optimum.
double stationarity_residual(const arma::cx_mat &H, const arma::cx_vec &u, double gamma, const PrecodeResult &result);

// phi(x) = ||H^H x - sqrt(gamma) u||^2
double distortion(const arma::cx_mat &H, const arma::cx_vec &x, const arma::cx_vec &u, double gamma);

// MMSE baseline xi H (H^H H + (K sigma2 / Pa) I)^{-1} u scaled to x^H x = Pa.
arma::cx_vec mmse_precode(const arma::cx_mat &H, const arma::cx_vec &u, double sigma2, double Pa);
arma::cx_vec mmse_precode(const arma::cx_mat &H, const GramEigen &gram, const arma::cx_vec &u, double sigma2,
                          double Pa);

// Numerator and denominator of the sum SINR
//   gamma u^H u / (||H^H x - sqrt(gamma) u||^2 + K sigma2).
// Aggregation over trials divides the summed signals by the summed impairments.
struct SinrTerms
{
    double signal = 0.0;
    double impairment = 0.0;

    double ratio() const { return impairment > 0.0 ? signal / impairment : 0.0; }
};

SinrTerms sinr_terms(const arma::cx_mat &H, const arma::cx_vec &x, const arma::cx_vec &u, double gamma,
                     double sigma2);

double empirical_sinr(const arma::cx_mat &H, const arma::cx_vec &x, const arma::cx_vec &u, double gamma,
                      double sigma2);

// Same SINR for a precoder without a design gamma (MMSE baseline): gamma is
// set to the value maximizing the ratio for this x, i.e. the best common
// receive scaling. The maximum equals a c / (a c - b^2) with
// a = ||H^H x||^2 + K sigma2, b = Re(u^H H^H x), c = u^H u.
SinrTerms receive_scaled_sinr_terms(const arma::cx_mat &H, const arma::cx_vec &x, const arma::cx_vec &u,
                                    double sigma2);

// 10 log10(Pa / mean power). The peak of a single-RF transmitter is the cap Pa.
double papr_estimate(std::span<const double> powers, double Pa);

double to_db(double linear);
double from_db(double db);

} // namespace srmimo
