#pragma once

#include <armadillo>

namespace srmimo::efficiency
{

// Distribution of the normalized ZF power Z = b^H b / gamma = u^H (H^H H)^{-1} u,
// written as Z = X / Y with
//   X = (1/K) u^H u                        (K X ~ Gamma(K, 1))
//   Y = (1/K) / [(H^H H)^{-1}]_{11}.
// For R = I, K Y ~ Gamma(M - K + 1, 1), so Z ~ BetaPrime(K, M - K + 1), i.e.
// K/(M - K + 1) times an F(2K, 2(M - K + 1)) variable. For general R the
// density of Y comes from a saddle-point approximation driven by the
// eigenvalues R_i of R.

// Root t > 0 of 1 = (1/K) sum_i R_i / (t (1 + R_i s) + R_i).
// Requires 1 + R_max s > 0 and more than K nonzero eigenvalues (else NoRoot).
double solve_t(const arma::vec &R_eigs, arma::uword K, double s);

// Root s0 of the same equation with t fixed to y. The root is searched on
// s > -(1/R_max + 1/y), where it exists and is unique for every y > 0; it is
// positive exactly when y < t(0).
double solve_s0(const arma::vec &R_eigs, arma::uword K, double y);

// I_erg(s) = sum_i ln(1 + R_i (s + 1/t(s))) + K (ln t(s) - 1)
double i_erg(const arma::vec &R_eigs, arma::uword K, double s);

// Density of X: K (K x)^{K-1} e^{-K x} / Gamma(K).
double f_X(double x, arma::uword K);

// Exact density of Z for R = I (BetaPrime(K, M - K + 1)).
double f_Z_iid(double z, arma::uword M, arma::uword K);

// A density tabulated on an increasing grid, integrated by the trapezoid rule.
struct DensityGrid
{
    arma::vec x;
    arma::vec f;

    double mass() const;
    double mean() const;
    // Linear interpolation; 0 outside the grid.
    double value(double at) const;
    // E[min(Z / threshold, 1)] under f normalized to unit mass.
    double clipped_mean_ratio(double threshold) const;
};

struct EfficiencyOptions
{
    arma::uword y_points = 2048;
    arma::uword z_points = 2048;
    double tail = 1e-12; // grids stop where the density falls below tail * peak
    // Use v2 = -ln|M_r1 / (1 - M_t1 M_r1)| literally instead of the
    // dimensionless -ln|M_t1 M_r1 / (1 - M_t1 M_r1)|. See docs/math_notes.md.
    bool verbatim_v2 = false;
};

// Saddle-point quantities at one y.
struct SaddleTerms
{
    double s0 = 0.0;
    double i_erg = 0.0; // I_erg(s0), with t(s0) = y
    double M_r1 = 0.0, M_r2 = 0.0, M_r3 = 0.0;
    double M_t1 = 0.0, M_t2 = 0.0, M_t3 = 0.0;
    double v1 = 0.0, v2 = 0.0;
    double log_density = 0.0; // log of the unnormalized f_Y(y)
};

// Asymptotic density of Y and the induced density of Z for one (R, K).
// Immutable after construction.
class EfficiencyComputation
{
public:
    EfficiencyComputation(arma::vec R_eigs, arma::uword K, EfficiencyOptions options = {});

    const arma::vec &eigenvalues() const { return R_; }
    arma::uword users() const { return K_; }
    const EfficiencyOptions &options() const { return opts_; }

    double t0() const { return t0_; }
    double i_erg0() const { return i_erg0_; }

    SaddleTerms saddle(double y) const;
    // Unnormalized saddle-point value of f_Y.
    double f_Y_raw(double y) const;
    // f_Y after renormalization to unit mass on the y grid.
    double f_Y(double y) const { return y_density_.value(y); }

    const DensityGrid &y_density() const { return y_density_; }
    // Mass of the unnormalized f_Y on the grid (diagnostic).
    double raw_mass() const { return raw_mass_; }

    // f_Z(z) = integral of y f_X(z y) f_Y(y) dy.
    double f_Z(double z) const;
    const DensityGrid &z_density() const { return z_density_; }

    // eta_a E[min(gamma Z, Pa)] / Pa, computed from the tabulated f_Z.
    double eta_t(double gamma, double Pa, double eta_a) const;

private:
    void build_y_grid();
    void build_z_grid();

    arma::vec R_;
    arma::uword K_;
    EfficiencyOptions opts_;
    double r_max_ = 0.0;
    double t0_ = 0.0;
    double i_erg0_ = 0.0;
    double M_r2_ = 0.0;
    double raw_mass_ = 0.0;
    DensityGrid y_density_;
    arma::vec log_f_Y_; // normalized, on y_density_.x
    DensityGrid z_density_;
};

// Exact f_Z for R = I tabulated on a log grid covering all but `tail` of the mass.
DensityGrid exact_iid_z_density(arma::uword M, arma::uword K, arma::uword points = 2048, double tail = 1e-12);

// Exact eta_t for R = I through regularized incomplete beta functions.
double eta_t_iid(double gamma, double Pa, double eta_a, arma::uword M, arma::uword K);

// Average power efficiency eta_a (P(Z > Pa/gamma) + (gamma/Pa) E[Z; Z <= Pa/gamma]).
// Uses the exact path when every eigenvalue equals 1, the saddle-point path otherwise.
double eta_t(double gamma, double Pa, double eta_a, const arma::vec &R_eigs, arma::uword K,
             const EfficiencyOptions &options = {});

} // namespace srmimo::efficiency
