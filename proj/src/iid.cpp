#include "srmimo/error.hpp"
#include "srmimo/rmt.hpp"

#include <cmath>

namespace srmimo::rmt
{

namespace
{

void require_domain(double rho, double c, const char *op)
{
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw Error(Errc::InvalidArgument, op, "rho must be positive and finite");
    if (!(c > 0.0 && c < 1.0))
        throw Error(Errc::InvalidArgument, op, "load c = K/M must lie in (0, 1)");
}

// sqrt((1 - c + r)^2 + 4 c r) and its derivative in r
double root_term(double r, double c)
{
    const double a = 1.0 - c + r;
    return std::sqrt(a * a + 4.0 * c * r);
}

double root_term_prime(double r, double c)
{
    return (1.0 + c + r) / root_term(r, c);
}

// Gram normalization m(c rho) - (1 - c)/(c rho), written without the cancellation:
// 2c / (S(c rho) + 1 - c + c rho).
double gram_m(double rho, double c)
{
    const double r = c * rho;
    return 2.0 * c / (root_term(r, c) + 1.0 - c + r);
}

double gram_m_prime(double rho, double c)
{
    const double r = c * rho;
    const double d = root_term(r, c) + 1.0 - c + r;
    return -2.0 * c * (c * root_term_prime(r, c) + c) / (d * d);
}

} // namespace

double iid_m(double rho, double c)
{
    require_domain(rho, c, "iid_m");
    return -2.0 / (1.0 - c - rho - root_term(rho, c));
}

double iid_m_prime(double rho, double c)
{
    require_domain(rho, c, "iid_m_prime");
    const double d = 1.0 - c - rho - root_term(rho, c);
    const double d_prime = -1.0 - root_term_prime(rho, c);
    return 2.0 * d_prime / (d * d);
}

double iid_f_bar(double rho, double c)
{
    return iid_m(rho, c) + rho * iid_m_prime(rho, c);
}

IidEquivalents::IidEquivalents(double c, IidNormalization normalization)
    : c_(c), norm_(normalization)
{
    if (!(c > 0.0 && c < 1.0))
        throw Error(Errc::InvalidArgument, "IidEquivalents", "load c = K/M must lie in (0, 1)");
}

double IidEquivalents::m(double rho) const
{
    require_domain(rho, c_, "IidEquivalents::m");
    return norm_ == IidNormalization::Gram ? gram_m(rho, c_) : iid_m(rho, c_);
}

double IidEquivalents::m_prime(double rho) const
{
    require_domain(rho, c_, "IidEquivalents::m_prime");
    return norm_ == IidNormalization::Gram ? gram_m_prime(rho, c_) : iid_m_prime(rho, c_);
}

double IidEquivalents::f_bar(double rho) const
{
    return m(rho) + rho * m_prime(rho);
}

double IidEquivalents::g(double rho, double Pa, double sigma2) const
{
    if (!(Pa > 0.0) || !(sigma2 > 0.0))
        throw Error(Errc::InvalidArgument, "IidEquivalents::g", "Pa and sigma2 must be positive");
    return -rho * rho * m_prime(rho) + sigma2 / Pa * f_bar(rho);
}

double IidEquivalents::det_sinr(double rho_bar, double Pa, double sigma2) const
{
    const double den = g(rho_bar, Pa, sigma2);
    if (!(den > 0.0))
        throw Error(Errc::DegenerateDenominator, "IidEquivalents::det_sinr",
                    "g(rho) = " + std::to_string(den) + " is not positive");
    return 1.0 / den;
}

IidEquivalents::Optimum IidEquivalents::optimal(double Pa, double sigma2) const
{
    if (!(Pa > 0.0) || !(sigma2 > 0.0))
        throw Error(Errc::InvalidArgument, "IidEquivalents::optimal", "Pa and sigma2 must be positive");
    Optimum out;
    out.rho_star = sigma2 / Pa;
    const double f = f_bar(out.rho_star);
    if (!(f > 0.0))
        throw Error(Errc::DegenerateDenominator, "IidEquivalents::optimal", "f_bar(rho*) is not positive");
    out.gamma_star = Pa / f;
    return out;
}

double iid_det_sinr(double rho_bar, double Pa, double sigma2, double c, IidNormalization normalization)
{
    return IidEquivalents(c, normalization).det_sinr(rho_bar, Pa, sigma2);
}

IidEquivalents::Optimum iid_optimal(double Pa, double sigma2, double c, IidNormalization normalization)
{
    return IidEquivalents(c, normalization).optimal(Pa, sigma2);
}

} // namespace srmimo::rmt
