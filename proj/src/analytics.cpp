#include "trapsim/analytics.hpp"

#include <cmath>
#include <numbers>

#include "trapsim/error.hpp"
#include "trapsim/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace trapsim::analytics {
namespace {

using std::numbers::pi;

constexpr double kSeriesCutoff = 1e-14;

double eigen_series(double u)
{
    // u = t / r^2
    double sum = 0.0;
    for (int k = 0;; ++k)
    {
        const double odd = 2.0 * k + 1.0;
        const double term = std::exp(-odd * odd * pi * pi * u / 8.0) / odd;
        sum += (k % 2 == 0) ? term : -term;
        if (term < kSeriesCutoff)
            break;
    }
    return 4.0 / pi * sum;
}

double image_series(double u)
{
    // P(|B| < r on [0,t]) = sum_k (-1)^k [Phi((2k+1)z) - Phi((2k-1)z)], z = r/sqrt(t)
    const double z = 1.0 / std::sqrt(u);
    const double s = z / std::numbers::sqrt2;
    double sum = std::erf(s);
    for (int k = 1;; ++k)
    {
        const double term = std::erfc((2.0 * k - 1.0) * s) - std::erfc((2.0 * k + 1.0) * s);
        sum += (k % 2 == 0) ? term : -term;
        if (term < kSeriesCutoff)
            break;
    }
    return sum;
}

} // namespace

double expected_range(double t)
{
    if (t < 0.0)
        throw InvalidParameter("expected_range: t must be non-negative");
    return std::sqrt(8.0 * t / pi);
}

double range_tail_asymptotic(double t, double a_len)
{
    if (!(t > 0.0) || !(a_len > 0.0))
        throw InvalidParameter("range_tail_asymptotic: t and a must be positive");
    const double u = t / (a_len * a_len);
    return 8.0 * pi * pi * u * std::exp(-0.5 * pi * pi * u);
}

double max_argmax_density(double m, double u, double t)
{
    if (!(t > 0.0))
        throw InvalidParameter("max_argmax_density: t must be positive");
    if (m < 0.0 || !std::isfinite(m) || !(u > 0.0) || !(u < t))
        return 0.0;
    // In z = m / sqrt(u) the density stays finite down to the smallest normal u.
    const double z = m / std::sqrt(u);
    return z * std::exp(-0.5 * z * z) / u / (pi * std::sqrt(t - u));
}

double argmax_density(double u, double t)
{
    if (!(t > 0.0))
        throw InvalidParameter("argmax_density: t must be positive");
    if (!(u > 0.0) || !(u < t))
        return 0.0;
    return 1.0 / (pi * std::sqrt(u * (t - u)));
}

double argmax_cdf(double u, double t)
{
    if (!(t > 0.0))
        throw InvalidParameter("argmax_cdf: t must be positive");
    if (u <= 0.0)
        return 0.0;
    if (u >= t)
        return 1.0;
    return 2.0 / pi * std::asin(std::sqrt(u / t));
}

double first_passage_density(double x, double u)
{
    if (!(x > 0.0))
        throw InvalidParameter("first_passage_density: x must be positive");
    if (!(u > 0.0) || !std::isfinite(u))
        return 0.0;
    return x / std::sqrt(2.0 * pi) * std::exp(-x * x / (2.0 * u) - 1.5 * std::log(u));
}

double stay_positive_prob(double x, double t)
{
    if (!(x > 0.0) || t < 0.0)
        throw InvalidParameter("stay_positive_prob: need x > 0, t >= 0");
    if (t == 0.0)
        return 1.0;
    return std::erf(x / std::sqrt(2.0 * t));
}

double conditioned_positive_transition(double x, double y, double s, double t)
{
    if (!(x > 0.0) || !(s > 0.0) || !(s < t))
        throw InvalidParameter("conditioned_positive_transition: need x > 0, 0 < s < t");
    if (!(y > 0.0))
        return 0.0;
    const double d = x - y;
    // e^{-(x-y)^2/2s} - e^{-(x+y)^2/2s} = e^{-(x-y)^2/2s} (1 - e^{-2xy/s})
    const double killed = std::exp(-d * d / (2.0 * s)) * -std::expm1(-2.0 * x * y / s);
    return killed / std::sqrt(2.0 * pi * s) * stay_positive_prob(y, t - s)
           / stay_positive_prob(x, t);
}

double confinement_prob(double r, double t)
{
    if (!(r > 0.0) || t < 0.0)
        throw InvalidParameter("confinement_prob: need r > 0, t >= 0");
    if (t == 0.0)
        return 1.0;
    const double u = t / (r * r);
    return u < 0.5 ? image_series(u) : eigen_series(u);
}

double box_mass_max_argmax(double t, double m_hi, double u_lo, double u_hi)
{
    if (!(0.0 <= u_lo && u_lo < u_hi && u_hi <= t) || m_hi < 0.0)
        throw InvalidParameter("box_mass_max_argmax: need 0 <= u_lo < u_hi <= t, m_hi >= 0");
    if (m_hi == 0.0)
        return 0.0;
    if (std::isinf(m_hi))
        return argmax_cdf(u_hi, t) - argmax_cdf(u_lo, t);
    // int_0^m (m'/pi) u^{-3/2} (t-u)^{-1/2} e^{-m'^2/2u} dm'
    //   = (1 - e^{-m^2/2u}) / (pi sqrt(u (t-u)))
    const double m2 = m_hi * m_hi;
    // The rule also passes the signed distance to the nearer endpoint, which
    // keeps u and t - u accurate where the arcsine factor blows up.
    auto marginal = [&](double u, double uc) {
        const double lo = uc < 0.0 ? u_lo - uc : u;
        const double hi = uc > 0.0 ? (t - u_hi) + uc : t - u;
        return -std::expm1(-m2 / (2.0 * lo)) / (pi * std::sqrt(lo * hi));
    };
    boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate(marginal, u_lo, u_hi, 1e-12);
}

} // namespace trapsim::analytics
