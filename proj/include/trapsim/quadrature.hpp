#pragma once

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace trapsim::quad {

/// Integral of f over [a, b], b may be +infinity. Double-exponential rules
/// tolerate integrable endpoint singularities, which every density here has.
template <typename F>
double integrate(F f, double a, double b, double tol = 1e-12)
{
    if (std::isinf(b))
    {
        boost::math::quadrature::exp_sinh<double> rule;
        return rule.integrate(f, a, b, tol);
    }
    boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate(f, a, b, tol);
}

/// Iterated integral over the rectangle [a0, b0] x [a1, b1].
template <typename F>
double integrate_2d(F f, double a0, double b0, double a1, double b1, double tol = 1e-10)
{
    return integrate(
        [&](double x) { return integrate([&](double y) { return f(x, y); }, a1, b1, tol); },
        a0, b0, tol);
}

} // namespace trapsim::quad
