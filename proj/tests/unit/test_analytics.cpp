#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "trapsim/analytics.hpp"
#include "trapsim/estimate.hpp"
#include "trapsim/path.hpp"
#include "trapsim/quadrature.hpp"

using namespace trapsim;
using namespace trapsim::analytics;
using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mean over paths of the probability that the continuous path, given its
// grid values, stays inside (lo, hi). Each step multiplies the two one-sided
// bridge survival factors, which ignores double crossings within one step.
MomentSum confined_mc(double x0, double lo, double hi, double t, std::size_t n_steps,
                      std::size_t n_paths, std::uint64_t seed)
{
    const double dt = t / static_cast<double>(n_steps);
    std::vector<double> w(n_steps + 1);
    MomentSum m;
    for (std::uint64_t i = 0; i < n_paths; ++i)
    {
        RandomStream s(StreamKey(seed, {i}));
        fill_brownian_path(w, dt, s);
        double alive = 1.0;
        for (std::size_t k = 1; k <= n_steps && alive > 0.0; ++k)
        {
            const double p = x0 + w[k - 1];
            const double c = x0 + w[k];
            if (c <= lo || c >= hi)
            {
                alive = 0.0;
                break;
            }
            if (std::isfinite(hi))
                alive *= 1.0 - bridge_hit_prob(p, c, dt, hi, 1.0);
            if (std::isfinite(lo))
                alive *= 1.0 - bridge_hit_prob(p, c, dt, lo, 1.0);
        }
        m.add(alive);
    }
    return m;
}

} // namespace

TEST_CASE("expected_range")
{
    CHECK(expected_range(0.0) == 0.0);
    CHECK(expected_range(1.0) == doctest::Approx(1.5957691216057308).epsilon(1e-15));
    CHECK(expected_range(4.0) == doctest::Approx(2.0 * expected_range(1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(expected_range(-1.0), InvalidParameter);
}

TEST_CASE("expected_range matches bridge-corrected range Monte Carlo")
{
    const std::size_t n = 20000;
    MomentSum m;
    for (std::uint64_t i = 0; i < n; ++i)
    {
        const StreamKey key(50, {i});
        const PathGrid p = sample_brownian_path(1.0, 256, key);
        RandomStream draws = RandomStream(key).at(kBridgeOffset);
        m.add(path_extrema_bridge(p, 1.0, draws).range());
    }
    CHECK(std::abs(m.mean() - expected_range(1.0)) < 3.0 * m.std_err());
}

TEST_CASE("range_tail_asymptotic")
{
    // t/a^2 = 4 -> 32 pi^2 e^{-2 pi^2}
    CHECK(range_tail_asymptotic(4.0, 1.0) == doctest::Approx(8.44929092188e-7).epsilon(1e-10));
    CHECK(range_tail_asymptotic(0.04, 0.1) == doctest::Approx(range_tail_asymptotic(4.0, 1.0)));
    for (double u : {1.0, 3.0, 10.0})
    {
        const double ratio = range_tail_asymptotic(u + 1.0, 1.0) / range_tail_asymptotic(u, 1.0);
        CHECK(ratio == doctest::Approx(std::exp(-pi * pi / 2.0) * (u + 1.0) / u).epsilon(1e-12));
    }
    // a = t^{1/3}: exponent -(pi^2/2) t^{1/3}
    for (double t : {8.0, 27.0, 1000.0})
    {
        const double a = std::cbrt(t);
        const double u = t / (a * a);
        CHECK(std::log(range_tail_asymptotic(t, a) / (8.0 * pi * pi * u))
              == doctest::Approx(-pi * pi / 2.0 * std::cbrt(t)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(range_tail_asymptotic(0.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(range_tail_asymptotic(1.0, 0.0), InvalidParameter);
}

TEST_CASE("max_argmax_density")
{
    CHECK(max_argmax_density(-1.0, 0.5, 1.0) == 0.0);
    CHECK(max_argmax_density(1.0, 0.0, 1.0) == 0.0);
    CHECK(max_argmax_density(1.0, 1.0, 1.0) == 0.0);
    CHECK(max_argmax_density(0.7, 0.3, 1.0) >= 0.0);

    SUBCASE("m-marginal is the arcsine density")
    {
        for (double u : {0.01, 0.1, 0.25, 0.5, 0.8, 0.99})
        {
            const double marginal
                = quad::integrate([&](double m) { return max_argmax_density(m, u, 1.0); }, 0.0, kInf);
            CHECK(std::abs(marginal - argmax_density(u, 1.0)) < 1e-8);
        }
    }
    SUBCASE("total mass")
    {
        const double total = quad::integrate(
            [](double u) {
                return quad::integrate([&](double m) { return max_argmax_density(m, u, 2.0); }, 0.0,
                                       kInf, 1e-10);
            },
            0.0, 2.0, 1e-10);
        CHECK(std::abs(total - 1.0) < 1e-6);
    }
}

TEST_CASE("argmax density and cdf")
{
    CHECK(argmax_density(0.5, 1.0) == doctest::Approx(2.0 / pi).epsilon(1e-15));
    CHECK(argmax_density(0.5, 1.0) == doctest::Approx(0.63662).epsilon(1e-5));
    CHECK(argmax_density(0.0, 1.0) == 0.0);
    CHECK(argmax_density(1.2, 1.0) == 0.0);
    for (double u : {0.1, 0.3, 0.45})
    {
        CHECK(argmax_density(u, 1.0) == doctest::Approx(argmax_density(1.0 - u, 1.0)));
        CHECK(argmax_density(u, 1.0) > 2.0 / pi);
    }
    CHECK(argmax_cdf(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(argmax_cdf(3.0, 6.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(quad::integrate([](double u) { return argmax_density(u, 3.0); }, 0.0, 3.0) - 1.0)
          < 1e-6);
    CHECK(quad::integrate([](double u) { return argmax_density(u, 1.0); }, 0.0, 0.3)
          == doctest::Approx(argmax_cdf(0.3, 1.0)).epsilon(1e-10));
}

TEST_CASE("first_passage_density")
{
    const double mass = quad::integrate([](double u) { return first_passage_density(1.0, u); }, 0.0, kInf);
    CHECK(std::abs(mass - 1.0) < 1e-6);

    // mode at u = x^2 / 3
    for (double x : {0.5, 1.0, 2.0})
    {
        const double mode = x * x / 3.0;
        const double h = 1e-4 * mode;
        CHECK(first_passage_density(x, mode) > first_passage_density(x, mode - h));
        CHECK(first_passage_density(x, mode) > first_passage_density(x, mode + h));
    }
    // tail mass beyond t is the no-hit probability
    const double tail = quad::integrate([](double u) { return first_passage_density(1.0, u); }, 1.0, kInf);
    CHECK(tail == doctest::Approx(stay_positive_prob(1.0, 1.0)).epsilon(1e-9));
    CHECK(first_passage_density(1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(first_passage_density(0.0, 1.0), InvalidParameter);
}

TEST_CASE("stay_positive_prob")
{
    CHECK(stay_positive_prob(1.0, 0.0) == 1.0);
    CHECK(stay_positive_prob(1.0, 1e-12) == doctest::Approx(1.0));
    CHECK(stay_positive_prob(1.0, 1.0) == doctest::Approx(0.682689492137086).epsilon(1e-14));
    CHECK(stay_positive_prob(1.0, 2.0) < stay_positive_prob(1.0, 1.0));
    CHECK(stay_positive_prob(2.0, 1.0) > stay_positive_prob(1.0, 1.0));
}

TEST_CASE("stay_positive_prob matches absorption Monte Carlo")
{
    const MomentSum m = confined_mc(1.0, 0.0, kInf, 1.0, 256, 100000, 51);
    CHECK(std::abs(m.mean() - stay_positive_prob(1.0, 1.0)) < 3.0 * m.std_err());
}

TEST_CASE("conditioned_positive_transition")
{
    const double mass = quad::integrate(
        [](double y) { return conditioned_positive_transition(1.0, y, 0.5, 1.0); }, 0.0, kInf);
    CHECK(std::abs(mass - 1.0) < 1e-6);
    CHECK(conditioned_positive_transition(1.0, 0.0, 0.5, 1.0) == 0.0);
    CHECK(conditioned_positive_transition(1.0, 1e-12, 0.5, 1.0) < 1e-10);

    // s -> t: the conditioning ratio tends to 1 / P_x(tau > t).
    const double x = 1.0, y = 1.3, t = 1.0, s = t - 1e-12;
    const double heat = (std::exp(-(x - y) * (x - y) / (2 * s)) - std::exp(-(x + y) * (x + y) / (2 * s)))
                        / std::sqrt(2 * pi * s);
    CHECK(conditioned_positive_transition(x, y, s, t) * stay_positive_prob(x, t) / heat
          == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(conditioned_positive_transition(1.0, 1.0, 1.0, 1.0), InvalidParameter);
}

TEST_CASE("confinement_prob")
{
    CHECK(confinement_prob(1.0, 0.0) == 1.0);
    CHECK(confinement_prob(1.0, 1.0) == doctest::Approx(0.370777429799524).epsilon(1e-13));
    CHECK(confinement_prob(1.0, 0.3) == doctest::Approx(0.864221776685603).epsilon(1e-13));

    SUBCASE("the two series agree where both converge")
    {
        // Just either side of the switch at t/r^2 = 1/2.
        const double lo = confinement_prob(1.0, 0.5 - 1e-9);
        const double hi = confinement_prob(1.0, 0.5);
        CHECK(lo == doctest::Approx(hi).epsilon(1e-8));
    }
    SUBCASE("monotone and scale invariant")
    {
        double prev = 1.0;
        for (double t = 0.05; t < 5.0; t += 0.05)
        {
            const double p = confinement_prob(1.0, t);
            CHECK(p < prev);
            CHECK(p == doctest::Approx(confinement_prob(3.0, 9.0 * t)).epsilon(1e-12));
            CHECK(confinement_prob(1.2, t) > p);
            prev = p;
        }
    }
    SUBCASE("log-slope at large t/r^2")
    {
        std::vector<double> u, lp;
        for (double x = 4.0; x <= 16.0; x += 1.0)
        {
            u.push_back(x);
            lp.push_back(std::log(confinement_prob(1.0, x)));
        }
        double su = 0, sl = 0, suu = 0, sul = 0;
        const double n = static_cast<double>(u.size());
        for (std::size_t i = 0; i < u.size(); ++i)
        {
            su += u[i];
            sl += lp[i];
            suu += u[i] * u[i];
            sul += u[i] * lp[i];
        }
        const double slope = (n * sul - su * sl) / (n * suu - su * su);
        CHECK(std::abs(slope / (-pi * pi / 8.0) - 1.0) < 0.01);
    }
}

TEST_CASE("confinement_prob matches absorbing-barrier Monte Carlo")
{
    const MomentSum m = confined_mc(0.0, -1.0, 1.0, 1.0, 1024, 20000, 52);
    CHECK(std::abs(m.mean() / confinement_prob(1.0, 1.0) - 1.0) < 0.02);
}

TEST_CASE("box_mass_max_argmax")
{
    CHECK(box_mass_max_argmax(1.0, 0.0, 0.2, 0.7) == 0.0);
    CHECK(box_mass_max_argmax(1.0, kInf, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(box_mass_max_argmax(1.0, 40.0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(box_mass_max_argmax(1.0, 0.5, 0.25, 0.75) == doctest::Approx(0.0792906636923596).epsilon(1e-10));

    const double full_2d = quad::integrate_2d(
        [](double u, double m) { return max_argmax_density(m, u, 1.0); }, 0.25, 0.75, 0.0, 0.5);
    CHECK(box_mass_max_argmax(1.0, 0.5, 0.25, 0.75) == doctest::Approx(full_2d).epsilon(1e-8));

    CHECK_THROWS_AS(box_mass_max_argmax(1.0, 1.0, 0.5, 0.5), InvalidParameter);
    CHECK_THROWS_AS(box_mass_max_argmax(1.0, -1.0, 0.0, 0.5), InvalidParameter);
    CHECK_THROWS_AS(box_mass_max_argmax(1.0, 1.0, 0.0, 1.5), InvalidParameter);
}

TEST_CASE("box_mass_max_argmax matches (max, argmax) Monte Carlo")
{
    const std::size_t n = 200000;
    std::size_t inside = 0;
    for (std::uint64_t i = 0; i < n; ++i)
    {
        const StreamKey key(53, {i});
        const PathGrid p = sample_brownian_path(1.0, 1024, key);
        RandomStream draws = RandomStream(key).at(kBridgeOffset);
        const Extrema e = path_extrema_bridge(p, 1.0, draws);
        if (e.max <= 0.5 && e.argmax_time >= 0.25 && e.argmax_time <= 0.75)
            ++inside;
    }
    const double p_mc = static_cast<double>(inside) / n;
    const double se = std::sqrt(p_mc * (1.0 - p_mc) / n);
    CHECK(std::abs(p_mc - box_mass_max_argmax(1.0, 0.5, 0.25, 0.75)) < 3.0 * se);
}
