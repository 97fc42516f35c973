#include "doctest.h"

#include <cmath>
#include <vector>

#include "trapsim/analytics.hpp"
#include "trapsim/sausage.hpp"

using namespace trapsim;

namespace {

PathGrid linear_path(double t, std::size_t n, double slope)
{
    std::vector<double> v(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        v[k] = slope * t * static_cast<double>(k) / static_cast<double>(n);
    return PathGrid(t, std::move(v));
}

PathGrid scaled(const PathGrid& p, double c)
{
    std::vector<double> v(p.values().begin(), p.values().end());
    for (double& x : v)
        x *= c;
    return PathGrid(p.t_end() * c * c, std::move(v));
}

const DeltaOptions kNaive{SubgridMode::naive, 1.0};
const DeltaOptions kBridgeLinear{SubgridMode::bridge, 0.0};

} // namespace

TEST_CASE("sausage volume is the range of Y + X plus 2a")
{
    const PathGrid x(2.0, {0.0, 1.0, 0.5});
    const PathGrid y(2.0, {0.0, -2.0, 1.0});
    // Y + X = 0, -1, 1.5
    CHECK(sausage_volume_given_paths(x, y, 0.1) == doctest::Approx(2.5 + 0.2));
    CHECK_THROWS_AS(sausage_volume_given_paths(x, PathGrid(1.0, {0.0, 1.0, 2.0}), 0.1),
                    InvalidParameter);
}

TEST_CASE("delta_sample hand examples")
{
    CHECK(delta_sample(PathGrid(1.0, {0.0, 1.0, 0.0}), PathGrid(1.0, {0.0, 0.0, 0.0})) == 1.0);
    CHECK(delta_sample(PathGrid(1.0, {0.0, 1.0}), PathGrid(1.0, {0.0, -1.0})) == 0.0);
    // Y + X = 0, 2, -1 ; Y - X = 0, 0, 1 ; Y = 0, 1, 0
    CHECK(delta_sample(PathGrid(1.0, {0.0, 1.0, -1.0}), PathGrid(1.0, {0.0, 1.0, 0.0})) == 1.0);
}

TEST_CASE("Delta of the zero path is exactly zero")
{
    const PathGrid zero(1.0, std::vector<double>(257, 0.0));
    const DeltaEstimate n = delta_functional(zero, 64, StreamKey(70), kNaive);
    CHECK(n.value == 0.0);
    CHECK(n.std_err == 0.0);
    CHECK(n.inner_count == 64);
    const DeltaEstimate b = delta_functional(zero, 64, StreamKey(70), kBridgeLinear);
    CHECK(b.value == 0.0);
    CHECK(b.std_err == 0.0);
}

TEST_CASE("Delta equals the mean excess range E|R(Y+X)| - E|R(Y)|")
{
    // Symmetry of Y turns sup(Y - X) into -inf(Y + X) in law. Check on a fixed
    // X with independent samples of the two ranges.
    const PathGrid x = sample_brownian_path(1.0, 128, StreamKey(71));
    const DeltaEstimate d = delta_functional(x, 40000, StreamKey(72), kNaive);

    MomentSum excess;
    for (std::uint64_t j = 0; j < 40000; ++j)
    {
        const PathGrid y1 = sample_brownian_path(1.0, 128, StreamKey(73, {j, 0}));
        const PathGrid y2 = sample_brownian_path(1.0, 128, StreamKey(73, {j, 1}));
        excess.add(sausage_volume_given_paths(x, y1, 0.0) - path_extrema(y2).range());
    }
    const double se = std::hypot(d.std_err, excess.std_err());
    CHECK(std::abs(d.value - excess.mean()) < 3.0 * se);
}

TEST_CASE("naive and bridge Delta are close for a linear drift")
{
    const PathGrid x = linear_path(1.0, 256, 1.0);
    const DeltaEstimate n = delta_functional(x, 4000, StreamKey(74), kNaive);
    const DeltaEstimate b = delta_functional(x, 4000, StreamKey(74), kBridgeLinear);
    CHECK(n.value > 0.0);
    CHECK(b.value > 0.0);
    CHECK(std::abs(n.value - b.value) < 3.0 * std::hypot(n.std_err, b.std_err) + 0.05);
}

TEST_CASE("Delta is non-negative on average over Brownian X")
{
    MomentSum pooled;
    for (std::uint64_t i = 0; i < 400; ++i)
    {
        const PathGrid x = sample_brownian_path(1.0, 256, StreamKey(75, {i, 0}));
        pooled.add(delta_functional(x, 16, StreamKey(75, {i, 1})).value);
    }
    CHECK(pooled.mean() > -3.0 * pooled.std_err());
    CHECK(pooled.mean() > 0.0);
}

TEST_CASE("Brownian scaling is exact for c = 2 with shared drivers")
{
    // Doubling space and quadrupling time scales every increment, every bridge
    // maximum and hence Delta by exactly 2 in binary floating point.
    const PathGrid x = sample_brownian_path(1.0, 200, StreamKey(76));
    const PathGrid x2 = scaled(x, 2.0);
    for (const auto& opts : {kNaive, DeltaOptions{}})
    {
        const DeltaEstimate d1 = delta_functional(x, 32, StreamKey(77), opts);
        const DeltaEstimate d2 = delta_functional(x2, 32, StreamKey(77), opts);
        CHECK(d2.value == 2.0 * d1.value);
        CHECK(d2.std_err == 2.0 * d1.std_err);
    }
}

TEST_CASE("kernel Delta equals the materialized reference")
{
    const PathGrid x = sample_brownian_path(1.5, 300, StreamKey(78));
    for (const auto& opts : {kNaive, DeltaOptions{}, kBridgeLinear})
    {
        const DeltaEstimate k = delta_functional(x, 50, StreamKey(79), opts);
        const DeltaEstimate r = reference::delta_functional(x, 50, StreamKey(79), opts);
        CHECK(k.value == r.value);
        CHECK(k.std_err == r.std_err);
    }
    CHECK_THROWS_AS(delta_functional(x, 1, StreamKey(79)), InvalidParameter);
}

TEST_CASE("bridge Delta of the zero path is zero for every driver")
{
    for (std::uint64_t j = 0; j < 200; ++j)
    {
        const PathGrid y = sample_brownian_path(1.0, 64, StreamKey(81, {j}));
        RandomStream draws = RandomStream(StreamKey(81, {j})).at(kBridgeOffset);
        const PathGrid zero(1.0, std::vector<double>(65, 0.0));
        CHECK(delta_sample_bridge(zero, y, 0.0, draws) == 0.0);
    }
}

TEST_CASE("survival_weight")
{
    const SimParams p = SimParams::make(1.0, 0.1, 1.0);
    const SurvivalWeight w = survival_weight(DeltaEstimate{0.0, 0.0, 10}, p);
    CHECK(w.weight == doctest::Approx(0.165999729257518).epsilon(1e-13));
    CHECK(w.conditional_weight == 1.0);

    const SurvivalWeight w2 = survival_weight(DeltaEstimate{0.3, 0.0, 10}, p);
    CHECK(w2.conditional_weight == doctest::Approx(std::exp(-0.3)));
    CHECK(w2.weight == doctest::Approx(w.weight * std::exp(-0.3)));

    const SurvivalWeight d = survival_weight(DeltaEstimate{0.3, 0.2, 10}, p, true);
    CHECK(d.weight == doctest::Approx(w2.weight * (1.0 - 0.02)));
    CHECK(d.conditional_weight == doctest::Approx(w2.conditional_weight * (1.0 - 0.02)));
}

TEST_CASE("annealed estimate: execution modes agree bitwise")
{
    const SimParams p = SimParams::make(0.5, 0.1, 0.5, 128);
    const StreamKey key(82);
    for (auto mode : {SubgridMode::naive, SubgridMode::bridge})
    {
        const AnnealedOptions o{mode, false};
        const AnnealedResult par = annealed_survival_estimate(p, 64, 16, key, o, Exec::parallel);
        const AnnealedResult ser = annealed_survival_estimate(p, 64, 16, key, o, Exec::serial);
        const AnnealedResult ref = reference::annealed_survival_estimate(p, 64, 16, key, o);
        CHECK(par.estimate.value == ser.estimate.value);
        CHECK(par.estimate.value == ref.estimate.value);
        CHECK(par.estimate.std_err == ref.estimate.std_err);
        CHECK(par.bias_diagnostic == ref.bias_diagnostic);
        CHECK(par.mean_delta == ref.mean_delta);
        CHECK(par.estimate.method == Method::annealed);
    }
}

TEST_CASE("annealed estimate limits and diagnostics")
{
    const StreamKey key(83);
    const AnnealedResult zero = annealed_survival_estimate(SimParams::make(0.0, 0.1, 0.5, 64), 8, 4, key);
    CHECK(zero.estimate.value == 1.0);
    CHECK(zero.bias_diagnostic == 0.0);

    const SimParams p = SimParams::make(1.0, 0.1, 1.0, 128);
    const AnnealedResult r = annealed_survival_estimate(p, 200, 32, key);
    // Every weight is at most exp(-lambda (E|R| + 2a)) when Delta >= 0 on
    // average, and the estimate sits near that scale.
    CHECK(r.estimate.value > 0.0);
    CHECK(r.estimate.value < 1.5 * std::exp(-(analytics::expected_range(1.0) + 0.2)));
    CHECK(r.mean_delta > 0.0);

    // The plug-in bias scales like 1/m_inner.
    const AnnealedResult r2 = annealed_survival_estimate(p, 200, 64, key);
    CHECK(r2.bias_diagnostic / r.bias_diagnostic == doctest::Approx(0.5).epsilon(0.25));

    CHECK_THROWS_AS(annealed_survival_estimate(p, 1, 32, key), InvalidParameter);
}
