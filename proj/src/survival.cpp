#include "trapsim/survival.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "trapsim/analytics.hpp"

namespace trapsim {
namespace {

template <typename F>
auto timed(double& seconds, F&& f)
{
    const auto start = std::chrono::steady_clock::now();
    auto result = f();
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

bool within_bound(const Estimate& bound, const Estimate& est)
{
    return bound.value <= est.value + 3.0 * est.std_err;
}

} // namespace

Estimate confinement_lower_bound(const SimParams& params, double r)
{
    params.validate();
    if (!(r > 0.0))
        throw InvalidParameter("confinement_lower_bound: r must be positive");
    const double stay = analytics::confinement_prob(r, params.t_end);
    const double sweep = analytics::expected_range(params.t_end) + 2.0 * (r + params.a);
    return Estimate{stay * std::exp(-params.lambda * sweep), 0.0, 0, Method::lower_bound};
}

std::vector<double> default_radius_grid(const SimParams& params)
{
    constexpr std::size_t n = 24;
    const double lo = std::log(params.a);
    const double hi = std::log(4.0 * std::sqrt(params.t_end));
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    return grid;
}

RadiusOptimum optimize_confinement_radius(const SimParams& params, const std::vector<double>& r_grid)
{
    if (r_grid.empty())
        throw InvalidParameter("optimize_confinement_radius: empty radius grid");
    RadiusOptimum best{r_grid[0], confinement_lower_bound(params, r_grid[0])};
    for (std::size_t i = 1; i < r_grid.size(); ++i)
    {
        const Estimate b = confinement_lower_bound(params, r_grid[i]);
        if (b.value > best.bound.value || (b.value == best.bound.value && r_grid[i] < best.r_star))
            best = RadiusOptimum{r_grid[i], b};
    }
    return best;
}

double confinement_prefactor_rate(const SimParams& params, const Estimate& bound)
{
    const double log_prefactor = std::log(bound.value) + params.lambda * analytics::expected_range(params.t_end);
    return -log_prefactor / std::cbrt(params.t_end);
}

SurvivalReport survival_report(const SimParams& params, const SurvivalBudgets& budgets,
                               const StreamKey& key, Exec exec)
{
    params.validate();
    SurvivalReport rep;
    rep.params = params;
    rep.direct = timed(rep.seconds_direct, [&] {
        return direct_survival_estimate(params, budgets.n_direct, key.child(0), budgets.mode, exec);
    });
    rep.annealed = timed(rep.seconds_annealed, [&] {
        return annealed_survival_estimate(params, budgets.n_outer, budgets.m_inner, key.child(1),
                                          AnnealedOptions{budgets.mode, budgets.debias}, exec);
    });
    const RadiusOptimum opt = timed(rep.seconds_bound, [&] {
        if (params.lambda == 0.0)
            return RadiusOptimum{std::numeric_limits<double>::infinity(),
                                 Estimate{1.0, 0.0, 0, Method::lower_bound}};
        return optimize_confinement_radius(
            params, budgets.r_grid.empty() ? default_radius_grid(params) : budgets.r_grid);
    });
    rep.lower_bound = opt.bound;
    rep.r_star = opt.r_star;
    rep.direct_annealed_agree = separation_in_se(rep.direct, rep.annealed.estimate) <= 3.0;
    rep.bound_below_direct = within_bound(rep.lower_bound, rep.direct);
    rep.bound_below_annealed = within_bound(rep.lower_bound, rep.annealed.estimate);
    return rep;
}

} // namespace trapsim
