#pragma once

#include <cstddef>
#include <vector>

#include "trapsim/estimate.hpp"
#include "trapsim/rng.hpp"
#include "trapsim/sausage.hpp"
#include "trapsim/trapfield.hpp"

namespace trapsim {

/// P(|X| < r on [0, t]) * exp(-lambda (E|R_t| + 2(r + a))): the particle stays
/// in (-r, r) and no trap enters (-r - a, r + a). In one dimension the set
/// swept by a trap's (r + a)-ball has length |R_t(Y)| + 2(r + a) exactly.
Estimate confinement_lower_bound(const SimParams& params, double r);

/// 24 log-spaced radii in [a, 4 sqrt(t)].
std::vector<double> default_radius_grid(const SimParams& params);

struct RadiusOptimum
{
    double r_star = 0.0;
    Estimate bound;
};

/// Grid argmax of confinement_lower_bound; ties go to the smaller radius.
RadiusOptimum optimize_confinement_radius(const SimParams& params, const std::vector<double>& r_grid);

/// -(log bound + lambda E|R_t|) / t^{1/3}: the rate of the confinement
/// prefactor once the unavoidable exp(-lambda E|R_t|) is divided out.
double confinement_prefactor_rate(const SimParams& params, const Estimate& bound);

struct SurvivalBudgets
{
    std::size_t n_direct = 200000;
    std::size_t n_outer = 20000;
    std::size_t m_inner = 512;
    std::vector<double> r_grid; ///< empty means default_radius_grid
    SubgridMode mode = SubgridMode::bridge;
    bool debias = false;
};

struct SurvivalReport
{
    SimParams params;
    Estimate direct;
    AnnealedResult annealed;
    Estimate lower_bound;
    double r_star = 0.0;
    /// |direct - annealed| <= 3 combined SE
    bool direct_annealed_agree = false;
    /// lower_bound <= estimate + 3 SE of that estimate
    bool bound_below_direct = false;
    bool bound_below_annealed = false;
    double seconds_direct = 0.0;
    double seconds_annealed = 0.0;
    double seconds_bound = 0.0;

    bool all_agree() const noexcept
    {
        return direct_annealed_agree && bound_below_direct && bound_below_annealed;
    }
};

/// Runs the direct, annealed and lower-bound routes on one parameter set.
/// The direct route uses key.child(0), the annealed route key.child(1).
/// With lambda = 0 the bound's supremum over r is 1 (r -> infinity), which is
/// reported with r_star = +infinity.
SurvivalReport survival_report(const SimParams& params, const SurvivalBudgets& budgets,
                               const StreamKey& key, Exec exec = Exec::parallel);

} // namespace trapsim
