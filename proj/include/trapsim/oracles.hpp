#pragma once

#include <cstddef>

#include "trapsim/estimate.hpp"
#include "trapsim/parallel.hpp"
#include "trapsim/rng.hpp"
#include "trapsim/trapfield.hpp"

// Monte Carlo counterparts of closed forms in analytics, used by the
// validation suite. Path i is drawn from key.child(i).

namespace trapsim {

/// Mean range of Brownian motion on [0, t]; bridge mode corrects both
/// extrema between grid points.
Estimate expected_range_mc(double t, std::size_t n_steps, std::size_t n_paths, const StreamKey& key,
                           SubgridMode mode, Exec exec = Exec::parallel);

/// P(sup |B| < r on [0, t]) with absorbing barriers at +-r. Bridge mode
/// averages the product of per-step no-crossing probabilities (double
/// crossings inside one step are neglected); naive mode checks grid points.
Estimate confinement_mc(double r, double t, std::size_t n_steps, std::size_t n_paths,
                        const StreamKey& key, SubgridMode mode, Exec exec = Exec::parallel);

} // namespace trapsim
