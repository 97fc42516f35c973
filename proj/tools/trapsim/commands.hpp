#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace trapsim::cli {

enum ExitCode : int
{
    kExitOk = 0,
    kExitValidationFailed = 1,
    kExitUsage = 2, ///< bad flags, malformed config, invalid parameters
    kExitIo = 3,
    kExitInternal = 4,
};

/// Oracle suite; writes validate.csv and validate.json. Returns
/// kExitValidationFailed when any check fails.
int run_validate(const ExperimentConfig& c);

/// One row per t in t_grid: direct, annealed and lower-bound routes.
int run_survival(const ExperimentConfig& c);

/// One row per t of conditional-on-survival statistics; with three or more
/// times also the exponent fit of the weighted median.
int run_conditional(const ExperimentConfig& c);

/// conditional rows plus trend statistics and the exponent fit (needs >= 3 t).
int run_trend(const ExperimentConfig& c);

/// Evaluates one closed form, e.g. {"argmax_density", "0.5", "1.0"}.
int run_analytics(const std::vector<std::string>& query, std::ostream& out);

} // namespace trapsim::cli
