#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "trapsim/estimate.hpp"
#include "trapsim/parallel.hpp"
#include "trapsim/path.hpp"
#include "trapsim/rng.hpp"

namespace trapsim {

/// How sub-grid excursions are treated. `naive` looks at grid points only;
/// `bridge` adds the exact Brownian-bridge correction between grid points
/// (stochastic kills in the trap simulation, continuous-time suprema in the
/// sausage functional).
enum class SubgridMode
{
    naive,
    bridge
};

/// Physical and numerical parameters of one trap-field configuration.
struct SimParams
{
    double lambda = 1.0;          ///< trap points per unit length
    double a = 0.1;               ///< trap radius
    double t_end = 1.0;
    std::size_t n_steps = 1024;
    double window_halfwidth = 0.0; ///< traps born outside [-L, L] are ignored
    double buffer_mult = 6.0;

    /// Fills n_steps (when 0) and the window from the defaults:
    /// dt <= min(a^2/8, t/1024) and L = m sqrt(2t) + a.
    static SimParams make(double lambda, double a, double t_end, std::size_t n_steps = 0,
                          double buffer_mult = 6.0);

    double dt() const noexcept { return t_end / static_cast<double>(n_steps); }
    void validate() const;
};

std::size_t default_n_steps(double a, double t_end);
double default_window(double t_end, double a, double buffer_mult);

/// Initial trap positions and the key of each trap's driving motion.
struct TrapRealization
{
    std::vector<double> initial_points;
    std::vector<StreamKey> motion_keys;

    std::size_t size() const noexcept { return initial_points.size(); }
};

TrapRealization sample_initial_points(const SimParams& params, const StreamKey& key);

/// First grid time at which some trap is within distance a of the particle;
/// nullopt when the particle survives to t_end. Trap motions are generated
/// step by step from their keys and stop with the first kill.
std::optional<double> simulate_kill_time(const PathGrid& x_path, const TrapRealization& field,
                                         const SimParams& params, SubgridMode mode);

/// Fraction of independent (particle, field) realizations surviving to t_end.
Estimate direct_survival_estimate(const SimParams& params, std::size_t n_paths,
                                  const StreamKey& key, SubgridMode mode,
                                  Exec exec = Exec::parallel);

namespace reference {

/// Same result as simulate_kill_time, computed by materializing every trap
/// path up front with sample_brownian_path.
std::optional<double> simulate_kill_time(const PathGrid& x_path, const TrapRealization& field,
                                         const SimParams& params, SubgridMode mode);

Estimate direct_survival_estimate(const SimParams& params, std::size_t n_paths,
                                  const StreamKey& key, SubgridMode mode);

} // namespace reference

} // namespace trapsim
