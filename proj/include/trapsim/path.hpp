#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "trapsim/error.hpp"
#include "trapsim/rng.hpp"

namespace trapsim {

/// A path sampled on the uniform grid {0, dt, ..., t_end}; values[0] == 0.
class PathGrid
{
  public:
    PathGrid(double t_end, std::vector<double> values);

    double t_end() const noexcept { return t_end_; }
    std::size_t n_steps() const noexcept { return values_.size() - 1; }
    double dt() const noexcept { return t_end_ / static_cast<double>(n_steps()); }

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    bool same_grid(const PathGrid& other) const noexcept
    {
        return t_end_ == other.t_end_ && values_.size() == other.values_.size();
    }

  private:
    double t_end_;
    std::vector<double> values_;
};

struct Extrema
{
    double max = 0.0;
    double min = 0.0;
    double argmax_time = 0.0;

    /// Maximal displacement from the origin, max(max, -min).
    double displacement() const noexcept { return max > -min ? max : -min; }
    double range() const noexcept { return max - min; }
};

PathGrid sample_brownian_path(double t_end, std::size_t n_steps, const StreamKey& key);

/// Fills `out` (size n_steps + 1) with a standard Brownian path drawn from
/// `stream`. Same draws, in the same order, as sample_brownian_path.
void fill_brownian_path(std::span<double> out, double dt, RandomStream& stream);

/// Probability that a Brownian bridge with variance rate `var_rate` from x0
/// to x1 over time dt touches `level`. Returns 1 when an endpoint is at or
/// beyond the level.
double bridge_hit_prob(double x0, double x1, double dt, double level, double var_rate);

/// Draws the maximum of a Brownian bridge from x0 to x1 over time dt given a
/// uniform u in (0, 1), by inverting P(M > m) = exp(-2(m-x0)(m-x1)/(var_rate dt)).
double bridge_max_sample(double x0, double x1, double dt, double var_rate, double u) noexcept;

/// The same inversion written in terms of e = -log(u), a unit exponential.
inline double bridge_max_from_exponential(double x0, double x1, double dt, double var_rate,
                                          double e) noexcept
{
    const double h = x1 - x0;
    return 0.5 * (x0 + x1 + std::sqrt(h * h + 2.0 * var_rate * dt * e));
}

/// Bridge maxima exceed `level` with probability exp(-gate); steps whose gate
/// is above this are skipped without drawing (neglects events of
/// probability below e^-37.5 per step).
inline constexpr double kBridgeGateCutoff = 37.5;

/// Sample of the continuous-time supremum of a Brownian motion (with the
/// given variance rate) observed at the grid points `at(0..n)`.
///
/// A step's bridge beats the running candidate `best` iff its exponential
/// draw exceeds gate = 2 (best - x0)(best - x1) / (var_rate dt), so only
/// steps near the maximum consume randomness and the square root is taken
/// only on an actual improvement.
template <typename At>
double bridge_corrected_max(At&& at, std::size_t n, double dt, double var_rate,
                            RandomStream& stream)
{
    double best = at(0);
    for (std::size_t k = 1; k <= n; ++k)
        best = std::max(best, at(k));

    const double scale = 2.0 / (var_rate * dt);
    double prev = at(0);
    for (std::size_t k = 1; k <= n; ++k)
    {
        const double cur = at(k);
        const double gate = scale * (best - prev) * (best - cur);
        if (gate < kBridgeGateCutoff)
        {
            const double e = stream.exponential();
            if (e > gate)
                best = bridge_max_from_exponential(prev, cur, dt, var_rate, e);
        }
        prev = cur;
    }
    return best;
}

Extrema path_extrema(const PathGrid& p);

/// Extrema with the sub-grid Brownian-bridge correction applied to max and
/// min (the argmax time stays on the grid).
Extrema path_extrema_bridge(const PathGrid& p, double var_rate, RandomStream& stream);

/// max - min over the grid window nearest to [s0, s1].
double interval_range(const PathGrid& p, double s0, double s1);

/// Time spent strictly inside (lo, hi), left-endpoint rule.
double occupation_time(const PathGrid& p, double lo, double hi);

} // namespace trapsim
