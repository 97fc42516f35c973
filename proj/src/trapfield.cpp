#include "trapsim/trapfield.hpp"

#include <cmath>

#include <boost/random/poisson_distribution.hpp>

namespace trapsim {
namespace {

// The difference X - (x_i + Y^i) of two independent unit-rate motions.
constexpr double kDifferenceVarRate = 2.0;

// exp(-37.5) < 2^-54, the smallest uniform RandomStream can return.
constexpr double kNoHitExponent = 37.5;

// Decides whether a trap at distance d_prev -> d_cur (both outside [-a, a])
// touched the particle inside the step. Draws a uniform only when the hit
// probability is representable.
bool bridge_kill(double d_prev, double d_cur, double a, double dt, RandomStream& uniforms)
{
    if ((d_prev > a) != (d_cur > a))
        return true; // jumped across the whole ball
    const double level = d_cur > a ? a : -a;
    const double gate = (d_prev - level) * (d_cur - level) / dt;
    if (gate >= kNoHitExponent)
        return false;
    return uniforms.uniform() < bridge_hit_prob(d_prev, d_cur, dt, level, kDifferenceVarRate);
}

void check_grids(const PathGrid& x_path, const SimParams& params)
{
    if (x_path.n_steps() != params.n_steps || x_path.t_end() != params.t_end)
        throw InvalidParameter("simulate_kill_time: particle path and params use different grids");
}

template <typename KillFn>
Estimate survival_fraction(const SimParams& params, std::size_t n_paths, const StreamKey& key,
                           Exec exec, KillFn kill_time)
{
    params.validate();
    if (n_paths < 1)
        throw InvalidParameter("direct_survival_estimate: n_paths must be >= 1");
    const auto survived = map_indices(n_paths, exec, [&](std::size_t i) -> int {
        const StreamKey path_key = key.child(i);
        const PathGrid x = sample_brownian_path(params.t_end, params.n_steps, path_key.child(0));
        const TrapRealization field = sample_initial_points(params, path_key.child(1));
        return kill_time(x, field) ? 0 : 1;
    });
    std::size_t alive = 0;
    for (int s : survived)
        alive += static_cast<std::size_t>(s);
    const double n = static_cast<double>(n_paths);
    const double p = static_cast<double>(alive) / n;
    return Estimate{p, std::sqrt(p * (1.0 - p) / n), n_paths, Method::direct};
}

} // namespace

std::size_t default_n_steps(double a, double t_end)
{
    const double needed = std::ceil(8.0 * t_end / (a * a));
    return std::max<std::size_t>(1024, static_cast<std::size_t>(needed));
}

double default_window(double t_end, double a, double buffer_mult)
{
    return buffer_mult * std::sqrt(2.0 * t_end) + a;
}

SimParams SimParams::make(double lambda, double a, double t_end, std::size_t n_steps,
                          double buffer_mult)
{
    SimParams p;
    p.lambda = lambda;
    p.a = a;
    p.t_end = t_end;
    p.buffer_mult = buffer_mult;
    if (a > 0.0 && t_end > 0.0)
    {
        p.n_steps = n_steps ? n_steps : default_n_steps(a, t_end);
        p.window_halfwidth = default_window(t_end, a, buffer_mult);
    }
    p.validate();
    return p;
}

void SimParams::validate() const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidParameter("SimParams: lambda must be finite and >= 0");
    if (!(a > 0.0))
        throw InvalidParameter("SimParams: trap radius a must be positive");
    if (!(t_end > 0.0))
        throw InvalidParameter("SimParams: t_end must be positive");
    if (n_steps < 1)
        throw InvalidParameter("SimParams: n_steps must be >= 1");
    if (!(buffer_mult > 0.0))
        throw InvalidParameter("SimParams: buffer_mult must be positive");
    const double min_window = default_window(t_end, a, buffer_mult);
    if (window_halfwidth < min_window * (1.0 - 1e-12))
        throw InvalidParameter("SimParams: window half-width below m*sqrt(2t) + a");
}

TrapRealization sample_initial_points(const SimParams& params, const StreamKey& key)
{
    TrapRealization field;
    const double L = params.window_halfwidth;
    const double mean = 2.0 * params.lambda * L;
    if (mean <= 0.0)
        return field;
    RandomStream stream(key);
    boost::random::poisson_distribution<std::size_t, double> poisson(mean);
    const std::size_t count = poisson(stream);
    field.initial_points.reserve(count);
    field.motion_keys.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        field.initial_points.push_back(L * (2.0 * stream.uniform() - 1.0));
        field.motion_keys.push_back(key.child(i));
    }
    return field;
}

std::optional<double> simulate_kill_time(const PathGrid& x_path, const TrapRealization& field,
                                         const SimParams& params, SubgridMode mode)
{
    check_grids(x_path, params);
    const double a = params.a;
    const double dt = x_path.dt();
    const double sd = std::sqrt(dt);
    const std::size_t n_traps = field.size();

    for (double p : field.initial_points)
        if (std::abs(p) <= a)
            return 0.0;

    std::vector<RandomStream> motion;
    std::vector<RandomStream> uniforms;
    motion.reserve(n_traps);
    if (mode == SubgridMode::bridge)
        uniforms.reserve(n_traps);
    for (const auto& k : field.motion_keys)
    {
        motion.emplace_back(k);
        if (mode == SubgridMode::bridge)
            uniforms.push_back(motion.back().at(kBridgeOffset));
    }
    std::vector<double> drift(n_traps, 0.0);
    std::vector<double> gap(n_traps);
    for (std::size_t i = 0; i < n_traps; ++i)
        gap[i] = -field.initial_points[i];

    for (std::size_t k = 1; k <= x_path.n_steps(); ++k)
    {
        const double xk = x_path[k];
        for (std::size_t i = 0; i < n_traps; ++i)
        {
            drift[i] += sd * motion[i].normal();
            const double d = xk - (field.initial_points[i] + drift[i]);
            if (std::abs(d) <= a)
                return dt * static_cast<double>(k);
            if (mode == SubgridMode::bridge && bridge_kill(gap[i], d, a, dt, uniforms[i]))
                return dt * static_cast<double>(k);
            gap[i] = d;
        }
    }
    return std::nullopt;
}

Estimate direct_survival_estimate(const SimParams& params, std::size_t n_paths,
                                  const StreamKey& key, SubgridMode mode, Exec exec)
{
    return survival_fraction(params, n_paths, key, exec,
                             [&](const PathGrid& x, const TrapRealization& field) {
                                 return simulate_kill_time(x, field, params, mode);
                             });
}

namespace reference {

std::optional<double> simulate_kill_time(const PathGrid& x_path, const TrapRealization& field,
                                         const SimParams& params, SubgridMode mode)
{
    check_grids(x_path, params);
    const double a = params.a;
    const double dt = x_path.dt();
    const std::size_t n_traps = field.size();

    std::vector<PathGrid> trap_paths;
    std::vector<RandomStream> uniforms;
    for (const auto& k : field.motion_keys)
    {
        trap_paths.push_back(sample_brownian_path(params.t_end, params.n_steps, k));
        uniforms.push_back(RandomStream(k).at(kBridgeOffset));
    }

    for (std::size_t k = 0; k <= x_path.n_steps(); ++k)
    {
        for (std::size_t i = 0; i < n_traps; ++i)
        {
            const double d = x_path[k] - (field.initial_points[i] + trap_paths[i][k]);
            if (std::abs(d) <= a)
                return dt * static_cast<double>(k);
            if (k == 0 || mode != SubgridMode::bridge)
                continue;
            const double d_prev = x_path[k - 1] - (field.initial_points[i] + trap_paths[i][k - 1]);
            if (bridge_kill(d_prev, d, a, dt, uniforms[i]))
                return dt * static_cast<double>(k);
        }
    }
    return std::nullopt;
}

Estimate direct_survival_estimate(const SimParams& params, std::size_t n_paths,
                                  const StreamKey& key, SubgridMode mode)
{
    return survival_fraction(params, n_paths, key, Exec::serial,
                             [&](const PathGrid& x, const TrapRealization& field) {
                                 return reference::simulate_kill_time(x, field, params, mode);
                             });
}

} // namespace reference

} // namespace trapsim
