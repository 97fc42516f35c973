#include "trapsim/path.hpp"

#include <cmath>

namespace trapsim {

PathGrid::PathGrid(double t_end, std::vector<double> values)
    : t_end_(t_end), values_(std::move(values))
{
    if (!(t_end_ > 0.0))
        throw InvalidParameter("PathGrid: t_end must be positive");
    if (values_.size() < 2)
        throw InvalidParameter("PathGrid: need at least one step");
    if (values_.front() != 0.0)
        throw InvalidParameter("PathGrid: path must start at 0");
}

void fill_brownian_path(std::span<double> out, double dt, RandomStream& stream)
{
    const double sd = std::sqrt(dt);
    double x = 0.0;
    out[0] = 0.0;
    for (std::size_t k = 1; k < out.size(); ++k)
    {
        x += sd * stream.normal();
        out[k] = x;
    }
}

PathGrid sample_brownian_path(double t_end, std::size_t n_steps, const StreamKey& key)
{
    if (!(t_end > 0.0))
        throw InvalidParameter("sample_brownian_path: t_end must be positive");
    if (n_steps < 1)
        throw InvalidParameter("sample_brownian_path: n_steps must be >= 1");
    std::vector<double> v(n_steps + 1);
    RandomStream stream(key);
    fill_brownian_path(v, t_end / static_cast<double>(n_steps), stream);
    return PathGrid(t_end, std::move(v));
}

double bridge_hit_prob(double x0, double x1, double dt, double level, double var_rate)
{
    if (!(dt > 0.0) || !(var_rate > 0.0))
        throw InvalidParameter("bridge_hit_prob: dt and var_rate must be positive");
    const double d0 = x0 - level;
    const double d1 = x1 - level;
    if (d0 * d1 <= 0.0)
        return 1.0;
    return std::exp(-2.0 * d0 * d1 / (var_rate * dt));
}

double bridge_max_sample(double x0, double x1, double dt, double var_rate, double u) noexcept
{
    const double h = x1 - x0;
    return 0.5 * (x0 + x1 + std::sqrt(h * h - 2.0 * var_rate * dt * std::log(u)));
}

Extrema path_extrema(const PathGrid& p)
{
    const auto v = p.values();
    Extrema e{v[0], v[0], 0.0};
    std::size_t arg = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
    {
        if (v[k] > e.max)
        {
            e.max = v[k];
            arg = k;
        }
        e.min = std::min(e.min, v[k]);
    }
    e.argmax_time = p.dt() * static_cast<double>(arg);
    return e;
}

Extrema path_extrema_bridge(const PathGrid& p, double var_rate, RandomStream& stream)
{
    Extrema e = path_extrema(p);
    const auto v = p.values();
    const std::size_t n = p.n_steps();
    e.max = bridge_corrected_max([&](std::size_t k) { return v[k]; }, n, p.dt(), var_rate, stream);
    e.min = -bridge_corrected_max([&](std::size_t k) { return -v[k]; }, n, p.dt(), var_rate, stream);
    return e;
}

double interval_range(const PathGrid& p, double s0, double s1)
{
    if (!(0.0 <= s0 && s0 < s1 && s1 <= p.t_end()))
        throw InvalidParameter("interval_range: need 0 <= s0 < s1 <= t_end");
    const double dt = p.dt();
    const auto i0 = static_cast<std::size_t>(std::llround(s0 / dt));
    const auto i1 = std::min(static_cast<std::size_t>(std::llround(s1 / dt)), p.n_steps());
    if (i1 <= i0)
        throw InvalidParameter("interval_range: window is empty after snapping to the grid");
    const auto v = p.values().subspan(i0, i1 - i0 + 1);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

double occupation_time(const PathGrid& p, double lo, double hi)
{
    if (!(lo < hi))
        throw InvalidParameter("occupation_time: need lo < hi");
    const auto v = p.values();
    std::size_t count = 0;
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
        count += (lo < v[k] && v[k] < hi) ? 1 : 0;
    return p.dt() * static_cast<double>(count);
}

} // namespace trapsim
