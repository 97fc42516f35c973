#include "trapsim/oracles.hpp"

#include <cmath>
#include <vector>

#include "trapsim/path.hpp"

namespace trapsim {
namespace {

Estimate mean_of(const std::vector<double>& x, Method m)
{
    MomentSum s;
    for (double v : x)
        s.add(v);
    return Estimate{s.mean(), s.std_err(), x.size(), m};
}

} // namespace

Estimate expected_range_mc(double t, std::size_t n_steps, std::size_t n_paths, const StreamKey& key,
                           SubgridMode mode, Exec exec)
{
    if (n_paths < 2)
        throw InvalidParameter("expected_range_mc: n_paths must be >= 2");
    const auto ranges = map_indices(n_paths, exec, [&](std::size_t i) {
        const StreamKey k = key.child(i);
        const PathGrid p = sample_brownian_path(t, n_steps, k);
        if (mode == SubgridMode::naive)
            return path_extrema(p).range();
        RandomStream draws = RandomStream(k).at(kBridgeOffset);
        return path_extrema_bridge(p, 1.0, draws).range();
    });
    return mean_of(ranges, Method::direct);
}

Estimate confinement_mc(double r, double t, std::size_t n_steps, std::size_t n_paths,
                        const StreamKey& key, SubgridMode mode, Exec exec)
{
    if (!(r > 0.0) || n_paths < 2)
        throw InvalidParameter("confinement_mc: need r > 0 and n_paths >= 2");
    const auto alive = map_indices(n_paths, exec, [&](std::size_t i) {
        const PathGrid p = sample_brownian_path(t, n_steps, key.child(i));
        const double dt = p.dt();
        double stay = 1.0;
        for (std::size_t k = 1; k <= n_steps; ++k)
        {
            const double x0 = p[k - 1];
            const double x1 = p[k];
            if (std::abs(x1) >= r)
                return 0.0;
            if (mode == SubgridMode::bridge)
                stay *= (1.0 - bridge_hit_prob(x0, x1, dt, r, 1.0))
                        * (1.0 - bridge_hit_prob(x0, x1, dt, -r, 1.0));
        }
        return stay;
    });
    return mean_of(alive, Method::direct);
}

} // namespace trapsim
