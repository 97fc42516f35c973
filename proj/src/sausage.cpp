#include "trapsim/sausage.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "trapsim/analytics.hpp"

namespace trapsim {
namespace {

void check_same_grid(const PathGrid& x, const PathGrid& y, const char* who)
{
    if (!x.same_grid(y))
        throw InvalidParameter(std::string(who) + ": paths use different grids");
}

double grid_delta(std::span<const double> x, std::span<const double> y)
{
    double sup_plus = y[0] + x[0];
    double sup_minus = y[0] - x[0];
    double sup_y = y[0];
    for (std::size_t k = 1; k < y.size(); ++k)
    {
        sup_plus = std::max(sup_plus, y[k] + x[k]);
        sup_minus = std::max(sup_minus, y[k] - x[k]);
        sup_y = std::max(sup_y, y[k]);
    }
    return sup_plus + sup_minus - 2.0 * sup_y;
}

// Each supremum gets its exact continuous-time law given the grid. The three
// share one exponential per step; only the marginals matter for the mean, and
// with X == 0 on a linear interpolation the sample is then exactly 0.
double bridge_delta(std::span<const double> x, std::span<const double> y, double dt,
                    double x_var_rate, RandomStream& draws)
{
    const double sum_rate = 1.0 + x_var_rate;
    const double scale_sum = 2.0 / (sum_rate * dt);
    const double scale_y = 2.0 / dt;

    double sup_plus = y[0] + x[0];
    double sup_minus = y[0] - x[0];
    double sup_y = y[0];
    for (std::size_t k = 1; k < y.size(); ++k)
    {
        sup_plus = std::max(sup_plus, y[k] + x[k]);
        sup_minus = std::max(sup_minus, y[k] - x[k]);
        sup_y = std::max(sup_y, y[k]);
    }

    for (std::size_t k = 1; k < y.size(); ++k)
    {
        const double p_plus = y[k - 1] + x[k - 1], c_plus = y[k] + x[k];
        const double p_minus = y[k - 1] - x[k - 1], c_minus = y[k] - x[k];
        const double g_plus = scale_sum * (sup_plus - p_plus) * (sup_plus - c_plus);
        const double g_minus = scale_sum * (sup_minus - p_minus) * (sup_minus - c_minus);
        const double g_y = scale_y * (sup_y - y[k - 1]) * (sup_y - y[k]);
        if (std::min({g_plus, g_minus, g_y}) >= kBridgeGateCutoff)
            continue;
        const double e = draws.exponential();
        if (e > g_plus)
            sup_plus = bridge_max_from_exponential(p_plus, c_plus, dt, sum_rate, e);
        if (e > g_minus)
            sup_minus = bridge_max_from_exponential(p_minus, c_minus, dt, sum_rate, e);
        if (e > g_y)
            sup_y = bridge_max_from_exponential(y[k - 1], y[k], dt, 1.0, e);
    }
    return sup_plus + sup_minus - 2.0 * sup_y;
}

// One driver sample; `driver` is the stream the driver path was drawn from.
double delta_from_driver(std::span<const double> x, std::span<const double> y, double dt,
                         const DeltaOptions& opts, const RandomStream& driver)
{
    if (opts.mode == SubgridMode::naive)
        return grid_delta(x, y);
    RandomStream draws = driver.at(kBridgeOffset);
    return bridge_delta(x, y, dt, opts.x_var_rate, draws);
}

DeltaEstimate finish(const MomentSum& m)
{
    return DeltaEstimate{m.mean(), m.std_err(), m.count};
}

void check_inner(std::size_t m_inner)
{
    if (m_inner < 2)
        throw InvalidParameter("delta_functional: m_inner must be >= 2");
}

struct OuterResult
{
    double weight = 0.0;
    double delta = 0.0;
    double delta_se = 0.0;
};

template <typename DeltaFn>
AnnealedResult annealed_impl(const SimParams& params, std::size_t n_outer, std::size_t m_inner,
                             const StreamKey& key, const AnnealedOptions& opts, Exec exec,
                             DeltaFn delta_fn)
{
    params.validate();
    if (n_outer < 2)
        throw InvalidParameter("annealed_survival_estimate: n_outer must be >= 2");
    check_inner(m_inner);
    const DeltaOptions dopts{opts.mode, 1.0};
    const auto outer = map_indices(n_outer, exec, [&](std::size_t i) {
        const StreamKey path_key = key.child(i);
        const PathGrid x = sample_brownian_path(params.t_end, params.n_steps, path_key.child(0));
        const DeltaEstimate d = delta_fn(x, m_inner, path_key.child(1), dopts);
        return OuterResult{survival_weight(d, params, opts.debias).weight, d.value, d.std_err};
    });

    MomentSum weights;
    MomentSum deltas;
    double bias_sum = 0.0;
    const double lam2 = params.lambda * params.lambda;
    for (const auto& o : outer)
    {
        weights.add(o.weight);
        deltas.add(o.delta);
        bias_sum += o.weight * lam2 * o.delta_se * o.delta_se / 2.0;
    }
    AnnealedResult r;
    r.estimate = Estimate{weights.mean(), weights.std_err(), n_outer, Method::annealed};
    r.mean_delta = deltas.mean();
    r.mean_delta_se = deltas.std_err();
    r.bias_diagnostic = bias_sum / static_cast<double>(n_outer);
    r.bias_warning = r.bias_diagnostic > r.estimate.std_err / 3.0;
    return r;
}

} // namespace

double sausage_volume_given_paths(const PathGrid& x_path, const PathGrid& y_path, double a)
{
    check_same_grid(x_path, y_path, "sausage_volume_given_paths");
    const auto x = x_path.values();
    const auto y = y_path.values();
    double hi = y[0] + x[0];
    double lo = hi;
    for (std::size_t k = 1; k < y.size(); ++k)
    {
        const double s = y[k] + x[k];
        hi = std::max(hi, s);
        lo = std::min(lo, s);
    }
    return hi - lo + 2.0 * a;
}

double delta_sample(const PathGrid& x_path, const PathGrid& y_path)
{
    check_same_grid(x_path, y_path, "delta_sample");
    return grid_delta(x_path.values(), y_path.values());
}

double delta_sample_bridge(const PathGrid& x_path, const PathGrid& y_path, double x_var_rate,
                           RandomStream& draws)
{
    check_same_grid(x_path, y_path, "delta_sample_bridge");
    return bridge_delta(x_path.values(), y_path.values(), x_path.dt(), x_var_rate, draws);
}

DeltaEstimate delta_functional(const PathGrid& x_path, std::size_t m_inner, const StreamKey& key,
                               const DeltaOptions& opts)
{
    check_inner(m_inner);
    const auto x = x_path.values();
    const double dt = x_path.dt();
    thread_local std::vector<double> y;
    y.resize(x.size());
    MomentSum acc;
    for (std::size_t j = 0; j < m_inner; ++j)
    {
        RandomStream driver(key.child(j));
        const RandomStream start = driver;
        fill_brownian_path(y, dt, driver);
        acc.add(delta_from_driver(x, y, dt, opts, start));
    }
    return finish(acc);
}

SurvivalWeight survival_weight(const DeltaEstimate& delta, const SimParams& params, bool debias)
{
    const double lam = params.lambda;
    const double fixed = analytics::expected_range(params.t_end) + 2.0 * params.a;
    SurvivalWeight w;
    w.conditional_weight = std::exp(-lam * delta.value);
    w.weight = std::exp(-lam * (fixed + delta.value));
    if (debias)
    {
        const double factor = 1.0 - lam * lam * delta.std_err * delta.std_err / 2.0;
        w.conditional_weight *= factor;
        w.weight *= factor;
    }
    return w;
}

AnnealedResult annealed_survival_estimate(const SimParams& params, std::size_t n_outer,
                                          std::size_t m_inner, const StreamKey& key,
                                          const AnnealedOptions& opts, Exec exec)
{
    return annealed_impl(params, n_outer, m_inner, key, opts, exec,
                         [](const PathGrid& x, std::size_t m, const StreamKey& k,
                            const DeltaOptions& o) { return delta_functional(x, m, k, o); });
}

namespace reference {

DeltaEstimate delta_functional(const PathGrid& x_path, std::size_t m_inner, const StreamKey& key,
                               const DeltaOptions& opts)
{
    check_inner(m_inner);
    MomentSum acc;
    for (std::size_t j = 0; j < m_inner; ++j)
    {
        const StreamKey driver_key = key.child(j);
        const PathGrid y = sample_brownian_path(x_path.t_end(), x_path.n_steps(), driver_key);
        if (opts.mode == SubgridMode::naive)
        {
            acc.add(delta_sample(x_path, y));
            continue;
        }
        RandomStream draws = RandomStream(driver_key).at(kBridgeOffset);
        acc.add(delta_sample_bridge(x_path, y, opts.x_var_rate, draws));
    }
    return finish(acc);
}

AnnealedResult annealed_survival_estimate(const SimParams& params, std::size_t n_outer,
                                          std::size_t m_inner, const StreamKey& key,
                                          const AnnealedOptions& opts)
{
    return annealed_impl(params, n_outer, m_inner, key, opts, Exec::serial,
                         [](const PathGrid& x, std::size_t m, const StreamKey& k,
                            const DeltaOptions& o) {
                             return reference::delta_functional(x, m, k, o);
                         });
}

} // namespace reference

} // namespace trapsim
