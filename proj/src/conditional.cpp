#include "trapsim/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <boost/random/uniform_int_distribution.hpp>

namespace trapsim {
namespace {

constexpr std::uint64_t kBootstrapBranch = std::uint64_t{1} << 63;
constexpr double kDegenerateNeff = 50.0;

// Grid indices where a step brackets `level`, each snapped to the nearer end.
std::vector<std::size_t> attainments(std::span<const double> v, double level)
{
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k < v.size(); ++k)
    {
        const double d0 = v[k - 1] - level;
        const double d1 = v[k] - level;
        if (d0 * d1 > 0.0)
            continue;
        const std::size_t idx = std::abs(d0) <= std::abs(d1) ? k - 1 : k;
        if (out.empty() || out.back() != idx)
            out.push_back(idx);
    }
    return out;
}

bool traversal_on_side(const PathGrid& x, double sign, double norm, const EventParamsA& p)
{
    const auto gap = min_traversal_time(x.values(), x.dt(), sign * p.kappa * norm, sign * norm);
    const double allowed = p.k_diff * std::pow((1.0 - p.kappa) * norm, 2);
    return gap && *gap <= allowed;
}

bool occupation_on_side(const PathGrid& x, double sign, double norm, const EventParamsA& p)
{
    const double lo = p.kappa * norm;
    const double time = sign > 0.0 ? occupation_time(x, lo, norm) : occupation_time(x, -norm, -lo);
    return time >= p.epsilon * x.t_end();
}

double block_range(std::span<const double> v, double dt, double s0, double s1)
{
    const std::size_t n = v.size() - 1;
    auto i0 = static_cast<std::size_t>(std::llround(s0 / dt));
    auto i1 = static_cast<std::size_t>(std::llround(s1 / dt));
    i0 = std::min(i0, n - 1);
    i1 = std::clamp(i1, i0 + 1, n);
    const auto [lo, hi] = std::minmax_element(v.begin() + i0, v.begin() + i1 + 1);
    return *hi - *lo;
}

// Values sorted ascending with their weights carried along; `order` maps
// sorted position to original index.
struct SortedSeries
{
    std::vector<double> values;
    std::vector<double> weights;
    std::vector<std::size_t> order;

    SortedSeries(std::span<const double> v, std::span<const double> w)
        : order(v.size())
    {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        values.reserve(v.size());
        weights.reserve(v.size());
        for (std::size_t i : order)
        {
            values.push_back(v[i]);
            weights.push_back(w[i]);
        }
    }

    // Weighted median when every sample i appears counts[order[k]] times.
    double median(const std::vector<std::uint32_t>& counts, bool weighted) const
    {
        double total = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k)
            total += counts[order[k]] * (weighted ? weights[k] : 1.0);
        const double target = 0.5 * total;
        double cum = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k)
        {
            cum += counts[order[k]] * (weighted ? weights[k] : 1.0);
            if (cum >= target && counts[order[k]] > 0)
                return values[k];
        }
        return values.back();
    }
};

std::vector<std::uint32_t> resample_counts(std::size_t n, RandomStream& stream)
{
    std::vector<std::uint32_t> counts(n, 0);
    boost::random::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i)
        ++counts[pick(stream)];
    return counts;
}

double sample_sd(const std::vector<double>& x)
{
    MomentSum m;
    for (double v : x)
        m.add(v);
    return std::sqrt(m.variance());
}

double ols_slope(std::span<const double> x, std::span<const double> y, double* intercept = nullptr)
{
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    if (intercept)
        *intercept = my - slope * mx;
    return slope;
}

double sorted_quantile(const std::vector<double>& sorted, double q)
{
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= sorted.size())
        return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

EventSummary summarize(const std::vector<char>& flags, std::span<const double> weights,
                       std::span<const double> ones)
{
    return EventSummary{weighted_proportion(flags, weights), weighted_proportion(flags, ones)};
}

} // namespace

double max_displacement(const Extrema& e) noexcept
{
    return std::max(e.max, -e.min);
}

void EventParamsA::validate() const
{
    if (!(kappa > 0.0 && kappa < 1.0))
        throw InvalidParameter("EventParamsA: kappa must lie in (0, 1)");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw InvalidParameter("EventParamsA: epsilon must lie in (0, 1]");
    if (!(k_diff > 0.0))
        throw InvalidParameter("EventParamsA: k_diff must be positive");
}

void EventParamsB::validate() const
{
    if (!(epsilon > 0.0))
        throw InvalidParameter("EventParamsB: epsilon must be positive");
    if (!(k_diff > 0.0))
        throw InvalidParameter("EventParamsB: k_diff must be positive");
    if (!(f_exponent > 0.0 && f_exponent < 1.0 / 3.0))
        throw InvalidParameter("EventParamsB: f_exponent must lie in (0, 1/3)");
}

std::string_view to_string(Via v) noexcept
{
    switch (v)
    {
    case Via::none: return "none";
    case Via::traversal: return "traversal";
    case Via::occupation: return "occupation";
    }
    return "unknown";
}

std::optional<double> min_traversal_time(std::span<const double> v, double dt, double lo, double hi)
{
    const auto a = attainments(v, lo);
    const auto b = attainments(v, hi);
    if (a.empty() || b.empty())
        return std::nullopt;
    std::size_t best = v.size();
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size())
    {
        const std::size_t gap = a[i] > b[j] ? a[i] - b[j] : b[j] - a[i];
        best = std::min(best, gap);
        if (a[i] < b[j])
            ++i;
        else
            ++j;
    }
    return dt * static_cast<double>(best);
}

EventAResult event_A_indicator(const PathGrid& x_path, const EventParamsA& p)
{
    p.validate();
    const Extrema e = path_extrema(x_path);
    const double norm = max_displacement(e);
    if (norm <= 0.0)
        return {};
    std::vector<double> sides;
    if (e.max >= -e.min)
        sides.push_back(1.0);
    if (-e.min >= e.max)
        sides.push_back(-1.0);
    for (double s : sides)
        if (traversal_on_side(x_path, s, norm, p))
            return {true, Via::traversal};
    for (double s : sides)
        if (occupation_on_side(x_path, s, norm, p))
            return {true, Via::occupation};
    return {};
}

EventBResult event_B_indicator(const PathGrid& x_path, const EventParamsB& p)
{
    p.validate();
    const double t = x_path.t_end();
    const double f = std::pow(t, p.f_exponent);
    const double block = std::pow(t, 2.0 / 3.0) * f;
    if (block > t)
        return {};
    const double threshold = p.k_diff * std::cbrt(t) * std::sqrt(f);
    const auto needed = static_cast<std::size_t>(std::ceil(p.epsilon * std::cbrt(t) / f));
    const auto v = x_path.values();
    const double dt = x_path.dt();

    std::size_t best = 0;
    const int n_offsets = p.greedy_offsets ? 4 : 1;
    for (int o = 0; o < n_offsets; ++o)
    {
        const double start = 0.25 * o * block;
        std::size_t count = 0;
        for (std::size_t j = 0;; ++j)
        {
            const double s0 = start + static_cast<double>(j) * block;
            const double s1 = s0 + block;
            if (s1 > t * (1.0 + 1e-12))
                break;
            if (block_range(v, dt, s0, std::min(s1, t)) >= threshold)
                ++count;
        }
        best = std::max(best, count);
    }
    return {best >= needed, best};
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q)
{
    if (values.empty() || values.size() != weights.size())
        throw InvalidParameter("weighted_quantile: need equal-length non-empty inputs");
    if (!(q >= 0.0 && q <= 1.0))
        throw InvalidParameter("weighted_quantile: q must lie in [0, 1]");
    const SortedSeries s(values, weights);
    const double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
    double cum = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k)
    {
        cum += s.weights[k];
        if (cum >= q * total && s.weights[k] > 0.0)
            return s.values[k];
    }
    return s.values.back();
}

double effective_sample_size(std::span<const double> weights)
{
    double sum = 0.0, sum_sq = 0.0;
    for (double w : weights)
    {
        sum += w;
        sum_sq += w * w;
    }
    return sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
}

Proportion weighted_proportion(std::span<const char> flags, std::span<const double> weights)
{
    if (flags.size() != weights.size() || flags.empty())
        throw InvalidParameter("weighted_proportion: need equal-length non-empty inputs");
    double sw = 0.0, swi = 0.0;
    for (std::size_t i = 0; i < flags.size(); ++i)
    {
        sw += weights[i];
        swi += flags[i] ? weights[i] : 0.0;
    }
    const double p = swi / sw;
    double var = 0.0;
    for (std::size_t i = 0; i < flags.size(); ++i)
    {
        const double d = (flags[i] ? 1.0 : 0.0) - p;
        var += weights[i] * weights[i] * d * d;
    }
    return Proportion{p, std::sqrt(var) / sw};
}

ExponentFit exponent_fit(std::span<const double> t_grid, std::span<const double> medians)
{
    if (t_grid.size() < 3 || t_grid.size() != medians.size())
        throw InvalidParameter("exponent_fit: need at least 3 (t, median) points");
    std::vector<double> lt, lm;
    for (std::size_t i = 0; i < t_grid.size(); ++i)
    {
        if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
            throw InvalidParameter("exponent_fit: t grid must be positive and strictly increasing");
        if (!(medians[i] > 0.0))
            throw InvalidParameter("exponent_fit: medians must be positive");
        lt.push_back(std::log(t_grid[i]));
        lm.push_back(std::log(medians[i]));
    }
    ExponentFit fit;
    fit.slope = ols_slope(lt, lm, &fit.intercept);
    fit.ci_lo = fit.ci_hi = fit.slope;
    fit.t_grid.assign(t_grid.begin(), t_grid.end());
    fit.medians.assign(medians.begin(), medians.end());
    return fit;
}

ExponentFit exponent_fit(const std::vector<MedianSeriesPoint>& points, const StreamKey& key,
                         std::size_t n_boot, Exec exec)
{
    std::vector<double> t_grid, medians;
    std::vector<SortedSeries> series;
    for (const auto& pt : points)
    {
        if (pt.values.empty() || pt.values.size() != pt.weights.size())
            throw InvalidParameter("exponent_fit: each point needs equal-length non-empty samples");
        t_grid.push_back(pt.t);
        medians.push_back(weighted_quantile(pt.values, pt.weights, 0.5));
        series.emplace_back(pt.values, pt.weights);
    }
    ExponentFit fit = exponent_fit(t_grid, medians);
    if (n_boot < 2)
        return fit;

    std::vector<double> lt(t_grid.size());
    for (std::size_t j = 0; j < t_grid.size(); ++j)
        lt[j] = std::log(t_grid[j]);
    std::vector<double> slopes = map_indices(n_boot, exec, [&](std::size_t b) {
        RandomStream stream(key.child(b));
        std::vector<double> lm(series.size());
        for (std::size_t j = 0; j < series.size(); ++j)
        {
            const auto counts = resample_counts(series[j].values.size(), stream);
            lm[j] = std::log(series[j].median(counts, true));
        }
        return ols_slope(lt, lm);
    });
    std::sort(slopes.begin(), slopes.end());
    fit.ci_lo = sorted_quantile(slopes, 0.025);
    fit.ci_hi = sorted_quantile(slopes, 0.975);
    fit.ci_halfwidth = 0.5 * (fit.ci_hi - fit.ci_lo);
    return fit;
}

WeightedSample weighted_sample(const SimParams& params, std::size_t m_inner, const StreamKey& key,
                               const EventParamsA& ea, const EventParamsB& eb, SubgridMode mode)
{
    const StreamKey x_key = key.child(0);
    const PathGrid x = sample_brownian_path(params.t_end, params.n_steps, x_key);
    Extrema e;
    if (mode == SubgridMode::bridge)
    {
        RandomStream draws = RandomStream(x_key).at(kBridgeOffset);
        e = path_extrema_bridge(x, 1.0, draws);
    }
    else
    {
        e = path_extrema(x);
    }
    const DeltaEstimate d = delta_functional(x, m_inner, key.child(1), DeltaOptions{mode, 1.0});

    WeightedSample s;
    s.max_disp = max_displacement(e);
    s.running_max = e.max;
    s.argmax_time = e.argmax_time;
    s.weight = std::exp(-params.lambda * d.value);
    s.delta = d.value;
    s.delta_se = d.std_err;
    const EventAResult a = event_A_indicator(x, ea);
    s.event_a = a.flag;
    s.a_traversal = a.via == Via::traversal;
    s.a_occupation = a.via == Via::occupation;
    const double scale = std::pow(params.t_end, 4.0 / 9.0);
    for (std::size_t c = 0; c < kThresholdMults.size(); ++c)
        s.event_a_threshold[c] = a.flag && s.max_disp >= kThresholdMults[c] * scale;
    const EventBResult b = event_B_indicator(x, eb);
    s.event_b = b.flag;
    s.b_count = b.qualifying_count;
    return s;
}

ConditionalSummary conditional_statistics(const SimParams& params, std::size_t n_outer,
                                          std::size_t m_inner, const EventParamsA& ea,
                                          const EventParamsB& eb, const StreamKey& key,
                                          const ConditionalOptions& opts, Exec exec)
{
    params.validate();
    ea.validate();
    eb.validate();
    if (n_outer < 100)
        throw InvalidParameter("conditional_statistics: n_outer must be >= 100");
    if (m_inner < 2)
        throw InvalidParameter("conditional_statistics: m_inner must be >= 2");

    ConditionalSummary out;
    out.t = params.t_end;
    out.n_outer = n_outer;
    out.m_inner = m_inner;
    out.samples = map_indices(n_outer, exec, [&](std::size_t i) {
        return weighted_sample(params, m_inner, key.child(i), ea, eb, opts.mode);
    });

    std::vector<double> disp(n_outer), w(n_outer), ones(n_outer, 1.0);
    std::vector<char> fa(n_outer), fb(n_outer);
    std::array<std::vector<char>, 3> fat;
    for (auto& v : fat)
        v.resize(n_outer);
    MomentSum deltas;
    for (std::size_t i = 0; i < n_outer; ++i)
    {
        const WeightedSample& s = out.samples[i];
        disp[i] = s.max_disp;
        w[i] = s.weight;
        fa[i] = s.event_a;
        fb[i] = s.event_b;
        for (std::size_t c = 0; c < 3; ++c)
            fat[c][i] = s.event_a_threshold[c];
        deltas.add(s.delta);
    }
    out.mean_delta = deltas.mean();
    out.n_eff = effective_sample_size(w);
    out.degenerate_weights = out.n_eff < kDegenerateNeff;
    for (std::size_t q = 0; q < kQuantileLevels.size(); ++q)
    {
        out.weighted_quantiles[q] = weighted_quantile(disp, w, kQuantileLevels[q]);
        out.unweighted_quantiles[q] = weighted_quantile(disp, ones, kQuantileLevels[q]);
    }
    out.median_diff = out.weighted_quantiles[2] - out.unweighted_quantiles[2];

    out.event_a = summarize(fa, w, ones);
    for (std::size_t c = 0; c < 3; ++c)
        out.event_a_threshold[c] = summarize(fat[c], w, ones);
    out.event_b = summarize(fb, w, ones);

    if (opts.n_boot >= 2)
    {
        const SortedSeries series(disp, w);
        struct Boot
        {
            double weighted = 0.0;
            double unweighted = 0.0;
        };
        const StreamKey boot_key = key.child(kBootstrapBranch);
        const auto boots = map_indices(opts.n_boot, exec, [&](std::size_t b) {
            RandomStream stream(boot_key.child(b));
            const auto counts = resample_counts(n_outer, stream);
            return Boot{series.median(counts, true), series.median(counts, false)};
        });
        std::vector<double> wm, um, diff;
        for (const Boot& b : boots)
        {
            wm.push_back(b.weighted);
            um.push_back(b.unweighted);
            diff.push_back(b.weighted - b.unweighted);
        }
        out.weighted_median_se = sample_sd(wm);
        out.unweighted_median_se = sample_sd(um);
        out.median_diff_se = sample_sd(diff);
    }
    return out;
}

double weighted_kendall_tau(const std::vector<TrendPoint>& points)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        for (std::size_t j = i + 1; j < points.size(); ++j)
        {
            const TrendPoint& a = points[i];
            const TrendPoint& b = points[j];
            const double var = a.std_err * a.std_err + b.std_err * b.std_err;
            const double w = var > 0.0 ? 1.0 / var : 1.0;
            const double dv = b.value - a.value;
            const double dt = b.t - a.t;
            double sign = 0.0;
            if (std::abs(dv) > 3.0 * std::sqrt(var) && dt != 0.0)
                sign = (dv > 0.0) == (dt > 0.0) ? 1.0 : -1.0;
            num += w * sign;
            den += w;
        }
    }
    return den > 0.0 ? num / den : 0.0;
}

TrendReport theorem_trend_report(double lambda, double a, const std::vector<double>& t_grid,
                                 std::size_t n_steps, std::size_t n_outer, std::size_t m_inner,
                                 const EventParamsA& ea, const EventParamsB& eb,
                                 const StreamKey& key, const ConditionalOptions& opts, Exec exec)
{
    if (t_grid.size() < 3)
        throw InvalidParameter("theorem_trend_report: need at least 3 times");
    TrendReport rep;
    for (std::size_t j = 0; j < t_grid.size(); ++j)
    {
        const SimParams params = SimParams::make(lambda, a, t_grid[j], n_steps);
        rep.per_t.push_back(conditional_statistics(params, n_outer, m_inner, ea, eb, key.child(j), opts, exec));
    }

    auto trend = [&](auto get) {
        std::vector<TrendPoint> pts;
        for (const auto& s : rep.per_t)
        {
            const Proportion p = get(s);
            pts.push_back(TrendPoint{s.t, p.value, p.std_err});
        }
        return weighted_kendall_tau(pts);
    };
    for (std::size_t c = 0; c < 3; ++c)
        rep.tau_a_threshold[c] = trend([&](const ConditionalSummary& s) { return s.event_a_threshold[c].conditional; });
    rep.tau_b = trend([](const ConditionalSummary& s) { return s.event_b.conditional; });

    std::vector<MedianSeriesPoint> series;
    for (const auto& s : rep.per_t)
    {
        MedianSeriesPoint pt{s.t, {}, {}};
        for (const auto& smp : s.samples)
        {
            pt.values.push_back(smp.max_disp);
            pt.weights.push_back(smp.weight);
        }
        series.push_back(std::move(pt));
    }
    rep.median_fit = exponent_fit(series, key.child(t_grid.size()), opts.n_fit_boot, exec);
    return rep;
}

} // namespace trapsim
