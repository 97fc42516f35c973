#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "trapsim/parallel.hpp"
#include "trapsim/path.hpp"
#include "trapsim/rng.hpp"
#include "trapsim/sausage.hpp"
#include "trapsim/trapfield.hpp"

namespace trapsim {

/// ||X||_t = max(sup X, -inf X).
double max_displacement(const Extrema& e) noexcept;

// ---- traversal / occupation event ---------------------------------------

struct EventParamsA
{
    double kappa = 0.5;   ///< lower level as a fraction of ||X||_t, in (0, 1)
    double epsilon = 0.5; ///< occupation fraction of t, in (0, 1]
    double k_diff = 1.0;  ///< allowed crossing time is k ((1 - kappa) ||X||_t)^2

    void validate() const;
};

enum class Via
{
    none,
    traversal,
    occupation
};

std::string_view to_string(Via v) noexcept;

struct EventAResult
{
    bool flag = false;
    Via via = Via::none;
};

/// X runs from kappa ||X||_t to ||X||_t at least diffusively fast, or spends
/// at least epsilon t strictly between the two levels. Evaluated on the side
/// of the origin where ||X||_t is attained (both sides on an exact tie).
EventAResult event_A_indicator(const PathGrid& x_path, const EventParamsA& p);

/// Smallest |tau_1 - tau_2| over grid times attaining levels lo and hi. A step
/// that brackets a level attains it at whichever endpoint is nearer. Empty
/// when either level is never bracketed.
std::optional<double> min_traversal_time(std::span<const double> v, double dt, double lo, double hi);

// ---- disjoint wide-range blocks event ------------------------------------

struct EventParamsB
{
    double epsilon = 0.5;
    /// Block ranges scale like the threshold, so k alone sets the free-path
    /// qualifying rate (about 0.3 per block at 1.5).
    double k_diff = 1.5;
    double f_exponent = 0.1; ///< f(t) = t^f_exponent, in (0, 1/3)
    /// Also try partitions shifted by 1/4, 1/2 and 3/4 of a block and keep
    /// the best count.
    bool greedy_offsets = false;

    void validate() const;
};

struct EventBResult
{
    bool flag = false;
    std::size_t qualifying_count = 0;
};

/// Blocks of length t^{2/3} f(t) partition [0, t] (a trailing partial block is
/// dropped); a block qualifies when the range of X over it is at least
/// k t^{1/3} sqrt(f(t)). The flag needs ceil(epsilon t^{1/3} / f(t)) of them.
EventBResult event_B_indicator(const PathGrid& x_path, const EventParamsB& p);

// ---- weighted statistics -------------------------------------------------

/// Smallest value whose normalized cumulative weight reaches q.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q);

/// (sum w)^2 / sum w^2
double effective_sample_size(std::span<const double> weights);

struct Proportion
{
    double value = 0.0;
    double std_err = 0.0;
};

/// Self-normalized mean of an indicator with the delta-method standard error
/// sqrt(sum w^2 (I - p)^2) / sum w.
Proportion weighted_proportion(std::span<const char> flags, std::span<const double> weights);

/// Samples of ||X||_t at one t with their self-normalized weights.
struct MedianSeriesPoint
{
    double t = 0.0;
    std::vector<double> values;
    std::vector<double> weights;
};

struct ExponentFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double ci_lo = 0.0; ///< 2.5% bootstrap quantile of the slope
    double ci_hi = 0.0; ///< 97.5% bootstrap quantile
    double ci_halfwidth = 0.0;
    std::vector<double> t_grid;
    std::vector<double> medians;
};

/// Least-squares slope of log(median) on log(t).
ExponentFit exponent_fit(std::span<const double> t_grid, std::span<const double> medians);

/// As above with weighted medians, and a percentile CI from n_boot
/// resamples drawn independently within each t.
ExponentFit exponent_fit(const std::vector<MedianSeriesPoint>& points, const StreamKey& key,
                         std::size_t n_boot = 1000, Exec exec = Exec::parallel);

// ---- conditional statistics ----------------------------------------------

inline constexpr std::array<double, 5> kQuantileLevels{0.1, 0.25, 0.5, 0.75, 0.9};
inline constexpr std::array<double, 3> kThresholdMults{0.5, 1.0, 2.0};

struct WeightedSample
{
    double max_disp = 0.0;
    double running_max = 0.0;
    double argmax_time = 0.0;
    double weight = 1.0; ///< exp(-lambda Delta-hat)
    double delta = 0.0;
    double delta_se = 0.0;
    bool a_traversal = false;
    bool a_occupation = false;
    bool event_a = false;
    /// event_a and ||X||_t >= c t^{4/9} for c in kThresholdMults
    std::array<bool, 3> event_a_threshold{};
    bool event_b = false;
    std::size_t b_count = 0;
};

struct ConditionalOptions
{
    SubgridMode mode = SubgridMode::bridge;
    std::size_t n_boot = 200;     ///< resamples for the median SEs
    std::size_t n_fit_boot = 1000; ///< resamples for the exponent-fit CI
};

struct EventSummary
{
    Proportion conditional;
    Proportion unconditional;
};

struct ConditionalSummary
{
    double t = 0.0;
    std::size_t n_outer = 0;
    std::size_t m_inner = 0;
    double n_eff = 0.0;
    bool degenerate_weights = false; ///< n_eff < 50
    std::array<double, 5> weighted_quantiles{};
    std::array<double, 5> unweighted_quantiles{};
    double weighted_median_se = 0.0;
    double unweighted_median_se = 0.0;
    /// weighted minus unweighted median, with its paired bootstrap SE
    double median_diff = 0.0;
    double median_diff_se = 0.0;
    double mean_delta = 0.0;
    EventSummary event_a;
    std::array<EventSummary, 3> event_a_threshold;
    EventSummary event_b;
    std::vector<WeightedSample> samples;
};

/// One outer path's sample: X from key.child(0), drivers from key.child(1).
WeightedSample weighted_sample(const SimParams& params, std::size_t m_inner, const StreamKey& key,
                               const EventParamsA& ea, const EventParamsB& eb, SubgridMode mode);

/// Self-normalized importance sampling of X given survival, with weights
/// exp(-lambda Delta-hat(X)). Outer path i uses key.child(i).
ConditionalSummary conditional_statistics(const SimParams& params, std::size_t n_outer,
                                          std::size_t m_inner, const EventParamsA& ea,
                                          const EventParamsB& eb, const StreamKey& key,
                                          const ConditionalOptions& opts = {},
                                          Exec exec = Exec::parallel);

struct TrendPoint
{
    double t = 0.0;
    double value = 0.0;
    double std_err = 0.0;
};

/// Kendall tau of value against t over all pairs, each weighted by
/// 1 / (se_i^2 + se_j^2); pairs closer than 3 combined SE count as ties.
/// Negative means decreasing.
double weighted_kendall_tau(const std::vector<TrendPoint>& points);

struct TrendReport
{
    std::vector<ConditionalSummary> per_t;
    std::array<double, 3> tau_a_threshold{};
    double tau_b = 0.0;
    ExponentFit median_fit;
};

/// conditional_statistics at every t (key.child(j) for the j-th), trend
/// statistics of the conditional event probabilities, and the exponent fit
/// of the weighted median of ||X||_t.
TrendReport theorem_trend_report(double lambda, double a, const std::vector<double>& t_grid,
                                 std::size_t n_steps, std::size_t n_outer, std::size_t m_inner,
                                 const EventParamsA& ea, const EventParamsB& eb,
                                 const StreamKey& key, const ConditionalOptions& opts = {},
                                 Exec exec = Exec::parallel);

} // namespace trapsim
