#pragma once

#include <cstddef>

#include "trapsim/estimate.hpp"
#include "trapsim/parallel.hpp"
#include "trapsim/path.hpp"
#include "trapsim/trapfield.hpp"

namespace trapsim {

/// Monte Carlo estimate of
///   Delta(X) = E_Y[ sup(Y+X) + sup(Y-X) - 2 sup Y | X ],
/// which equals E_Y[ |R_t(Y+X)| - |R_t(Y)| | X ].
struct DeltaEstimate
{
    double value = 0.0;
    double std_err = 0.0;
    std::size_t inner_count = 0;
};

struct DeltaOptions
{
    SubgridMode mode = SubgridMode::bridge;
    /// Variance rate of X between its grid points: 1 for a Brownian X,
    /// 0 for a piecewise-linear (synthetic) X.
    double x_var_rate = 1.0;
};

/// |W_X(t)| for one trap driver: range of Y + X plus 2a.
double sausage_volume_given_paths(const PathGrid& x_path, const PathGrid& y_path, double a);

/// sup(Y+X) + sup(Y-X) - 2 sup Y on the grid, for a single Y.
double delta_sample(const PathGrid& x_path, const PathGrid& y_path);

/// As delta_sample, with each supremum replaced by an exact draw of its
/// continuous-time value given the grid. The three suprema share one
/// exponential from `draws` per step.
double delta_sample_bridge(const PathGrid& x_path, const PathGrid& y_path, double x_var_rate,
                           RandomStream& draws);

/// Mean and standard error of the single-Y sample over m_inner drivers, the
/// j-th drawn from key.child(j). All three suprema of a sample share one Y.
DeltaEstimate delta_functional(const PathGrid& x_path, std::size_t m_inner, const StreamKey& key,
                               const DeltaOptions& opts = {});

struct SurvivalWeight
{
    /// exp(-lambda (E|R_t| + Delta + 2a)), the survival probability given X.
    double weight = 1.0;
    /// exp(-lambda Delta); the X-independent factor cancels in conditional
    /// expectations.
    double conditional_weight = 1.0;
};

/// With `debias`, both weights are multiplied by (1 - lambda^2 se^2 / 2), a
/// first-order correction for the upward bias of exp(-lambda * mean).
SurvivalWeight survival_weight(const DeltaEstimate& delta, const SimParams& params,
                               bool debias = false);

struct AnnealedOptions
{
    SubgridMode mode = SubgridMode::bridge;
    bool debias = false;
};

struct AnnealedResult
{
    Estimate estimate;
    double mean_delta = 0.0;
    double mean_delta_se = 0.0;
    /// lambda^2 mean(se_Delta^2) / 2, the plug-in convexity bias of the weight.
    double bias_diagnostic = 0.0;
    bool bias_warning = false;
};

/// P(T > t) as the mean over n_outer Brownian X of survival_weight(Delta(X)).
/// Outer path i uses key.child(i): child(0) for X and child(1) for its drivers.
AnnealedResult annealed_survival_estimate(const SimParams& params, std::size_t n_outer,
                                          std::size_t m_inner, const StreamKey& key,
                                          const AnnealedOptions& opts = {},
                                          Exec exec = Exec::parallel);

namespace reference {

/// delta_functional with every driver materialized as a PathGrid.
DeltaEstimate delta_functional(const PathGrid& x_path, std::size_t m_inner, const StreamKey& key,
                               const DeltaOptions& opts = {});

AnnealedResult annealed_survival_estimate(const SimParams& params, std::size_t n_outer,
                                          std::size_t m_inner, const StreamKey& key,
                                          const AnnealedOptions& opts = {});

} // namespace reference

} // namespace trapsim
