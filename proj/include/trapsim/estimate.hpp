#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <string_view>

namespace trapsim {

enum class Method
{
    direct,
    annealed,
    lower_bound
};

std::string_view to_string(Method m) noexcept;

/// Value with standard error. std_err is 0 for deterministic bounds.
struct Estimate
{
    double value = 0.0;
    double std_err = 0.0;
    std::size_t n = 0;
    Method method = Method::direct;
};

/// Running (sum, sum of squares, count); merging is associative, but callers
/// that need bit-reproducible results must merge in a fixed order.
struct MomentSum
{
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;

    void add(double x) noexcept
    {
        sum += x;
        sum_sq += x * x;
        ++count;
    }

    MomentSum& operator+=(const MomentSum& o) noexcept
    {
        sum += o.sum;
        sum_sq += o.sum_sq;
        count += o.count;
        return *this;
    }

    double mean() const noexcept { return count ? sum / static_cast<double>(count) : 0.0; }

    /// Unbiased sample variance.
    double variance() const noexcept
    {
        if (count < 2)
            return 0.0;
        const double n = static_cast<double>(count);
        const double m = sum / n;
        return std::max(0.0, (sum_sq - n * m * m) / (n - 1.0));
    }

    double std_err() const noexcept
    {
        return count < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count));
    }
};

/// |a - b| measured in combined standard errors; +inf when both are exact
/// and differ, 0 when they coincide.
double separation_in_se(const Estimate& a, const Estimate& b) noexcept;

} // namespace trapsim
