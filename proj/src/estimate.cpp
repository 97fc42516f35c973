#include "trapsim/estimate.hpp"

#include <limits>

namespace trapsim {

std::string_view to_string(Method m) noexcept
{
    switch (m)
    {
    case Method::direct: return "direct";
    case Method::annealed: return "annealed";
    case Method::lower_bound: return "lower_bound";
    }
    return "unknown";
}

double separation_in_se(const Estimate& a, const Estimate& b) noexcept
{
    const double diff = std::abs(a.value - b.value);
    const double se = std::hypot(a.std_err, b.std_err);
    if (se == 0.0)
        return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / se;
}

} // namespace trapsim
