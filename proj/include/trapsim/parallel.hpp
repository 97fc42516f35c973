#pragma once

#include <cstddef>
#include <cstdint>
#include <type_traits>
#include <vector>

namespace trapsim {

/// Serial runs are the reference implementation; parallel runs must produce
/// bit-identical results because each index owns its own random stream and
/// reductions happen afterwards in index order.
enum class Exec
{
    serial,
    parallel
};

/// Caps OpenMP worker count; 0 restores the runtime default.
void set_thread_limit(int n);
int thread_limit();

template <typename F>
auto map_indices(std::size_t n, Exec exec, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>>
{
    std::vector<std::invoke_result_t<F&, std::size_t>> out(n);
    if (exec == Exec::serial)
    {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = f(i);
        return out;
    }
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    return out;
}

} // namespace trapsim
