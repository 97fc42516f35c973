#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "trapsim/conditional.hpp"
#include "trapsim/trapfield.hpp"

namespace trapsim::cli {

/// Malformed config text, unknown keys or out-of-range values.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable config file, unwritable output directory.
class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Every field has a default. Sections and keys in the file:
///   [params]      lambda a n_steps buffer_mult t_grid
///   [budgets]     n_paths n_outer m_inner
///   [conditional] n_steps n_outer m_inner n_boot fit_boot
///   [event_a]     kappa epsilon k_diff
///   [event_b]     epsilon k_diff f_exponent greedy_offsets
///   [run]         seed output_dir mode debias threads
struct ExperimentConfig
{
    double lambda = 1.0;
    double a = 0.1;
    std::size_t n_steps = 0; ///< 0 picks the default from a and t
    double buffer_mult = 6.0;
    std::vector<double> t_grid{1.0};

    std::size_t n_paths = 200000;
    std::size_t n_outer = 20000;
    std::size_t m_inner = 512;

    std::size_t cond_n_steps = 1024;
    std::size_t cond_n_outer = 20000;
    std::size_t cond_m_inner = 128;
    std::size_t n_boot = 200;
    std::size_t fit_boot = 1000;

    EventParamsA event_a;
    EventParamsB event_b;

    std::uint64_t seed = 1;
    std::string output_dir = "out";
    SubgridMode mode = SubgridMode::bridge;
    bool debias = false;
    int threads = 0; ///< 0 means the OpenMP default

    SimParams params_at(double t) const;
    void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text: fixed section and key order, 17 significant digits.
std::string serialize(const ExperimentConfig& c);

/// FNV-1a of the canonical text without seed, output_dir and threads, so the
/// hash names the experiment and not where or how fast it ran.
std::string config_hash(const ExperimentConfig& c);

SubgridMode parse_mode(const std::string& s);
std::string_view to_string(SubgridMode m) noexcept;

} // namespace trapsim::cli
