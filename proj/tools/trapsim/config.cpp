#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace trapsim::cli {
namespace {

namespace pt = boost::property_tree;

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_list(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + fmt(v[i]);
    return out;
}

template <typename T>
T as(const std::string& key, const std::string& raw)
{
    try
    {
        return boost::lexical_cast<T>(boost::trim_copy(raw));
    }
    catch (const boost::bad_lexical_cast&)
    {
        throw ConfigError("config: cannot read '" + raw + "' for " + key);
    }
}

bool as_bool(const std::string& key, const std::string& raw)
{
    const std::string v = boost::to_lower_copy(boost::trim_copy(raw));
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError("config: expected a boolean for " + key + ", got '" + raw + "'");
}

std::vector<double> as_list(const std::string& key, const std::string& raw)
{
    std::vector<std::string> parts;
    boost::split(parts, raw, boost::is_any_of(","));
    std::vector<double> out;
    for (const auto& p : parts)
        out.push_back(as<double>(key, p));
    return out;
}

std::string body(const ExperimentConfig& c, bool with_run_location)
{
    std::ostringstream os;
    os << "[params]\n"
       << "lambda = " << fmt(c.lambda) << "\n"
       << "a = " << fmt(c.a) << "\n"
       << "n_steps = " << c.n_steps << "\n"
       << "buffer_mult = " << fmt(c.buffer_mult) << "\n"
       << "t_grid = " << fmt_list(c.t_grid) << "\n\n"
       << "[budgets]\n"
       << "n_paths = " << c.n_paths << "\n"
       << "n_outer = " << c.n_outer << "\n"
       << "m_inner = " << c.m_inner << "\n\n"
       << "[conditional]\n"
       << "n_steps = " << c.cond_n_steps << "\n"
       << "n_outer = " << c.cond_n_outer << "\n"
       << "m_inner = " << c.cond_m_inner << "\n"
       << "n_boot = " << c.n_boot << "\n"
       << "fit_boot = " << c.fit_boot << "\n\n"
       << "[event_a]\n"
       << "kappa = " << fmt(c.event_a.kappa) << "\n"
       << "epsilon = " << fmt(c.event_a.epsilon) << "\n"
       << "k_diff = " << fmt(c.event_a.k_diff) << "\n\n"
       << "[event_b]\n"
       << "epsilon = " << fmt(c.event_b.epsilon) << "\n"
       << "k_diff = " << fmt(c.event_b.k_diff) << "\n"
       << "f_exponent = " << fmt(c.event_b.f_exponent) << "\n"
       << "greedy_offsets = " << (c.event_b.greedy_offsets ? "true" : "false") << "\n\n"
       << "[run]\n";
    if (with_run_location)
        os << "seed = " << c.seed << "\n"
           << "output_dir = " << c.output_dir << "\n";
    os << "mode = " << to_string(c.mode) << "\n"
       << "debias = " << (c.debias ? "true" : "false") << "\n";
    if (with_run_location)
        os << "threads = " << c.threads << "\n";
    return os.str();
}

} // namespace

SubgridMode parse_mode(const std::string& s)
{
    const std::string v = boost::to_lower_copy(boost::trim_copy(s));
    if (v == "naive")
        return SubgridMode::naive;
    if (v == "bridge")
        return SubgridMode::bridge;
    throw ConfigError("mode must be 'naive' or 'bridge', got '" + s + "'");
}

std::string_view to_string(SubgridMode m) noexcept
{
    return m == SubgridMode::naive ? "naive" : "bridge";
}

SimParams ExperimentConfig::params_at(double t) const
{
    return SimParams::make(lambda, a, t, n_steps, buffer_mult);
}

void ExperimentConfig::validate() const
{
    if (t_grid.empty())
        throw ConfigError("config: t_grid must not be empty");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ConfigError("config: t_grid must be strictly increasing");
    try
    {
        for (double t : t_grid)
            params_at(t);
        event_a.validate();
        event_b.validate();
    }
    catch (const InvalidParameter& e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (n_paths < 1 || n_outer < 2 || m_inner < 2)
        throw ConfigError("config: need n_paths >= 1, n_outer >= 2, m_inner >= 2");
    if (cond_n_steps < 1 || cond_n_outer < 100 || cond_m_inner < 2)
        throw ConfigError("config: need conditional n_steps >= 1, n_outer >= 100, m_inner >= 2");
    if (threads < 0)
        throw ConfigError("config: threads must be >= 0");
}

ExperimentConfig parse_config(const std::string& text)
{
    pt::ptree tree;
    std::istringstream in(text);
    try
    {
        pt::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error& e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }

    ExperimentConfig c;
    for (const auto& [section, entries] : tree)
    {
        if (entries.empty() && !entries.data().empty())
            throw ConfigError("config: key '" + section + "' outside any section");
        for (const auto& [key, node] : entries)
        {
            const std::string name = section + "." + key;
            const std::string& v = node.data();
            if (name == "params.lambda") c.lambda = as<double>(name, v);
            else if (name == "params.a") c.a = as<double>(name, v);
            else if (name == "params.n_steps") c.n_steps = as<std::size_t>(name, v);
            else if (name == "params.buffer_mult") c.buffer_mult = as<double>(name, v);
            else if (name == "params.t_grid") c.t_grid = as_list(name, v);
            else if (name == "budgets.n_paths") c.n_paths = as<std::size_t>(name, v);
            else if (name == "budgets.n_outer") c.n_outer = as<std::size_t>(name, v);
            else if (name == "budgets.m_inner") c.m_inner = as<std::size_t>(name, v);
            else if (name == "conditional.n_steps") c.cond_n_steps = as<std::size_t>(name, v);
            else if (name == "conditional.n_outer") c.cond_n_outer = as<std::size_t>(name, v);
            else if (name == "conditional.m_inner") c.cond_m_inner = as<std::size_t>(name, v);
            else if (name == "conditional.n_boot") c.n_boot = as<std::size_t>(name, v);
            else if (name == "conditional.fit_boot") c.fit_boot = as<std::size_t>(name, v);
            else if (name == "event_a.kappa") c.event_a.kappa = as<double>(name, v);
            else if (name == "event_a.epsilon") c.event_a.epsilon = as<double>(name, v);
            else if (name == "event_a.k_diff") c.event_a.k_diff = as<double>(name, v);
            else if (name == "event_b.epsilon") c.event_b.epsilon = as<double>(name, v);
            else if (name == "event_b.k_diff") c.event_b.k_diff = as<double>(name, v);
            else if (name == "event_b.f_exponent") c.event_b.f_exponent = as<double>(name, v);
            else if (name == "event_b.greedy_offsets") c.event_b.greedy_offsets = as_bool(name, v);
            else if (name == "run.seed") c.seed = as<std::uint64_t>(name, v);
            else if (name == "run.output_dir") c.output_dir = boost::trim_copy(v);
            else if (name == "run.mode") c.mode = parse_mode(v);
            else if (name == "run.debias") c.debias = as_bool(name, v);
            else if (name == "run.threads") c.threads = as<int>(name, v);
            else throw ConfigError("config: unknown key " + name);
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize(const ExperimentConfig& c)
{
    return body(c, true);
}

std::string config_hash(const ExperimentConfig& c)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : body(c, false))
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace trapsim::cli
