#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "trapsim/error.hpp"
#include "trapsim/parallel.hpp"

using namespace trapsim::cli;

namespace {

struct Overrides
{
    std::string config_path;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    std::string mode;
    bool debias = false;
};

ExperimentConfig resolve(const Overrides& o, const CLI::App& app)
{
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (app.count("--seed"))
        c.seed = o.seed;
    if (app.count("--threads"))
        c.threads = o.threads;
    if (app.count("--out"))
        c.output_dir = o.out;
    if (app.count("--mode"))
        c.mode = parse_mode(o.mode);
    if (app.count("--debias"))
        c.debias = o.debias;
    c.validate();
    if (c.threads > 0)
        trapsim::set_thread_limit(c.threads);
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Brownian particle among Poissonian Brownian traps"};
    app.require_subcommand(1);

    Overrides o;
    app.add_option("--config", o.config_path, "INI-style experiment file");
    app.add_option("--seed", o.seed, "root seed");
    app.add_option("--threads", o.threads, "OpenMP thread count")->check(CLI::PositiveNumber);
    app.add_option("--out", o.out, "output directory");
    app.add_option("--mode", o.mode, "sub-grid treatment")->check(CLI::IsMember({"naive", "bridge"}));
    app.add_flag("--debias", o.debias, "second-order correction of exp(-lambda Delta)");

    auto* validate = app.add_subcommand("validate", "oracle checks; exit 1 on any failure");
    auto* survival = app.add_subcommand("survival", "survival probability by three routes");
    auto* conditional = app.add_subcommand("conditional", "statistics conditioned on survival");
    auto* trend = app.add_subcommand("trend", "monotone trends and the median exponent fit");
    auto* analytics = app.add_subcommand("analytics", "evaluate one closed form");
    std::vector<std::string> query;
    analytics->add_option("query", query, "function name followed by its arguments")->required();
    for (auto* sub : {validate, survival, conditional, trend, analytics})
        sub->fallthrough();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        if (analytics->parsed())
            return run_analytics(query, std::cout);
        const ExperimentConfig c = resolve(o, app);
        if (validate->parsed())
            return run_validate(c);
        if (survival->parsed())
            return run_survival(c);
        if (conditional->parsed())
            return run_conditional(c);
        return run_trend(c);
    }
    catch (const IoError& e)
    {
        std::cerr << "trapsim: " << e.what() << '\n';
        return kExitIo;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "trapsim: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const trapsim::InvalidParameter& e)
    {
        std::cerr << "trapsim: invalid parameter: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const std::exception& e)
    {
        std::cerr << "trapsim: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}
