#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

using namespace trapsim;
using namespace trapsim::cli;

namespace fs = std::filesystem;

TEST_CASE("config round trip is idempotent")
{
    const std::string text = R"(
# comment
[params]
lambda = 0.75
a = 0.05
t_grid = 4, 16, 64
[budgets]
n_paths = 1000
[event_b]
greedy_offsets = true
k_diff = 1.25
[run]
mode = naive
seed = 99
debias = 1
)";
    const ExperimentConfig c = parse_config(text);
    CHECK(c.lambda == 0.75);
    CHECK(c.t_grid == std::vector<double>{4.0, 16.0, 64.0});
    CHECK(c.event_b.greedy_offsets);
    CHECK(c.mode == SubgridMode::naive);
    CHECK(c.debias);
    CHECK(c.seed == 99);

    const std::string once = serialize(c);
    const std::string twice = serialize(parse_config(once));
    CHECK(once == twice);
    CHECK(serialize(parse_config(serialize(ExperimentConfig{}))) == serialize(ExperimentConfig{}));

    ExperimentConfig odd;
    odd.lambda = 0.1 + 0.2;
    odd.t_grid = {1.0 / 3.0, 2.0};
    CHECK(parse_config(serialize(odd)).lambda == odd.lambda);
    CHECK(parse_config(serialize(odd)).t_grid == odd.t_grid);
}

TEST_CASE("config errors")
{
    CHECK_THROWS_AS(parse_config("[params]\nlambada = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nosuch]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[params]\nlambda = one\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[params]\nlambda = -1\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[params]\nt_grid = 4, 2\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nmode = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run\nseed = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/trapsim.ini"), IoError);
}

TEST_CASE("config hash names the experiment, not the run location")
{
    ExperimentConfig a;
    ExperimentConfig b = a;
    b.seed = 12345;
    b.threads = 4;
    b.output_dir = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.lambda = 0.5;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a) == config_hash(parse_config(serialize(a))));
}

TEST_CASE("csv cells")
{
    CHECK(format_cell(0.1) == "0.10000000000000001");
    CHECK(format_cell(1.0) == "1");
    CHECK(format_cell(true) == "1");
    CHECK(format_cell(std::uint64_t{42}) == "42");
    CHECK(format_cell(std::string("bridge")) == "bridge");

    const fs::path dir = fs::temp_directory_path() / "trapsim_test_csv";
    fs::remove_all(dir);
    ensure_writable_dir(dir);
    {
        CsvWriter w(dir / "x.csv", {"t", "value"}, RunStamp{3, "abc", "v"});
        w.row({1.0, 0.5});
        CHECK_THROWS(w.row({1.0}));
    }
    std::ifstream in(dir / "x.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "seed,config_hash,version,t,value\n3,abc,v,1,0.5\n");
    fs::remove_all(dir);
}

TEST_CASE("analytics query")
{
    std::ostringstream out;
    CHECK(run_analytics({"argmax_density", "0.5", "1"}, out) == kExitOk);
    CHECK(out.str() == "0.63661977236758138\n");
    std::ostringstream sink;
    CHECK_THROWS_AS(run_analytics({"argmax_density", "0.5"}, sink), ConfigError);
    CHECK_THROWS_AS(run_analytics({"argmax_density", "x", "1"}, sink), ConfigError);
    CHECK_THROWS_AS(run_analytics({"nope"}, sink), ConfigError);
}
