#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace trapsim::cli {

/// Identifies the run that produced a row: seed, config hash, version.
struct RunStamp
{
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string version;
};

std::string version_string();

using Cell = std::variant<double, std::uint64_t, std::string, bool>;

/// Doubles at 17 significant digits, booleans as 0/1. The three stamp
/// columns lead every row.
class CsvWriter
{
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns, RunStamp stamp);

    void row(const std::vector<Cell>& cells);
    const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
    std::ofstream out_;
    std::vector<std::string> columns_;
    RunStamp stamp_;
    std::filesystem::path path_;
};

std::string format_cell(const Cell& c);

/// Creates the directory and proves it writable; throws IoError otherwise.
void ensure_writable_dir(const std::filesystem::path& dir);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

/// One progress line on stderr.
void heartbeat(const std::string& msg);

} // namespace trapsim::cli
