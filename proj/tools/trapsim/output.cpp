#include "output.hpp"

#include <cstdio>
#include <iostream>

#include "config.hpp"

#ifndef TRAPSIM_VERSION
#define TRAPSIM_VERSION "unknown"
#endif

namespace trapsim::cli {

std::string version_string()
{
    return TRAPSIM_VERSION;
}

std::string format_cell(const Cell& c)
{
    struct Visitor
    {
        std::string operator()(double x) const
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            return buf;
        }
        std::string operator()(std::uint64_t x) const { return std::to_string(x); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(bool b) const { return b ? "1" : "0"; }
    };
    return std::visit(Visitor{}, c);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns, RunStamp stamp)
    : out_(path), columns_(std::move(columns)), stamp_(std::move(stamp)), path_(path)
{
    if (!out_)
        throw IoError("cannot write " + path.string());
    out_ << "seed,config_hash,version";
    for (const auto& c : columns_)
        out_ << ',' << c;
    out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells)
{
    if (cells.size() != columns_.size())
        throw std::logic_error("CsvWriter: row width does not match header");
    out_ << stamp_.seed << ',' << stamp_.config_hash << ',' << stamp_.version;
    for (const auto& c : cells)
        out_ << ',' << format_cell(c);
    out_ << '\n';
    out_.flush();
    if (!out_)
        throw IoError("write failed on " + path_.string());
}

void ensure_writable_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto probe = dir / ".trapsim_write_probe";
    {
        std::ofstream f(probe);
        if (!f || !(f << "ok"))
            throw IoError("output directory " + dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out)
        throw IoError("write failed on " + path.string());
}

void heartbeat(const std::string& msg)
{
    std::cerr << "[trapsim] " << msg << std::endl;
}

} // namespace trapsim::cli
