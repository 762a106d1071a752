#include "knt/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "knt/error.hpp"

namespace knt
{
void write_file_atomic(std::string const& path, std::string const& contents)
{
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot open " + tmp.string() + " for writing");
        out << contents;
        if (!out)
            throw ConfigError("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string trim(std::string const& s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string const& s, char delim)
{
    std::vector<std::string> out;
    std::string piece;
    std::istringstream is(s);
    while (std::getline(is, piece, delim))
        out.push_back(trim(piece));
    return out;
}

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns)
    : columns_(std::move(columns))
{
}

void CsvTable::add_row(std::vector<double> const& row)
{
    if (row.size() != columns_.size())
        throw ArgumentError("CsvTable: row width mismatch");
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i)
    {
        if (i)
            line += ',';
        line += format_double(row[i]);
    }
    rows_.push_back(std::move(line));
}

void CsvTable::add_row(std::vector<double> const& row, std::string const& label)
{
    if (row.size() + 1 != columns_.size())
        throw ArgumentError("CsvTable: row width mismatch");
    std::string line;
    for (double v : row)
        line += format_double(v) + ',';
    line += label;
    rows_.push_back(std::move(line));
}

std::string CsvTable::str() const
{
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i)
    {
        if (i)
            out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (auto const& r : rows_)
        out += r + '\n';
    return out;
}

void CsvTable::write(std::string const& path) const
{
    write_file_atomic(path, str());
}

}  // namespace knt
