//---------------------------------------------------------------------------//
/*!
 * \file knt/io.hpp
 * \brief Atomic file output, CSV tables and small string helpers.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <string>
#include <vector>

namespace knt
{
//! Write via a sibling temporary file and rename over the target.
void write_file_atomic(std::string const& path, std::string const& contents);

//! Strip leading and trailing whitespace.
std::string trim(std::string const& s);

//! Split on a delimiter, trimming each piece.
std::vector<std::string> split(std::string const& s, char delim);

//! Shortest round-trip-safe text for a double (17 significant digits).
std::string format_double(double x);

//! Column-ordered numeric table rendered as CSV.
class CsvTable
{
  public:
    explicit CsvTable(std::vector<std::string> columns);

    //! Append a row; its length must match the column count.
    void add_row(std::vector<double> const& row);
    //! Append a row with one trailing text column.
    void add_row(std::vector<double> const& row, std::string const& label);

    std::string str() const;
    void write(std::string const& path) const;

    std::size_t num_rows() const { return rows_.size(); }

  private:
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

}  // namespace knt
