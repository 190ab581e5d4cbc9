#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

/// Column-named table of reals. Serialized as comma-separated text with a
/// header row, LF line endings and numbers in shortest round-trip form.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

    /// Throws DimensionMismatch unless `row` has one value per column.
    void add_row(std::vector<double> row);

    /// Values of the named column; throws DomainError for unknown names.
    std::vector<double> column(const std::string& name) const;

    void write(std::ostream& out) const;
    std::string to_string() const;

    /// Parses text produced by write(). Throws ParseError on malformed input.
    static CsvTable parse(std::istream& in);

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

/// Shortest decimal form that parses back to exactly `value`.
std::string format_number(double value);

/// Headerless CSV, one matrix row per line. Blank lines are skipped.
DenseMatrix read_matrix_csv(std::istream& in);
/// Single-column CSV (one value per line).
Vector read_vector_csv(std::istream& in);

DenseMatrix read_matrix_csv_file(const std::string& path);
Vector read_vector_csv_file(const std::string& path);

}  // namespace kaczmarz
