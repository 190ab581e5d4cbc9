#include "kaczmarz/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& raw, std::size_t line_no) {
    const std::string cell = trim(raw);
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (!cell.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (cell.empty() || ec != std::errc{} || ptr != end) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + cell +
                         "' as a number");
    }
    return value;
}

std::vector<std::vector<double>> read_grid(std::istream& in) {
    std::vector<std::vector<double>> grid;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line)) row.push_back(parse_number(cell, line_no));
        if (!grid.empty() && row.size() != grid.front().size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(grid.front().size()) + " values, got " +
                             std::to_string(row.size()));
        }
        grid.push_back(std::move(row));
    }
    return grid;
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return in;
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw DomainError("table needs at least one column");
}

void CsvTable::add_row(std::vector<double> row) {
    if (row.size() != columns_.size()) {
        throw DimensionMismatch("row has " + std::to_string(row.size()) + " values for " +
                                std::to_string(columns_.size()) + " columns");
    }
    rows_.push_back(std::move(row));
}

std::vector<double> CsvTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (columns_[j] != name) continue;
        std::vector<double> out;
        out.reserve(rows_.size());
        for (const auto& r : rows_) out.push_back(r[j]);
        return out;
    }
    throw DomainError("no column named '" + name + "'");
}

void CsvTable::write(std::ostream& out) const {
    for (std::size_t j = 0; j < columns_.size(); ++j) out << (j ? "," : "") << columns_[j];
    out << '\n';
    for (const auto& r : rows_) {
        for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << format_number(r[j]);
        out << '\n';
    }
}

std::string CsvTable::to_string() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
}

CsvTable CsvTable::parse(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || trim(header).empty()) throw ParseError("missing header row");
    std::vector<std::string> names;
    for (const auto& cell : split(header)) names.push_back(trim(cell));
    CsvTable table(std::move(names));
    for (auto& row : read_grid(in)) {
        if (row.size() != table.columns_.size()) throw ParseError("row width differs from header");
        table.rows_.push_back(std::move(row));
    }
    return table;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

DenseMatrix read_matrix_csv(std::istream& in) {
    auto grid = read_grid(in);
    if (grid.empty()) throw ParseError("matrix file is empty");
    return DenseMatrix::from_rows(grid);
}

Vector read_vector_csv(std::istream& in) {
    auto grid = read_grid(in);
    if (grid.empty()) throw ParseError("vector file is empty");
    Vector out;
    out.reserve(grid.size());
    for (const auto& row : grid) {
        if (row.size() != 1) throw ParseError("vector file must have exactly one column");
        out.push_back(row.front());
    }
    return out;
}

DenseMatrix read_matrix_csv_file(const std::string& path) {
    auto in = open(path);
    return read_matrix_csv(in);
}

Vector read_vector_csv_file(const std::string& path) {
    auto in = open(path);
    return read_vector_csv(in);
}

}  // namespace kaczmarz
