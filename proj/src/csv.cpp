#include "spars/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace spars {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream stream(line);
    while (std::getline(stream, cell, ',')) {
        // trim surrounding whitespace
        const auto begin = cell.find_first_not_of(" \t\r");
        const auto end = cell.find_last_not_of(" \t\r");
        cells.push_back(begin == std::string::npos ? "" : cell.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

}  // namespace

TimeSeries read_series_csv(const std::string& path,
                           const std::optional<std::string>& value_column) {
    std::ifstream in(path);
    if (!in)
        throw IoError("read_series_csv: cannot open " + path);

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
            lines.push_back(line);
    if (lines.empty())
        throw ParseError("read_series_csv: " + path + " has no data rows");

    const std::vector<std::string> first_row = split_row(lines[0]);
    const bool has_header = !parse_number(first_row[0]).has_value();

    // resolve the value column: explicit index, header name, or last column
    std::size_t column = first_row.size() - 1;
    if (value_column) {
        int index = 0;
        const auto [ptr, ec] =
            std::from_chars(value_column->data(), value_column->data() + value_column->size(), index);
        if (ec == std::errc() && ptr == value_column->data() + value_column->size()) {
            if (index < 0 || static_cast<std::size_t>(index) >= first_row.size())
                throw ParseError("read_series_csv: column index " + *value_column +
                                 " out of range for " + std::to_string(first_row.size()) +
                                 " columns");
            column = static_cast<std::size_t>(index);
        } else {
            if (!has_header)
                throw ParseError("read_series_csv: column '" + *value_column +
                                 "' requested but the file has no header row");
            bool found = false;
            for (std::size_t i = 0; i < first_row.size(); ++i) {
                if (first_row[i] == *value_column) {
                    column = i;
                    found = true;
                    break;
                }
            }
            if (!found)
                throw ParseError("read_series_csv: no column named '" + *value_column + "'");
        }
    }

    std::vector<double> values;
    for (std::size_t row = has_header ? 1 : 0; row < lines.size(); ++row) {
        const std::vector<std::string> cells = split_row(lines[row]);
        if (column >= cells.size())
            throw ParseError("read_series_csv: row " + std::to_string(row + 1) + " has only " +
                             std::to_string(cells.size()) + " columns");
        const std::optional<double> value = parse_number(cells[column]);
        if (!value)
            throw ParseError("read_series_csv: non-numeric value '" + cells[column] +
                             "' at row " + std::to_string(row + 1) + ", column " +
                             std::to_string(column + 1));
        values.push_back(*value);
    }
    if (values.empty())
        throw ParseError("read_series_csv: " + path + " has no data rows");
    return TimeSeries::from_vector(values, path);
}

void write_series_csv(const TimeSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("write_series_csv: cannot open " + path + " for writing");
    out << "value\n";
    out.precision(17);
    for (Eigen::Index t = 1; t <= series.length(); ++t) out << series.at(t) << "\n";
    if (!out)
        throw IoError("write_series_csv: write to " + path + " failed");
}

}  // namespace spars
