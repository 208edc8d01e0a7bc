#include "mixcop/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "mixcop/errors.hpp"

namespace mixcop::cli {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    std::string out(s.substr(first, last - first + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_cell(const std::string& cell, std::size_t line, const std::string& column) {
    if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const char* first = cell.data();
    if (*first == '+') ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        throw ParseError("column '" + column + "': cannot parse '" + cell + "' as a number", line);
    }
    return value;
}

}  // namespace

Table read_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    Table table;

    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ParseError("empty input: no header row", std::max<std::size_t>(line_no, 1));
    table.names = split(line);
    std::set<std::string> seen;
    for (const std::string& name : table.names) {
        if (name.empty()) throw ParseError("empty column name in header", line_no);
        if (!seen.insert(name).second) throw ParseError("duplicate column name '" + name + "'", line_no);
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split(line);
        if (fields.size() != table.names.size()) {
            throw ParseError("expected " + std::to_string(table.names.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        std::vector<double> row;
        for (std::size_t j = 0; j < fields.size(); ++j) row.push_back(parse_cell(fields[j], line_no, table.names[j]));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no data rows", line_no);

    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return table;
}

Table read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open data file '" + path.string() + "'");
    return read_csv(in);
}

}  // namespace mixcop::cli
