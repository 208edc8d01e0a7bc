#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mixcop::cli {

/// Numeric table read from CSV; missing cells are NaN.
struct Table {
    std::vector<std::string> names;
    Eigen::MatrixXd values;
};

/// Comma-separated, header row first, '.' decimal point. An empty cell (or
/// NA / NaN) is missing. Surrounding whitespace and double quotes around a
/// field are stripped. Throws ParseError with the 1-based line number.
Table read_csv(std::istream& in);
Table read_csv_file(const std::filesystem::path& path);

}  // namespace mixcop::cli
