#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mixcop/estimator.hpp"

namespace mixcop::cli {

/// Column declarations and run options from a manifest file.
///
///     # comment
///     age       = continuous
///     grade     = ordinal 3
///     option.tau = b
///     option.lambda_path = 0.05, 0.1, 0.2
///     option.hbic_cn = 1.5
///     option.seed = 42
struct Manifest {
    std::vector<ColumnSpec> columns;  ///< in file order
    std::optional<TauVariant> tau;
    std::vector<double> lambda_path;
    std::optional<double> hbic_cn;
    std::optional<std::uint64_t> seed;

    const ColumnSpec* find(const std::string& name) const;
};

Manifest parse_manifest(std::istream& in);
Manifest read_manifest_file(const std::filesystem::path& path);

TauVariant parse_tau_variant(const std::string& text);
/// Comma- or whitespace-separated positive numbers.
std::vector<double> parse_lambda_list(const std::string& text);

/// Specs for the data columns: manifest entries where given, inferred types
/// otherwise. Throws DomainError if the manifest names a column the data
/// does not have.
std::vector<ColumnSpec> resolve_specs(const Manifest& manifest, const std::vector<std::string>& names,
                                      const Eigen::MatrixXd& data);

}  // namespace mixcop::cli
