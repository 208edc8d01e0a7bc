#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixcop/kendall.hpp"

namespace mixcop::cli {

struct RunOptions {
    std::filesystem::path data;
    std::filesystem::path manifest;  ///< empty: infer column types
    std::filesystem::path out_dir = ".";
    std::optional<TauVariant> tau;
    std::vector<double> lambda_path;
    std::optional<double> hbic_cn;
    std::optional<std::uint64_t> seed;
    bool allow_partial = false;
    bool allow_sin_fallback = false;
    int threads = 1;

    // simulate only
    std::string scenario;
    int reps = 80;
    int n = 100;
    std::vector<int> p_values;
};

/// A failed pipeline stage. `details` carries machine-readable context
/// (line numbers, column indices) for the error summary.
class StageFailure : public std::runtime_error {
public:
    StageFailure(std::string stage, std::string kind, const std::string& message, nlohmann::json details = {})
        : std::runtime_error(message), stage_(std::move(stage)), kind_(std::move(kind)), details_(std::move(details)) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& kind() const noexcept { return kind_; }
    const nlohmann::json& details() const noexcept { return details_; }

private:
    std::string stage_;
    std::string kind_;
    nlohmann::json details_;
};

/// Writes correlation.tsv, entries.tsv and report.json; returns the report.
nlohmann::json cmd_estimate(const RunOptions& opts);

/// Adds projected_correlation.tsv, precision.tsv, edges.tsv, graph.dot and
/// hbic_trace.tsv to the estimate outputs.
nlohmann::json cmd_graph(const RunOptions& opts);

/// Scenario "1", "2" or "concentration"; writes tab-separated result tables.
nlohmann::json cmd_simulate(const RunOptions& opts);

/// The error summary printed on failure.
nlohmann::json error_summary(const std::string& command, const StageFailure& failure);

}  // namespace mixcop::cli
