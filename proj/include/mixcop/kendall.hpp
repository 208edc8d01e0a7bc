#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

namespace mixcop {

/// Pair counts and the two Kendall statistics for one variable pair.
///
/// Counts are over the n(n-1)/2 unordered observation pairs. A pair tied on
/// both variables is counted in ties_j and ties_k but is neither concordant
/// nor discordant.
struct TauStatistics {
    double tau_a = 0.0;
    double tau_b = 0.0;
    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    std::int64_t ties_j = 0;
    std::int64_t ties_k = 0;
    std::int64_t n_pairs = 0;
};

/// Integer pair counts; tau values are derived from these.
struct PairCounts {
    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    std::int64_t ties_j = 0;
    std::int64_t ties_k = 0;
    std::int64_t n_pairs = 0;
};

/// O(n log n) concordance counting (Knight's merge-sort algorithm).
/// Requires equal lengths and n >= 2; values must not be NaN.
PairCounts count_pairs(std::span<const double> x, std::span<const double> y);

/// (C - D) / binom(n, 2).
double tau_a(std::span<const double> x, std::span<const double> y);

/// Full statistics including the tie-corrected tau-b. Throws
/// DegenerateColumnError if either input is constant.
TauStatistics tau_b(std::span<const double> x, std::span<const double> y);

/// The tau-a / tau-b formulas on precomputed counts; shared with tests so that
/// the arithmetic is identical regardless of how the counts were obtained.
double tau_a_from_counts(const PairCounts& counts);
double tau_b_from_counts(const PairCounts& counts);

enum class TauVariant { A, B };

/// Symmetric d x d matrix of pairwise tau statistics over the columns of
/// `data`. NaN entries are missing; each pair uses the rows complete for
/// both columns. The diagonal is 1. `threads` > 1 evaluates pairs
/// concurrently with bit-identical results.
Eigen::MatrixXd pairwise_tau(const Eigen::MatrixXd& data, TauVariant which, int threads = 1);

}  // namespace mixcop
