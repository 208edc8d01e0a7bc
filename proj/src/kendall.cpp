#include "mixcop/kendall.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mixcop/errors.hpp"
#include "mixcop/parallel.hpp"

namespace mixcop {

namespace {

std::int64_t choose2(std::int64_t m) { return m * (m - 1) / 2; }

// Bottom-up merge sort of `v` returning the number of strict inversions
// (i < j with v[i] > v[j]).
std::int64_t sort_counting_inversions(std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> buf(n);
    std::int64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n);
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo;
            std::size_t j = mid;
            std::size_t out = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    inversions += static_cast<std::int64_t>(mid - i);
                    buf[out++] = v[j++];
                } else {
                    buf[out++] = v[i++];
                }
            }
            while (i < mid) buf[out++] = v[i++];
            while (j < hi) buf[out++] = v[j++];
        }
        v.swap(buf);
    }
    return inversions;
}

void check_inputs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("kendall: length mismatch");
    if (x.size() < 2) throw DomainError("kendall: need at least two observations");
}

}  // namespace

PairCounts count_pairs(std::span<const double> x, std::span<const double> y) {
    check_inputs(x, y);
    const std::size_t n = x.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });

    std::int64_t ties_x = 0;
    std::int64_t ties_xy = 0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && x[order[end]] == x[order[start]]) ++end;
        ties_x += choose2(static_cast<std::int64_t>(end - start));
        for (std::size_t s = start; s < end;) {
            std::size_t e = s + 1;
            while (e < end && y[order[e]] == y[order[s]]) ++e;
            ties_xy += choose2(static_cast<std::int64_t>(e - s));
            s = e;
        }
        start = end;
    }

    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    const std::int64_t discordant = sort_counting_inversions(ys);

    std::int64_t ties_y = 0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && ys[end] == ys[start]) ++end;
        ties_y += choose2(static_cast<std::int64_t>(end - start));
        start = end;
    }

    PairCounts counts;
    counts.n_pairs = choose2(static_cast<std::int64_t>(n));
    counts.ties_j = ties_x;
    counts.ties_k = ties_y;
    counts.discordant = discordant;
    counts.concordant = counts.n_pairs - ties_x - ties_y + ties_xy - discordant;
    return counts;
}

double tau_a_from_counts(const PairCounts& counts) {
    return static_cast<double>(counts.concordant - counts.discordant) /
           static_cast<double>(counts.n_pairs);
}

double tau_b_from_counts(const PairCounts& counts) {
    const double n_pairs = static_cast<double>(counts.n_pairs);
    const double untied_j = static_cast<double>(counts.n_pairs - counts.ties_j);
    const double untied_k = static_cast<double>(counts.n_pairs - counts.ties_k);
    return tau_a_from_counts(counts) * n_pairs / std::sqrt(untied_j * untied_k);
}

double tau_a(std::span<const double> x, std::span<const double> y) {
    return tau_a_from_counts(count_pairs(x, y));
}

TauStatistics tau_b(std::span<const double> x, std::span<const double> y) {
    const PairCounts counts = count_pairs(x, y);
    if (counts.ties_j == counts.n_pairs) {
        throw DegenerateColumnError("tau_b: first column is constant", 0);
    }
    if (counts.ties_k == counts.n_pairs) {
        throw DegenerateColumnError("tau_b: second column is constant", 1);
    }
    TauStatistics stats;
    stats.concordant = counts.concordant;
    stats.discordant = counts.discordant;
    stats.ties_j = counts.ties_j;
    stats.ties_k = counts.ties_k;
    stats.n_pairs = counts.n_pairs;
    stats.tau_a = tau_a_from_counts(counts);
    stats.tau_b = tau_b_from_counts(counts);
    return stats;
}

Eigen::MatrixXd pairwise_tau(const Eigen::MatrixXd& data, TauVariant which, int threads) {
    const Eigen::Index d = data.cols();
    const Eigen::Index n = data.rows();
    if (n < 2) throw DomainError("pairwise_tau: need at least two rows");

    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = j + 1; k < d; ++k) pairs.emplace_back(j, k);

    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(d, d);
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
        const auto [j, k] = pairs[p];
        std::vector<double> x;
        std::vector<double> y;
        x.reserve(static_cast<std::size_t>(n));
        y.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = data(i, j);
            const double b = data(i, k);
            if (std::isnan(a) || std::isnan(b)) continue;
            x.push_back(a);
            y.push_back(b);
        }
        const std::string where =
            " (columns " + std::to_string(j) + ", " + std::to_string(k) + ")";
        if (x.size() < 2) {
            throw UnsupportedPairError("fewer than two complete rows" + where, j, k);
        }
        double value = 0.0;
        if (which == TauVariant::A) {
            value = tau_a(x, y);
        } else {
            try {
                value = tau_b(x, y).tau_b;
            } catch (const DegenerateColumnError& e) {
                throw DegenerateColumnError(e.what() + where, e.column() == 0 ? j : k);
            }
        }
        out(j, k) = value;
        out(k, j) = value;
    });
    return out;
}

}  // namespace mixcop
