#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mixcop {

/// Thresholds on the latent normal scale for one ordinal variable with
/// `levels()` categories: level l is observed when the latent value lies in
/// (cutoff[l-1], cutoff[l]], with implicit -inf / +inf at the ends.
///
/// Entries are nondecreasing and may be +/-inf (an empty extreme level).
/// Bridge functions want strictly increasing finite cutoffs; see
/// `strictly_increasing()`.
class CutoffVector {
public:
    CutoffVector() = default;
    explicit CutoffVector(std::vector<double> thresholds);

    /// Population cutoffs Phi^{-1}(l / levels), l = 1..levels-1.
    static CutoffVector equal_mass(int levels);

    std::span<const double> values() const noexcept { return thresholds_; }
    std::size_t size() const noexcept { return thresholds_.size(); }
    int levels() const noexcept { return static_cast<int>(thresholds_.size()) + 1; }
    double operator[](std::size_t i) const { return thresholds_[i]; }
    bool strictly_increasing() const noexcept;
    bool all_finite() const noexcept;

private:
    std::vector<double> thresholds_;
};

/// Moment estimator of the cutoffs of an ordinal column with codes in
/// {0, ..., levels-1}: cutoff l = Phi^{-1}(#{x <= l-1} / n).
/// Throws DomainError on out-of-range codes or an empty column.
CutoffVector estimate_cutoffs(std::span<const int> codes, int levels);

enum class PairType { ContinuousContinuous, OrdinalContinuous, OrdinalOrdinal };
enum class BridgeVariant { TauA, TauB1stOrder };

/// Which bridge links a pair's Kendall statistic to its latent correlation.
/// For OrdinalContinuous the ordinal variable is always `j`.
struct BridgeKind {
    PairType type = PairType::ContinuousContinuous;
    int levels_j = 0;
    int levels_k = 0;
    BridgeVariant variant = BridgeVariant::TauA;

    static BridgeKind continuous_continuous() { return {}; }
    static BridgeKind ordinal_continuous(int levels, BridgeVariant v = BridgeVariant::TauA) {
        return {PairType::OrdinalContinuous, levels, 0, v};
    }
    static BridgeKind ordinal_ordinal(int levels_j, int levels_k,
                                      BridgeVariant v = BridgeVariant::TauA) {
        return {PairType::OrdinalOrdinal, levels_j, levels_k, v};
    }
};

/// Bridge value and its derivative with respect to the latent correlation.
struct BridgeEval {
    double value = 0.0;
    double derivative = 0.0;
};

/// Population Kendall statistic at latent correlation r, |r| < 1.
/// Throws UnsupportedPairError for kinds without a bridge and DomainError
/// when the cutoff vectors do not match the kind.
BridgeEval bridge_forward(double r, const BridgeKind& kind, const CutoffVector& cutoffs_j,
                          const CutoffVector& cutoffs_k = {});

/// First-order tau-b bridge (binary-binary or binary-continuous kinds; the
/// variant field of `kind` is ignored). Throws DegenerateColumnError when a
/// binary cutoff is infinite.
BridgeEval bridge_forward_tau_b(double r, const BridgeKind& kind, const CutoffVector& cutoffs_j,
                                const CutoffVector& cutoffs_k = {});

/// Largest binom(n, 2) accepted by tau_b_second_order.
inline constexpr long kSecondOrderMaxPairs = 10000;

/// Second-order Taylor approximation of E[tau-b] for a binary variable with
/// cutoff delta_j against a continuous one, at sample size n.
double tau_b_second_order(double r, double delta_j, int n);

/// Inversions never return correlations closer than this to +/-1.
inline constexpr double kClampMargin = 1e-6;

struct InversionResult {
    double value = 0.0;
    bool clamped = false;  ///< tau_hat fell outside the achievable range
    int iterations = 0;
};

/// Solves bridge(r) = tau_hat for r in [-1 + kClampMargin, 1 - kClampMargin]
/// by Newton's method safeguarded with bisection. Out-of-range tau_hat is
/// clamped to the nearest endpoint and flagged.
InversionResult invert_bridge(double tau_hat, const BridgeKind& kind,
                              const CutoffVector& cutoffs_j, const CutoffVector& cutoffs_k = {});

/// The individual closed-form bridges, exposed for direct use and testing.
/// Binary cutoffs are scalars; ternary cutoffs are (lower, upper).
namespace bridges {

BridgeEval continuous_continuous(double r);
BridgeEval binary_continuous(double r, double delta);
BridgeEval ternary_continuous(double r, double delta1, double delta2);
/// General ordinal-continuous form; trailing +inf cutoffs are allowed.
BridgeEval ordinal_continuous(double r, std::span<const double> cutoffs);
/// Ternary-ternary form; +inf upper cutoffs reduce it to the binary cases.
BridgeEval ternary_ternary(double r, double j1, double j2, double k1, double k2);
/// Variable j binary, variable k ternary.
BridgeEval binary_ternary(double r, double j1, double k1, double k2);
BridgeEval binary_binary(double r, double j1, double k1);

BridgeEval tau_b_binary_binary(double r, double j1, double k1);
BridgeEval tau_b_binary_continuous(double r, double delta);

}  // namespace bridges

}  // namespace mixcop
