#include "mixcop/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mixcop/errors.hpp"
#include "mixcop/normal_dist.hpp"

namespace mixcop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.70710678118654752440;

double Phi(double x) { return std_cdf(x); }
double Phi2(double u, double v, double r) { return bivariate_cdf(u, v, r); }
double phi2(double u, double v, double r) { return bivariate_pdf(u, v, r); }

void expect_cutoffs(const CutoffVector& c, int levels, const char* which) {
    if (c.levels() != levels) {
        throw DomainError(std::string("bridge: ") + which + " cutoffs have " +
                          std::to_string(c.size()) + " entries, expected " +
                          std::to_string(levels - 1));
    }
}

[[noreturn]] void unsupported(const BridgeKind& kind) {
    throw UnsupportedPairError("no bridge for ordinal pair with " + std::to_string(kind.levels_j) +
                               " x " + std::to_string(kind.levels_k) + " levels");
}

}  // namespace

namespace bridges {

BridgeEval continuous_continuous(double r) {
    return {2.0 / std::numbers::pi * std::asin(r),
            2.0 / std::numbers::pi / std::sqrt(1.0 - r * r)};
}

BridgeEval binary_continuous(double r, double delta) {
    const double s = r * kInvSqrt2;
    return {4.0 * Phi2(delta, 0.0, s) - 2.0 * Phi(delta),
            4.0 * phi2(delta, 0.0, s) * kInvSqrt2};
}

BridgeEval ternary_continuous(double r, double delta1, double delta2) {
    const double s = r * kInvSqrt2;
    const double value = 4.0 * Phi2(delta2, 0.0, s) - 2.0 * Phi(delta2) +
                         2.0 * (trivariate_cdf(delta1, delta2, 0.0, r) -
                                trivariate_cdf(delta2, delta1, 0.0, r));
    const double deriv = 4.0 * phi2(delta2, 0.0, s) * kInvSqrt2 +
                         2.0 * (trivariate_cdf_dr(delta1, delta2, 0.0, r) -
                                trivariate_cdf_dr(delta2, delta1, 0.0, r));
    return {value, deriv};
}

BridgeEval ordinal_continuous(double r, std::span<const double> cutoffs) {
    BridgeEval out;
    for (std::size_t l = 0; l < cutoffs.size(); ++l) {
        const double lower = cutoffs[l];
        const double upper = l + 1 < cutoffs.size() ? cutoffs[l + 1] : kInf;
        out.value += 4.0 * trivariate_cdf(lower, upper, 0.0, r) - 2.0 * Phi(lower) * Phi(upper);
        out.derivative += 4.0 * trivariate_cdf_dr(lower, upper, 0.0, r);
    }
    return out;
}

BridgeEval ternary_ternary(double r, double j1, double j2, double k1, double k2) {
    const double both_low = Phi2(j2, k2, r);     // P(Xj <= 1, Xk <= 1)
    const double both_high = Phi2(-j1, -k1, r);  // P(Xj >= 1, Xk >= 1)
    const double low_high = Phi(j2) - Phi2(j2, k1, r);
    const double high_low = Phi(k2) - Phi2(j1, k2, r);
    const double value = 2.0 * both_low * both_high - 2.0 * low_high * high_low;
    const double deriv = 2.0 * (phi2(j2, k2, r) * both_high + both_low * phi2(-j1, -k1, r)) +
                         2.0 * (phi2(j2, k1, r) * high_low + low_high * phi2(j1, k2, r));
    return {value, deriv};
}

BridgeEval binary_ternary(double r, double j1, double k1, double k2) {
    const double value = 2.0 * Phi2(j1, k2, r) * (1.0 - Phi(k1)) -
                         2.0 * Phi(k2) * (Phi(j1) - Phi2(j1, k1, r));
    const double deriv = 2.0 * phi2(j1, k2, r) * (1.0 - Phi(k1)) + 2.0 * Phi(k2) * phi2(j1, k1, r);
    return {value, deriv};
}

BridgeEval binary_binary(double r, double j1, double k1) {
    return {2.0 * bivariate_cdf_excess(j1, k1, r), 2.0 * phi2(j1, k1, r)};
}

BridgeEval tau_b_binary_binary(double r, double j1, double k1) {
    const double pj = Phi(j1);
    const double pk = Phi(k1);
    const double denom = std::sqrt((pj - pj * pj) * (pk - pk * pk));
    if (!(denom > 0.0)) {
        throw DegenerateColumnError("tau-b bridge: binary cutoff at infinity");
    }
    return {bivariate_cdf_excess(j1, k1, r) / denom, phi2(j1, k1, r) / denom};
}

BridgeEval tau_b_binary_continuous(double r, double delta) {
    const double p = Phi(delta);
    const double denom = std::sqrt(2.0 * p - 2.0 * p * p);
    if (!(denom > 0.0)) {
        throw DegenerateColumnError("tau-b bridge: binary cutoff at infinity");
    }
    const BridgeEval a = binary_continuous(r, delta);
    return {a.value / denom, a.derivative / denom};
}

}  // namespace bridges

BridgeEval bridge_forward_tau_b(double r, const BridgeKind& kind, const CutoffVector& cutoffs_j,
                                const CutoffVector& cutoffs_k) {
    if (!(std::abs(r) < 1.0)) throw DomainError("bridge: correlation must lie in (-1, 1)");
    if (kind.type == PairType::OrdinalContinuous && kind.levels_j == 2) {
        expect_cutoffs(cutoffs_j, 2, "first");
        return bridges::tau_b_binary_continuous(r, cutoffs_j[0]);
    }
    if (kind.type == PairType::OrdinalOrdinal && kind.levels_j == 2 && kind.levels_k == 2) {
        expect_cutoffs(cutoffs_j, 2, "first");
        expect_cutoffs(cutoffs_k, 2, "second");
        return bridges::tau_b_binary_binary(r, cutoffs_j[0], cutoffs_k[0]);
    }
    throw UnsupportedPairError("tau-b bridge is defined only for binary-binary and binary-continuous pairs");
}

BridgeEval bridge_forward(double r, const BridgeKind& kind, const CutoffVector& cutoffs_j,
                          const CutoffVector& cutoffs_k) {
    if (!(std::abs(r) < 1.0)) throw DomainError("bridge: correlation must lie in (-1, 1)");
    if (kind.variant == BridgeVariant::TauB1stOrder) {
        return bridge_forward_tau_b(r, kind, cutoffs_j, cutoffs_k);
    }

    switch (kind.type) {
    case PairType::ContinuousContinuous:
        return bridges::continuous_continuous(r);

    case PairType::OrdinalContinuous:
        if (kind.levels_j < 2) throw DomainError("bridge: ordinal variable needs two or more levels");
        expect_cutoffs(cutoffs_j, kind.levels_j, "ordinal");
        if (kind.levels_j == 2) return bridges::binary_continuous(r, cutoffs_j[0]);
        if (kind.levels_j == 3) return bridges::ternary_continuous(r, cutoffs_j[0], cutoffs_j[1]);
        return bridges::ordinal_continuous(r, cutoffs_j.values());

    case PairType::OrdinalOrdinal: {
        const int pj = kind.levels_j;
        const int pk = kind.levels_k;
        if (pj < 2 || pk < 2) throw DomainError("bridge: ordinal variable needs two or more levels");
        if (pj > 3 || pk > 3) unsupported(kind);
        expect_cutoffs(cutoffs_j, pj, "first");
        expect_cutoffs(cutoffs_k, pk, "second");
        if (pj == 2 && pk == 2) return bridges::binary_binary(r, cutoffs_j[0], cutoffs_k[0]);
        if (pj == 2) return bridges::binary_ternary(r, cutoffs_j[0], cutoffs_k[0], cutoffs_k[1]);
        if (pk == 2) return bridges::binary_ternary(r, cutoffs_k[0], cutoffs_j[0], cutoffs_j[1]);
        return bridges::ternary_ternary(r, cutoffs_j[0], cutoffs_j[1], cutoffs_k[0], cutoffs_k[1]);
    }
    }
    unsupported(kind);
}

InversionResult invert_bridge(double tau_hat, const BridgeKind& kind,
                              const CutoffVector& cutoffs_j, const CutoffVector& cutoffs_k) {
    if (std::isnan(tau_hat)) throw DomainError("invert_bridge: tau is NaN");
    constexpr double lo_end = -1.0 + kClampMargin;
    constexpr double hi_end = 1.0 - kClampMargin;
    auto F = [&](double r) { return bridge_forward(r, kind, cutoffs_j, cutoffs_k); };

    InversionResult result;
    if (kind.type == PairType::ContinuousContinuous && kind.variant == BridgeVariant::TauA) {
        const double r = std::sin(std::numbers::pi / 2.0 * std::clamp(tau_hat, -1.0, 1.0));
        result.value = std::clamp(r, lo_end, hi_end);
        result.clamped = r != result.value;
        return result;
    }

    const double f_lo = F(lo_end).value;
    const double f_hi = F(hi_end).value;
    if (!(f_hi > f_lo)) {
        throw DegenerateColumnError("invert_bridge: bridge is flat (degenerate cutoffs)");
    }
    if (tau_hat <= f_lo) return {lo_end, true, 0};
    if (tau_hat >= f_hi) return {hi_end, true, 0};

    double a = lo_end;
    double b = hi_end;
    double x = std::clamp(std::sin(std::numbers::pi / 2.0 * tau_hat), a, b);
    double prev_step = b - a;
    for (int it = 1; it <= 200; ++it) {
        const BridgeEval e = F(x);
        const double g = e.value - tau_hat;
        result.iterations = it;
        result.value = x;
        if (g == 0.0) return result;
        if (g < 0.0) a = x; else b = x;

        // Newton unless it leaves the bracket or fails to halve the last step.
        double step = 0.5 * (b - a);
        double next = a + step;
        if (e.derivative > 0.0) {
            const double newton = x - g / e.derivative;
            if (newton > a && newton < b && std::abs(g / e.derivative) < 0.5 * prev_step) {
                next = newton;
                step = std::abs(g / e.derivative);
            }
        }
        prev_step = step;
        x = next;
        if (step <= 1e-15 || b - a <= 1e-15) {
            result.value = x;
            return result;
        }
    }
    throw ConvergenceError("invert_bridge: no convergence after 200 iterations (tau=" +
                           std::to_string(tau_hat) + ", last r=" + std::to_string(x) + ")");
}

}  // namespace mixcop
