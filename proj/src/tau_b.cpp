#include <cmath>
#include <string>

#include "mixcop/bridge.hpp"
#include "mixcop/errors.hpp"
#include "mixcop/normal_dist.hpp"

namespace mixcop {

namespace {

double log_binomial_pmf(long k, long n, double log_p, double log_q) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0) + static_cast<double>(k) * log_p +
           static_cast<double>(n - k) * log_q;
}

// E[f(K)] for K ~ Binomial(n, p).
template <class F>
double binomial_expectation(long n, double p, F f) {
    if (p <= 0.0) return f(0L);
    if (p >= 1.0) return f(n);
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    double total = 0.0;
    for (long k = 0; k <= n; ++k) {
        const double lw = log_binomial_pmf(k, n, log_p, log_q);
        if (lw < -745.0) continue;
        total += std::exp(lw) * f(k);
    }
    return total;
}

}  // namespace

double tau_b_second_order(double r, double delta_j, int n) {
    if (!(std::abs(r) < 1.0)) throw DomainError("tau_b_second_order: r must lie in (-1, 1)");
    if (!std::isfinite(delta_j)) throw DegenerateColumnError("tau_b_second_order: infinite cutoff");
    if (n < 2) throw DomainError("tau_b_second_order: n must be at least 2");
    const long pairs = static_cast<long>(n) * (n - 1) / 2;
    if (pairs > kSecondOrderMaxPairs) {
        throw DomainError("tau_b_second_order: binom(n, 2) = " + std::to_string(pairs) +
                          " exceeds " + std::to_string(kSecondOrderMaxPairs));
    }

    const double s = r / std::sqrt(2.0);
    const double P = std_cdf(delta_j);
    const double both_low = trivariate_cdf(delta_j, delta_j, 0.0, r);
    const double p_conc = 2.0 * (bivariate_cdf(delta_j, 0.0, s) - both_low);
    const double p_disc = 2.0 * (bivariate_cdf(delta_j, 0.0, -s) - both_low);
    const double p_untied = p_conc + p_disc;
    const double N = static_cast<double>(pairs);
    const double sqrtN = std::sqrt(N);

    // A = (C - D) / sqrt(N), T = sqrt(number of pairs untied in the binary column).
    const double mu_a = sqrtN * (p_conc - p_disc);
    const double mu_t = binomial_expectation(n, P, [n](long n0) {
        return std::sqrt(static_cast<double>(n0) * static_cast<double>(n - n0));
    });
    if (!(mu_t > 0.0)) throw DegenerateColumnError("tau_b_second_order: binary column is constant");
    const double var_t = N * 2.0 * P * (1.0 - P) - mu_t * mu_t;

    // With (C, D) multinomial, E[(C - D) sqrt(C + D)] collapses to a sum over
    // S = C + D ~ Binomial(N, p_untied): E[C - D | S] = S (p_conc - p_disc) / p_untied.
    double e_cross = 0.0;
    if (p_untied > 0.0) {
        const double e_s32 = binomial_expectation(pairs, p_untied, [](long k) {
            const double x = static_cast<double>(k);
            return x * std::sqrt(x);
        });
        e_cross = (p_conc - p_disc) / p_untied * e_s32;
    }
    const double cov_at = e_cross / sqrtN - mu_a * mu_t;

    const double ratio = mu_a / mu_t;
    return ratio + (var_t * ratio - cov_at) / (mu_t * mu_t);
}

}  // namespace mixcop
