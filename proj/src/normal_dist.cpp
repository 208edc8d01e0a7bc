#include "mixcop/normal_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mixcop/errors.hpp"
#include "mixcop/quadrature.hpp"

namespace mixcop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kQuadTol = 1e-14;

// Acklam's rational approximation to the normal quantile (relative error
// ~1.2e-9); used only as the starting point for Newton refinement.
double quantile_initial_guess(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Solves Phi(x) = p for p <= 1/2, where the lower-tail erfc form keeps full
// relative precision of the residual.
double lower_quantile(double p) {
    double lo = -40.0;
    double hi = 0.0;
    double x = std::clamp(quantile_initial_guess(p), lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double f = std_cdf(x) - p;
        if (f == 0.0) return x;
        if (f < 0.0) lo = x; else hi = x;
        const double dens = std_pdf(x);
        double next = x;
        if (dens > 0.0) {
            // Halley correction on top of the Newton step.
            const double newton = f / dens;
            next = x - newton / (1.0 + 0.5 * x * newton);
        }
        if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - x);
        x = next;
        if (step <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

// Plackett derivative d Phi3 / d s at s = t (s = r / sqrt2), all limits finite.
double trivariate_ds(double a, double b, double c, double t) {
    const double t2 = t * t;
    const double one_m_t2 = 1.0 - t2;
    const double cond_sd = std::sqrt((1.0 - 2.0 * t2) / one_m_t2);
    const double mean_u2 = -t * (c - t * a) / one_m_t2;
    const double mean_u1 = t * (c + t * b) / one_m_t2;
    return bivariate_pdf(a, c, t) * std_cdf((b - mean_u2) / cond_sd) -
           bivariate_pdf(b, c, -t) * std_cdf((a - mean_u1) / cond_sd);
}

void check_correlation(double r, bool open) {
    if (std::isnan(r) || std::abs(r) > 1.0 || (open && std::abs(r) == 1.0)) {
        throw DomainError("correlation argument out of range");
    }
}

}  // namespace

double std_pdf(double x) {
    if (std::isinf(x)) return 0.0;
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_quantile(double p) {
    if (std::isnan(p) || p < 0.0 || p > 1.0) {
        throw DomainError("std_quantile: probability outside [0, 1]");
    }
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    if (p == 0.5) return 0.0;
    if (p < 0.5) return lower_quantile(p);
    return -lower_quantile(1.0 - p);
}

double bivariate_pdf(double u, double v, double rho) {
    check_correlation(rho, true);
    if (std::isinf(u) || std::isinf(v)) return 0.0;
    const double one_m_r2 = 1.0 - rho * rho;
    const double q = (u * u - 2.0 * rho * u * v + v * v) / one_m_r2;
    return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(one_m_r2));
}

double bivariate_cdf(const BivariateArgs& args) {
    const double u = args.u;
    const double v = args.v;
    const double rho = args.rho;
    check_correlation(rho, false);

    if (u == -kInf || v == -kInf) return 0.0;
    if (u == kInf) return std_cdf(v);
    if (v == kInf) return std_cdf(u);
    if (rho == 0.0) return std_cdf(u) * std_cdf(v);
    if (rho == 1.0) return std_cdf(std::min(u, v));
    if (rho == -1.0) return std::max(0.0, std_cdf(u) - std_cdf(-v));

    // Phi2 = Phi(u) Phi(v) + 1/(2 pi) int_0^{asin rho} exp(-(u^2 + v^2 - 2uv sin t) / (2 cos^2 t)) dt
    const double uu_vv = u * u + v * v;
    const double uv2 = 2.0 * u * v;
    auto integrand = [uu_vv, uv2](double t) {
        const double s = std::sin(t);
        const double c2 = 1.0 - s * s;
        return std::exp(-(uu_vv - uv2 * s) / (2.0 * c2));
    };
    const double integral = quadrature::integrate(integrand, 0.0, std::asin(rho), kQuadTol);
    const double value = std_cdf(u) * std_cdf(v) + integral / (2.0 * std::numbers::pi);
    return std::clamp(value, 0.0, 1.0);
}

double bivariate_cdf_excess(double u, double v, double rho) {
    check_correlation(rho, false);
    if (std::isinf(u) || std::isinf(v) || rho == 0.0) return 0.0;

    // (u^2 + v^2 - 2uv sin t) / (2 cos^2 t), rearranged so nothing cancels
    // as t approaches +-pi/2.
    const double diff2 = 0.5 * (u - v) * (u - v);
    const double sum2 = 0.5 * (u + v) * (u + v);
    const double uv = u * v;
    auto integrand = [diff2, sum2, uv](double t) {
        const double s = std::sin(t);
        const double c = std::cos(t);
        const double c2 = c * c;
        if (c2 == 0.0) return 0.0;
        const double q = s >= 0.0 ? diff2 / c2 + uv / (1.0 + s) : sum2 / c2 - uv / (1.0 - s);
        return std::exp(-q);
    };
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    constexpr double kHalfPi = 0.5 * std::numbers::pi;
    // Strong correlation: anchor at the Frechet bound of the nearer endpoint so
    // the quadrature only supplies a small correction.
    constexpr double kAnchor = 0.5;
    constexpr double kTinyTol = 1e-17;
    const double t = std::asin(rho);
    if (rho <= -kAnchor) {
        const double at_bound = -std::min(std_cdf(u) * std_cdf(v), std_cdf(-u) * std_cdf(-v));
        return at_bound + quadrature::integrate(integrand, -kHalfPi, t, kTinyTol) / kTwoPi;
    }
    if (rho >= kAnchor) {
        const double at_bound = std::min(std_cdf(u) * std_cdf(-v), std_cdf(-u) * std_cdf(v));
        return at_bound - quadrature::integrate(integrand, t, kHalfPi, kTinyTol) / kTwoPi;
    }
    return quadrature::integrate(integrand, 0.0, t, kTinyTol) / kTwoPi;
}

double trivariate_cdf(const TrivariateArgs& args) {
    const double a = args.a;
    const double b = args.b;
    const double c = args.c;
    const double r = args.r;
    check_correlation(r, true);
    const double s = r * kInvSqrt2;

    if (a == -kInf || b == -kInf || c == -kInf) return 0.0;
    if (a == kInf && b == kInf) return std_cdf(c);
    if (a == kInf) return bivariate_cdf(b, c, -s);
    if (b == kInf) return bivariate_cdf(a, c, s);
    if (c == kInf) return std_cdf(a) * std_cdf(b);

    const double base = std_cdf(a) * std_cdf(b) * std_cdf(c);
    if (r == 0.0) return base;

    // Integrate the Plackett derivative along the correlation path from
    // independence (s = 0) to s = r / sqrt2.
    auto integrand = [a, b, c](double t) { return trivariate_ds(a, b, c, t); };
    const double value = base + quadrature::integrate(integrand, 0.0, s, kQuadTol);
    return std::clamp(value, 0.0, 1.0);
}

double trivariate_cdf_dr(const TrivariateArgs& args) {
    const double a = args.a;
    const double b = args.b;
    const double c = args.c;
    const double r = args.r;
    check_correlation(r, true);
    const double s = r * kInvSqrt2;

    if (a == -kInf || b == -kInf || c == -kInf || c == kInf) return 0.0;
    if (a == kInf && b == kInf) return 0.0;
    if (a == kInf) return -bivariate_pdf(b, c, -s) * kInvSqrt2;
    if (b == kInf) return bivariate_pdf(a, c, s) * kInvSqrt2;
    return trivariate_ds(a, b, c, s) * kInvSqrt2;
}

}  // namespace mixcop
