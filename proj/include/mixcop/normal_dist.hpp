#pragma once

// Univariate, bivariate and structured trivariate standard normal
// distribution functions. Every function here is pure and reentrant.
//
// Infinite arguments are accepted as sentinels and resolved through the
// marginalization identities before any numerical integration happens.

namespace mixcop {

/// Arguments of the standard bivariate normal CDF P(X < u, Y < v) with
/// corr(X, Y) = rho.
struct BivariateArgs {
    double u;
    double v;
    double rho;
};

/// Arguments of the structured trivariate CDF
///
///     Phi3(a, b, c; r) = P(U1 < a, U2 < b, W < c)
///
/// where U1, U2 are independent standard normals and W = (V1 - V2) / sqrt(2)
/// for a second variable V with corr(U, V) = r. The covariance of
/// (U1, U2, W) is [[1, 0, r/sqrt2], [0, 1, -r/sqrt2], [r/sqrt2, -r/sqrt2, 1]].
struct TrivariateArgs {
    double a;
    double b;
    double c;
    double r;
};

double std_pdf(double x);

/// Phi(x), accurate to ~1 ulp of erfc.
double std_cdf(double x);

/// Inverse of std_cdf. Returns -inf / +inf at p = 0 / 1.
/// Throws DomainError for p outside [0, 1].
double std_quantile(double p);

double bivariate_pdf(double u, double v, double rho);

/// Phi2(u, v; rho). Absolute error below 1e-10 (typically ~1e-15).
double bivariate_cdf(const BivariateArgs& args);
inline double bivariate_cdf(double u, double v, double rho) {
    return bivariate_cdf(BivariateArgs{u, v, rho});
}

/// Phi2(u, v; rho) - Phi(u) Phi(v) with small relative error, including
/// near rho = +-1 where the difference is tiny and the naive form cancels.
double bivariate_cdf_excess(double u, double v, double rho);

/// Phi3(a, b, c; r), see TrivariateArgs. Requires |r| < 1.
double trivariate_cdf(const TrivariateArgs& args);
inline double trivariate_cdf(double a, double b, double c, double r) {
    return trivariate_cdf(TrivariateArgs{a, b, c, r});
}

/// d Phi3(a, b, c; r) / d r in closed form.
double trivariate_cdf_dr(const TrivariateArgs& args);
inline double trivariate_cdf_dr(double a, double b, double c, double r) {
    return trivariate_cdf_dr(TrivariateArgs{a, b, c, r});
}

}  // namespace mixcop
