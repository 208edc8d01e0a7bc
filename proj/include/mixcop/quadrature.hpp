#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mixcop::quadrature {

namespace detail {

template <class F>
double bisect_panel(F& f, double a, double b, double abs_tol, int depth) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0.0;
    const double est = GK::integrate(f, a, b, 0, 0.0, &err);
    // Boost reports the non-adaptive error on the reference interval [-1, 1].
    err *= 0.5 * (b - a);
    // Kronrod-Gauss differences below a few ulps of the estimate are rounding noise.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(est);
    if (err <= std::max(abs_tol, noise) || depth == 0) return est;
    const double mid = 0.5 * (a + b);
    // Below ~1e-17 the Kronrod error estimate is pure rounding noise.
    const double child_tol = std::max(0.5 * abs_tol, 1e-17);
    return bisect_panel(f, a, mid, child_tol, depth - 1) +
           bisect_panel(f, mid, b, child_tol, depth - 1);
}

}  // namespace detail

/// Locally adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b] with
/// an absolute error target. Panels are bisected until each panel's
/// Kronrod-Gauss difference meets its share of the tolerance.
template <class F>
double integrate(F f, double a, double b, double abs_tol = 1e-14, int max_depth = 18) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, abs_tol, max_depth);
    return detail::bisect_panel(f, a, b, abs_tol, max_depth);
}

}  // namespace mixcop::quadrature
