// SPDX-License-Identifier: MIT
#include "normbridge/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace normbridge {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol) {
    if (a == b) return {0.0, 0.0};
    using boost::math::quadrature::gauss_kronrod;
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    try {
        if (std::isfinite(a) && std::isfinite(b)) {
            // Boost compares the scaled estimate with an unscaled error, so
            // tiny intervals never converge; integrate on [-1, 1] instead.
            const double mid = 0.5 * (a + b);
            const double half = 0.5 * (b - a);
            auto g = [&](double x) { return f(mid + half * x); };
            value = half * gauss_kronrod<double, 15>::integrate(g, -1.0, 1.0, 15, rel_tol, &error, &l1);
            error *= std::fabs(half);
        } else {
            value = gauss_kronrod<double, 15>::integrate(f, a, b, 15, rel_tol, &error, &l1);
        }
    } catch (const std::exception&) {
        return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    if (!std::isfinite(value)) {
        return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    (void)abs_tol;
    return {value, error};
}

std::pair<double, double> maximize_scalar(const std::function<double(double)>& f, double a,
                                          double b, unsigned iterations) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (unsigned i = 0; i < iterations && (b - a) > 1e-15 * (1.0 + std::fabs(a) + std::fabs(b)); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    double best_x = f1 >= f2 ? x1 : x2;
    double best = std::max(f1, f2);
    // endpoints are never sampled by the bracket
    double fa = f(a);
    double fb = f(b);
    if (fa > best) { best = fa; best_x = a; }
    if (fb > best) { best = fb; best_x = b; }
    return {best_x, best};
}

}  // namespace normbridge
