// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <utility>

namespace normbridge {

struct QuadratureResult {
    double value;
    double error;
};

/// Adaptive Gauss–Kronrod (7/15) on [a, b]; b may be +∞.
/// Stops when the error estimate is below rel_tol·∫|f| or abs_tol.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-10, double rel_tol = 1e-12);

/// Golden-section maximisation of f on [a, b]; returns (argmax, max).
std::pair<double, double> maximize_scalar(const std::function<double(double)>& f, double a,
                                          double b, unsigned iterations = 200);

}  // namespace normbridge
