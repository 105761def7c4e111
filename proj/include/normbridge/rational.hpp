// SPDX-License-Identifier: MIT
#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

namespace normbridge {

using Rational = mpq_class;

/// Parses "3", "-7/16", "0.125", "1e-3", "2.5E+2" into an exact rational.
/// Throws DomainError on malformed input or zero denominators.
Rational parse_rational(std::string_view text);

/// Exact rational value of a finite double (every finite double is dyadic).
Rational rational_from_double(double x);

/// "p/q" or "p" when the denominator is one.
std::string to_string(const Rational& x);

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

template <typename T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar T>
T pow_int(const T& base, unsigned exponent) {
    T result(1);
    T b(base);
    while (exponent != 0) {
        if (exponent & 1U) result *= b;
        exponent >>= 1U;
        if (exponent != 0) b *= b;
    }
    return result;
}

template <Scalar T>
T abs_value(const T& x) {
    if constexpr (std::same_as<T, double>) {
        return std::fabs(x);
    } else {
        return abs(x);
    }
}

inline int sgn_of(double x) { return (x > 0) - (x < 0); }
inline int sgn_of(const Rational& x) { return sgn(x); }

template <Scalar T>
bool is_zero(const T& x) {
    return sgn_of(x) == 0;
}


}  // namespace normbridge
