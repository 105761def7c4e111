// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

namespace normbridge {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Hölder conjugate: 1/p + 1/p' = 1, with 1 ↔ ∞.
inline double conjugate(double p) {
    if (p == 1.0) return kInf;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

/// 1/p with 1/∞ = 0.
inline double reciprocal(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

/// Parses "1", "2.5", "4/3", "inf", "∞".
double parse_index(std::string_view text);

/// "inf" for ∞, shortest round-trip text otherwise.
std::string format_index(double p);

/// Integrability index pair (p, q), both in [1, ∞].
struct NormIndexPair {
    double p;
    double q;

    NormIndexPair(double p_, double q_);

    [[nodiscard]] double p_conjugate() const { return conjugate(p); }
    [[nodiscard]] double q_conjugate() const { return conjugate(q); }
    [[nodiscard]] bool is_corner() const {
        return (p == 1.0 || std::isinf(p)) && (q == 1.0 || std::isinf(q));
    }
};

}  // namespace normbridge
