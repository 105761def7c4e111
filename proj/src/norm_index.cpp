// SPDX-License-Identifier: MIT
#include "normbridge/norm_index.hpp"

#include "normbridge/errors.hpp"
#include "normbridge/rational.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace normbridge {

double parse_index(std::string_view text) {
    if (text == "inf" || text == "Inf" || text == "infinity" || text == "∞") return kInf;
    double p = 0.0;
    try {
        p = parse_rational(text).get_d();
    } catch (const DomainError&) {
        throw DomainError("invalid integrability index '" + std::string(text) + "'");
    }
    if (!(p >= 1.0)) {
        throw DomainError("integrability index must lie in [1, inf], got " + std::string(text));
    }
    return p;
}

std::string format_index(double p) {
    if (std::isinf(p)) return "inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p);
    return std::string(buf, end);
}

NormIndexPair::NormIndexPair(double p_, double q_) : p(p_), q(q_) {
    if (!(p >= 1.0) || !(q >= 1.0)) {
        throw DomainError("indices (p, q) must lie in [1, inf]");
    }
}

}  // namespace normbridge
