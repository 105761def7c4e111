// SPDX-License-Identifier: MIT
#include "normbridge/constants.hpp"

#include "normbridge/errors.hpp"

#include <cmath>
#include <vector>

namespace normbridge {

Corner corner_of(double p, double q) {
    auto one = [](double x) { return x == 1.0; };
    auto inf = [](double x) { return std::isinf(x) && x > 0; };
    if (!(one(p) || inf(p)) || !(one(q) || inf(q))) {
        throw DomainError("(p, q) = (" + format_index(p) + ", " + format_index(q) + ") is not a corner");
    }
    if (one(p)) return one(q) ? Corner::OneOne : Corner::OneInf;
    return one(q) ? Corner::InfOne : Corner::InfInf;
}

std::string corner_name(Corner c) {
    switch (c) {
        case Corner::OneOne: return "11";
        case Corner::OneInf: return "1inf";
        case Corner::InfOne: return "inf1";
        case Corner::InfInf: return "infinf";
    }
    return "?";
}

Corner parse_corner(const std::string& text) {
    std::string key = text;
    for (std::size_t at; (at = key.find("∞")) != std::string::npos;) key.replace(at, std::string("∞").size(), "inf");
    for (auto c : {Corner::OneOne, Corner::OneInf, Corner::InfOne, Corner::InfInf}) {
        if (corner_name(c) == key) return c;
    }
    throw DomainError("unknown corner '" + text + "' (expected 11, 1inf, inf1 or infinf)");
}

void require_monotone(const WeightFamily& w) {
    if (!w.check_monotone()) {
        throw InfeasibleError(
            "weights violate the monotonicity condition (some gamma_w > 0 has a subset u with "
            "gamma_u = 0): the anchored space is not contained in the ANOVA space and the ANOVA "
            "space is not contained in the anchored space");
    }
}

template <Scalar T>
CornerValue<T> lattice_corner(const WeightFamily& w, const T& x, bool q_inf) {
    const unsigned d = w.dim();
    constexpr unsigned limit = std::same_as<T, double> ? kMaxEnumerationDim : 16;
    if (d > limit) {
        throw CapacityError("lattice evaluation supports d <= " + std::to_string(limit) + ", got d = " +
                            std::to_string(d));
    }
    require_monotone(w);
    const Mask n = Mask{1} << d;
    std::vector<T> gamma(n, T(0));
    std::vector<char> in(n, 0);
    for (Mask u : w.support()) {
        gamma[u] = w.template gamma_as<T>(u);
        in[u] = 1;
    }
    std::vector<T> acc(n, T(0));
    if (q_inf) {
        acc = gamma;
        for (unsigned j = 0; j < d; ++j) {
            const Mask bit = Mask{1} << j;
            for (Mask u = 0; u < n; ++u) {
                if (!(u & bit) && !is_zero(acc[u | bit])) acc[u] += x * acc[u | bit];
            }
        }
        for (Mask u = 0; u < n; ++u) {
            if (in[u]) acc[u] /= gamma[u];
        }
    } else {
        for (Mask u = 0; u < n; ++u) {
            if (in[u]) acc[u] = T(1) / gamma[u];
        }
        for (unsigned j = 0; j < d; ++j) {
            const Mask bit = Mask{1} << j;
            for (Mask v = 0; v < n; ++v) {
                if ((v & bit) && !is_zero(acc[v ^ bit])) acc[v] += x * acc[v ^ bit];
            }
        }
        for (Mask v = 0; v < n; ++v) {
            if (in[v]) acc[v] *= gamma[v];
        }
    }
    CornerValue<T> best{T(0), 0};
    bool first = true;
    for (Mask u = 0; u < n; ++u) {
        if (!in[u]) continue;
        if (first || acc[u] > best.value) {
            best = {acc[u], u};
            first = false;
        }
    }
    return best;
}

template CornerValue<double> lattice_corner<double>(const WeightFamily&, const double&, bool);
template CornerValue<Rational> lattice_corner<Rational>(const WeightFamily&, const Rational&, bool);

namespace {

template <Scalar T>
T corner_dispatch(const WeightFamily& w, const T& m, const T& kappa, double p, double q, bool closed_only) {
    const Corner c = corner_of(p, q);
    require_monotone(w);
    T x = uses_kappa(c) ? kappa : m;
    if constexpr (std::same_as<T, Rational>) x.canonicalize();
    if constexpr (std::same_as<T, double>) {
        if (std::isinf(x)) {
            if (uses_kappa(c)) {
                throw InfeasibleError("C_{1,q} needs a finite kappa; the integrability condition eq2 "
                                      "fails at p = 1 for this density");
            }
            throw InfeasibleError("C_{inf,q} needs a finite m; survival is not integrable");
        }
    }
    if (sgn_of(x) < 0) throw DomainError("density scalars must be non-negative");
    if (has_closed_form(w)) return closed_form_value(w, x, q_is_inf(c));
    if (closed_only && w.dim() > kMaxBruteForceDim) {
        throw CapacityError("no closed form for " + w.description() + " and d > " +
                            std::to_string(kMaxBruteForceDim));
    }
    return lattice_corner(w, x, q_is_inf(c)).value;
}

}  // namespace

double corner_constant(const WeightFamily& w, double m, double kappa, double p, double q) {
    return corner_dispatch<double>(w, m, kappa, p, q, false);
}

Rational corner_constant_exact(const WeightFamily& w, const Rational& m, const Rational& kappa, double p,
                               double q) {
    return corner_dispatch<Rational>(w, m, kappa, p, q, false);
}

double closed_form_constant(const WeightFamily& w, double m, double kappa, double p, double q) {
    return corner_dispatch<double>(w, m, kappa, p, q, true);
}

Rational closed_form_constant_exact(const WeightFamily& w, const Rational& m, const Rational& kappa,
                                    double p, double q) {
    return corner_dispatch<Rational>(w, m, kappa, p, q, true);
}

}  // namespace normbridge
