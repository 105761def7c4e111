// SPDX-License-Identifier: MIT
#include "normbridge/structured.hpp"

#include "normbridge/constants.hpp"
#include "normbridge/errors.hpp"
#include "normbridge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace normbridge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// k·ln y with 0·ln 0 = 0.
double times_log(double k, double log_y) { return k == 0.0 ? 0.0 : k * log_y; }

template <Scalar T>
T binomial_as(unsigned n, unsigned k) {
    if (k > n) return T(0);
    T out(1);
    for (unsigned i = 1; i <= k; ++i) {
        out *= T(n - k + i);
        out /= T(i);
    }
    return out;
}

template <Scalar T>
T omega_as(const WeightFamily& w) {
    if constexpr (std::same_as<T, double>) {
        return w.spec().omega.get_d();
    } else {
        return w.spec().omega;
    }
}

template <Scalar T>
T product_gamma_as(const WeightFamily& w, unsigned j) {
    if constexpr (std::same_as<T, double>) {
        return w.product_gamma(j);
    } else {
        return w.product_gamma_exact(j);
    }
}

template <Scalar T>
T finite_order_value(const WeightFamily& w, const T& x, bool q_inf) {
    const unsigned d = w.dim();
    const unsigned r = std::min(w.spec().r, d);
    const T y = x * omega_as<T>(w);
    if (!q_inf) return pow_int(T(T(1) + y), r);
    T best(0);
    for (unsigned s = 0; s <= r; ++s) {
        T sum(0);
        T yk(1);
        for (unsigned k = 0; k + s <= w.spec().r; ++k) {
            sum += binomial_as<T>(d - s, k) * yk;
            yk *= y;
        }
        if (s == 0 || sum > best) best = sum;
    }
    return best;
}

/// Σ over sets w ⊇ u with diam(w) ≤ r of y^{|w \ u|}, for u with min a and
/// max b (a = b for singletons), coordinates 1..d.
template <Scalar T>
T diameter_window_sum(unsigned d, unsigned r, unsigned a, unsigned b, const T& y, const std::vector<T>& one_plus_y_pow) {
    T sum(0);
    const unsigned lo_min = b > r ? b - r : 1;
    for (unsigned lo = std::max(1U, lo_min); lo <= a; ++lo) {
        const unsigned hi_max = std::min(d, lo + r);
        for (unsigned hi = b; hi <= hi_max; ++hi) {
            unsigned forced = (lo != a ? 1U : 0U) + (hi != b ? 1U : 0U);
            unsigned interior = hi - lo >= 1 ? hi - lo - 1 : 0;
            unsigned taken = 0;
            if (a != b) {
                taken += lo < a ? 1U : 0U;
                taken += hi > b ? 1U : 0U;
            } else if (lo < a && a < hi) {
                taken = 1;
            }
            unsigned free = interior - taken;
            T term = one_plus_y_pow[free];
            if (forced == 1) term *= y;
            if (forced == 2) term *= y * y;
            sum += term;
        }
    }
    return sum;
}

template <Scalar T>
T finite_diameter_value(const WeightFamily& w, const T& x, bool q_inf) {
    const unsigned d = w.dim();
    const unsigned r = w.spec().r;
    const T y = x * omega_as<T>(w);
    if (!q_inf) return pow_int(T(T(1) + y), std::min(r + 1, d));
    if (d == 0) return T(1);
    std::vector<T> one_plus_y_pow(r + 2, T(1));
    for (unsigned i = 1; i < one_plus_y_pow.size(); ++i) one_plus_y_pow[i] = one_plus_y_pow[i - 1] * (T(1) + y);
    // u = ∅
    T best = T(1) + T(d) * y;
    for (unsigned delta = 1; delta <= std::min(r, d - 1); ++delta) {
        best += T(d - delta) * y * y * one_plus_y_pow[delta - 1];
    }
    for (unsigned a = 1; a <= d; ++a) {
        for (unsigned b = a; b <= std::min(d, a + r); ++b) {
            T s = diameter_window_sum<T>(d, r, a, b, y, one_plus_y_pow);
            if (s > best) best = s;
        }
    }
    return best;
}

Rational pod_value_exact(const WeightFamily& w, const Rational& x, bool q_inf) {
    if (!w.exact_available()) throw DomainError(w.description() + " has irrational weights");
    const unsigned d = w.dim();
    const auto b1 = static_cast<unsigned>(w.spec().beta1.get_num().get_ui());
    const auto b2 = static_cast<unsigned>(w.spec().beta2.get_num().get_ui());
    std::vector<Rational> xs(d + 1);
    for (unsigned j = 1; j <= d; ++j) xs[j] = w.spec().c * pow_int(Rational(1, j), b2);
    // e[k] over the prefix x_1..x_t
    std::vector<Rational> e(d + 1, Rational(0));
    e[0] = 1;
    Rational best(0);
    auto consider = [&](unsigned t) {
        Rational sum(0);
        Rational xk(1);
        for (unsigned k = 0; k <= t; ++k) {
            Rational ratio(1);
            if (q_inf) {
                const unsigned s = d - t;
                for (unsigned i = s + 1; i <= s + k; ++i) ratio *= i;
            } else {
                for (unsigned i = t - k + 1; i <= t; ++i) ratio *= i;
            }
            sum += xk * pow_int(ratio, b1) * e[k];
            xk *= x;
        }
        if (sum > best) best = sum;
    };
    consider(0);
    for (unsigned t = 1; t <= d; ++t) {
        for (unsigned k = t; k >= 1; --k) e[k] += e[k - 1] * xs[t];
        consider(t);
    }
    best.canonicalize();
    return best;
}

double pod_value(const WeightFamily& w, double x, bool q_inf) {
    const unsigned d = w.dim();
    if (x == 0.0) return 1.0;
    const double b1 = w.spec().beta1.get_d();
    const double b2 = w.spec().beta2.get_d();
    const double lc = std::log(w.spec().c.get_d());
    const double lx = std::log(x);
    std::vector<double> le(d + 1, kNegInf);
    le[0] = 0.0;
    double best = kNegInf;
    auto consider = [&](unsigned t) {
        double acc = kNegInf;
        for (unsigned k = 0; k <= t; ++k) {
            if (le[k] == kNegInf) continue;
            double lratio = q_inf ? std::lgamma(d - t + k + 1.0) - std::lgamma(d - t + 1.0)
                                  : std::lgamma(t + 1.0) - std::lgamma(t - k + 1.0);
            acc = log_add(acc, k * lx + b1 * lratio + le[k]);
        }
        best = std::max(best, acc);
    };
    consider(0);
    for (unsigned t = 1; t <= d; ++t) {
        const double lxt = lc - b2 * std::log(static_cast<double>(t));
        for (unsigned k = t; k >= 1; --k) le[k] = log_add(le[k], le[k - 1] + lxt);
        consider(t);
    }
    return std::exp(best);
}

}  // namespace

bool has_closed_form(const WeightFamily& w) { return w.kind() != WeightKind::Explicit; }

template <Scalar T>
T closed_form_value(const WeightFamily& w, const T& x, bool q_inf) {
    const unsigned d = w.dim();
    switch (w.kind()) {
        case WeightKind::Product: {
            T out(1);
            for (unsigned j = 1; j <= d; ++j) out *= T(1) + x * product_gamma_as<T>(w, j);
            return out;
        }
        case WeightKind::DimensionDependent: {
            if (d == 0) return T(1);
            if constexpr (std::same_as<T, double>) {
                return std::pow(1.0 + x / d, static_cast<double>(d));
            } else {
                return pow_int(T(T(1) + x / T(d)), d);
            }
        }
        case WeightKind::FiniteOrder: return finite_order_value<T>(w, x, q_inf);
        case WeightKind::FiniteDiameter: return finite_diameter_value<T>(w, x, q_inf);
        case WeightKind::POD:
            if constexpr (std::same_as<T, double>) {
                return pod_value(w, x, q_inf);
            } else {
                return pod_value_exact(w, x, q_inf);
            }
        case WeightKind::Explicit: break;
    }
    throw DomainError("no closed form for " + w.description());
}

template double closed_form_value<double>(const WeightFamily&, const double&, bool);
template Rational closed_form_value<Rational>(const WeightFamily&, const Rational&, bool);

// ---------------------------------------------------------------------------

double log_binomial(double n, double k) {
    if (k < 0 || k > n) return kNegInf;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double lq_norm(const std::vector<double>& x, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : x) m = std::max(m, std::fabs(v));
        return m;
    }
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double v : x) s += std::pow(std::fabs(v) / scale, q);
    return scale * std::pow(s, 1.0 / q);
}

double lq_power_norm(const LinearMap& apply, const LinearMap& apply_t, std::vector<double> x, double q,
                     unsigned iterations) {
    if (!(q > 1.0) || std::isinf(q)) throw DomainError("power iteration needs 1 < q < inf");
    double nx = lq_norm(x, q);
    if (nx == 0.0) return 0.0;
    for (double& v : x) v /= nx;
    std::vector<double> y;
    std::vector<double> z;
    double best = 0.0;
    double previous = -1.0;
    for (unsigned it = 0; it < iterations; ++it) {
        apply(x, y);
        const double ratio = lq_norm(y, q);
        best = std::max(best, ratio);
        if (ratio == 0.0 || std::fabs(ratio - previous) <= 1e-15 * ratio) break;
        previous = ratio;
        for (double& v : y) v = std::pow(v / ratio, q - 1.0);
        apply_t(y, z);
        for (double& v : z) v = std::pow(std::max(v, 0.0), 1.0 / (q - 1.0));
        double nz = lq_norm(z, q);
        if (nz == 0.0) break;
        for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] / nz;
    }
    return best;
}

double indicator_lower(const WeightFamily& w, double B, double q) {
    const unsigned d = w.dim();
    const double omega = w.spec().omega.get_d();
    const double lwb = std::log(omega * B);
    if (w.kind() == WeightKind::FiniteOrder) {
        const unsigned r = std::min(w.spec().r, d);
        double acc = kNegInf;
        for (unsigned s = 0; s <= r; ++s) {
            double lrow = log_binomial(d - s, r - s) + times_log(r - s, lwb);
            if (std::isinf(q)) {
                acc = std::max(acc, lrow);
            } else {
                acc = log_add(acc, log_binomial(d, s) + q * lrow);
            }
        }
        if (std::isinf(q)) return std::exp(acc);
        return std::exp((acc - log_binomial(d, r)) / q);
    }
    if (w.kind() != WeightKind::FiniteDiameter) return 0.0;
    if (d == 0) return 1.0;
    const unsigned len = std::min(w.spec().r + 1, d);
    const unsigned blocks = d - len + 1;
    const double y = omega * B;
    auto entry = [&](unsigned size, double count) { return std::pow(y, static_cast<double>(len - size)) * count; };
    auto count_of = [&](unsigned a, unsigned b) {
        long lo = std::max<long>(1, static_cast<long>(b) - static_cast<long>(len) + 1);
        long hi = std::min<long>(a, blocks);
        return hi >= lo ? static_cast<double>(hi - lo + 1) : 0.0;
    };
    double best = entry(0, blocks);
    double total = std::isinf(q) ? 0.0 : std::pow(best, q);
    for (unsigned a = 1; a <= d; ++a) {
        for (unsigned b = a; b <= std::min(d, a + len - 1); ++b) {
            double cnt = count_of(a, b);
            if (cnt == 0.0) continue;
            if (a == b) {
                double e = entry(1, cnt);
                best = std::max(best, e);
                if (!std::isinf(q)) total += std::pow(e, q);
                continue;
            }
            const unsigned gap = b - a - 1;
            for (unsigned extra = 0; extra <= gap; ++extra) {
                double e = entry(extra + 2, cnt);
                best = std::max(best, e);
                if (!std::isinf(q)) total += std::exp(log_binomial(gap, extra)) * std::pow(e, q);
            }
        }
    }
    if (std::isinf(q)) return best;
    return std::pow(total / blocks, 1.0 / q);
}

namespace {

/// max over θ ∈ [0, π/2] of |(cos θ + a sin θ, sin θ)|_q / |(cos θ, sin θ)|_q.
double two_by_two_ratio(double a, double q) {
    if (q == 1.0 || std::isinf(q)) return 1.0 + a;
    auto f = [&](double th) {
        double c = std::cos(th);
        double s = std::sin(th);
        std::vector<double> num{c + a * s, s};
        std::vector<double> den{c, s};
        return lq_norm(num, q) / lq_norm(den, q);
    };
    const double half_pi = std::numbers::pi / 2.0;
    const unsigned n = 64;
    double best = f(0.0);
    unsigned best_i = 0;
    for (unsigned i = 1; i <= n; ++i) {
        double v = f(half_pi * i / n);
        if (v > best) { best = v; best_i = i; }
    }
    double lo = half_pi * (best_i == 0 ? 0.0 : best_i - 1.0) / n;
    double hi = half_pi * std::min<double>(n, best_i + 1.0) / n;
    return std::max(best, maximize_scalar(f, lo, hi).second);
}

}  // namespace

double product_vector_lower(const WeightFamily& w, double B, double q) {
    const unsigned d = w.dim();
    if (w.kind() == WeightKind::DimensionDependent) {
        if (d == 0) return 1.0;
        return std::exp(d * std::log(two_by_two_ratio(B / d, q)));
    }
    if (w.kind() != WeightKind::Product) return 0.0;
    double log_total = 0.0;
    for (unsigned j = 1; j <= d; ++j) log_total += std::log(two_by_two_ratio(w.product_gamma(j) * B, q));
    return std::exp(log_total);
}

double pod_column_lower(const WeightFamily& w, double B, double q) {
    if (w.kind() != WeightKind::POD) return 0.0;
    const unsigned d = w.dim();
    if (B == 0.0) return 1.0;
    const double qq = std::isinf(q) ? 1.0 : q;
    const double b1 = w.spec().beta1.get_d();
    const double b2 = w.spec().beta2.get_d();
    const double lc = std::log(w.spec().c.get_d());
    const double lb = std::log(B);
    // q < ∞: le[k] = ln e_k(x_1^q..x_t^q). q = ∞: le[k] = ln of the product of the k largest x_j.
    std::vector<double> le(d + 1, kNegInf);
    le[0] = 0.0;
    double best = 0.0;  // t = 0: the column of ∅ is e_∅
    for (unsigned t = 1; t <= d; ++t) {
        const double lxt = lc - b2 * std::log(static_cast<double>(t));
        if (std::isinf(q)) {
            le[t] = le[t - 1] + lxt;
        } else {
            for (unsigned k = t; k >= 1; --k) le[k] = log_add(le[k], le[k - 1] + qq * lxt);
        }
        double acc = kNegInf;
        for (unsigned k = 0; k <= t; ++k) {
            double lterm = b1 * (std::lgamma(t + 1.0) - std::lgamma(t - k + 1.0)) + k * lb;
            if (std::isinf(q)) {
                acc = std::max(acc, lterm + le[k]);
            } else {
                acc = log_add(acc, qq * lterm + le[k]);
            }
        }
        best = std::max(best, std::isinf(q) ? acc : acc / qq);
    }
    return std::exp(best);
}

double symmetric_layered_lower(const WeightFamily& w, double B, double q, unsigned max_layers) {
    if (!w.is_symmetric()) return 0.0;
    const unsigned d = w.dim();
    unsigned top = d;
    while (top > 0 && w.log_layer_gamma(top) == kNegInf) --top;
    const unsigned n = top + 1;
    if (n > max_layers) return 0.0;
    const double lb = std::log(B);
    auto ln_n = [&](unsigned k) { return log_binomial(d, k); };
    std::vector<double> a(n * n, 0.0);  // a[s*n + k]
    for (unsigned s = 0; s < n; ++s) {
        for (unsigned k = s; k < n; ++k) {
            double inner = log_binomial(d - s, k - s) + w.log_layer_gamma(k) - w.log_layer_gamma(s) +
                           times_log(k - s, lb);
            if (!std::isinf(q)) inner += (ln_n(s) - ln_n(k)) / q;
            a[s * n + k] = std::exp(inner);
        }
    }
    if (std::isinf(q)) {
        // c ≡ 1 is optimal for q = ∞
        double best = 0.0;
        for (unsigned s = 0; s < n; ++s) {
            double row = 0.0;
            for (unsigned k = s; k < n; ++k) row += a[s * n + k];
            best = std::max(best, row);
        }
        return best;
    }
    if (q == 1.0) {
        double best = 0.0;
        for (unsigned k = 0; k < n; ++k) {
            double col = 0.0;
            for (unsigned s = 0; s <= k; ++s) col += a[s * n + k];
            best = std::max(best, col);
        }
        return best;
    }
    LinearMap apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        y.assign(n, 0.0);
        for (unsigned s = 0; s < n; ++s) {
            for (unsigned k = s; k < n; ++k) y[s] += a[s * n + k] * x[k];
        }
    };
    LinearMap apply_t = [&](const std::vector<double>& y, std::vector<double>& x) {
        x.assign(n, 0.0);
        for (unsigned s = 0; s < n; ++s) {
            for (unsigned k = s; k < n; ++k) x[k] += a[s * n + k] * y[s];
        }
    };
    return lq_power_norm(apply, apply_t, std::vector<double>(n, 1.0), q, 500);
}

}  // namespace normbridge
