// SPDX-License-Identifier: MIT
#include "normbridge/bounds.hpp"

#include "normbridge/errors.hpp"
#include "normbridge/parallel.hpp"
#include "normbridge/structured.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace normbridge {

LatticeOperator::LatticeOperator(const WeightFamily& w, double B) : d_(w.dim()), b_(B) {
    if (d_ > kMaxEnumerationDim) {
        throw CapacityError("lattice operator needs d <= " + std::to_string(kMaxEnumerationDim));
    }
    if (!(B >= 0.0) || !std::isfinite(B)) throw DomainError("B must be finite and non-negative");
    require_monotone(w);
    const std::size_t n = std::size_t{1} << d_;
    gamma_.assign(n, 0.0);
    in_.assign(n, 0);
    for (Mask u : w.support()) {
        gamma_[u] = w.gamma(u);
        in_[u] = 1;
    }
}

void LatticeOperator::apply(const std::vector<double>& c, std::vector<double>& y) const {
    const std::size_t n = size();
    y.assign(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        if (in_[v]) y[v] = gamma_[v] * c[v];
    }
    for (unsigned j = 0; j < d_; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t u = 0; u < n; ++u) {
            if (!(u & bit)) y[u] += b_ * y[u | bit];
        }
    }
    for (std::size_t u = 0; u < n; ++u) y[u] = in_[u] ? y[u] / gamma_[u] : 0.0;
}

void LatticeOperator::apply_transpose(const std::vector<double>& z, std::vector<double>& x) const {
    const std::size_t n = size();
    x.assign(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        if (in_[u]) x[u] = z[u] / gamma_[u];
    }
    for (unsigned j = 0; j < d_; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t v = 0; v < n; ++v) {
            if (v & bit) x[v] += b_ * x[v ^ bit];
        }
    }
    for (std::size_t v = 0; v < n; ++v) x[v] = in_[v] ? x[v] * gamma_[v] : 0.0;
}

double LatticeOperator::ratio(const std::vector<double>& c, double q) const {
    double nc = lq_norm(c, q);
    if (nc == 0.0) return 0.0;
    std::vector<double> y;
    apply(c, y);
    return lq_norm(y, q) / nc;
}

std::pair<double, Mask> LatticeOperator::best_column(double q) const {
    const std::size_t n = size();
    std::vector<double> g(n, 0.0);
    const bool sup = std::isinf(q);
    for (std::size_t u = 0; u < n; ++u) {
        if (in_[u]) g[u] = sup ? 1.0 / gamma_[u] : std::pow(gamma_[u], -q);
    }
    const double factor = sup ? b_ : std::pow(b_, q);
    for (unsigned j = 0; j < d_; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t v = 0; v < n; ++v) {
            if (!(v & bit)) continue;
            if (sup) {
                g[v] = std::max(g[v], factor * g[v ^ bit]);
            } else {
                g[v] += factor * g[v ^ bit];
            }
        }
    }
    double best = -1.0;
    Mask arg = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (!in_[v]) continue;
        double col = sup ? gamma_[v] * g[v] : gamma_[v] * std::pow(g[v], 1.0 / q);
        if (col > best) {
            best = col;
            arg = v;
        }
    }
    return {best, arg};
}

std::string strategy_name(LowerStrategy s) {
    switch (s) {
        case LowerStrategy::Best: return "best";
        case LowerStrategy::Row: return "row";
        case LowerStrategy::Column: return "column";
        case LowerStrategy::Layered: return "layered";
        case LowerStrategy::Indicator: return "indicator";
        case LowerStrategy::Gradient: return "gradient";
        case LowerStrategy::Power: return "power";
        case LowerStrategy::ProductVector: return "product-vector";
    }
    return "?";
}

LowerStrategy parse_strategy(const std::string& name) {
    for (auto s : {LowerStrategy::Best, LowerStrategy::Row, LowerStrategy::Column, LowerStrategy::Layered,
                   LowerStrategy::Indicator, LowerStrategy::Gradient, LowerStrategy::Power,
                   LowerStrategy::ProductVector}) {
        if (strategy_name(s) == name) return s;
    }
    throw DomainError("unknown lower-bound strategy '" + name + "'");
}

double interpolation_upper(const WeightFamily& w, double m, double kappa, const NormIndexPair& pq) {
    const double ip = reciprocal(pq.p);
    const double iq = reciprocal(pq.q);
    double e_mixed;
    double e_11;
    double e_inf;
    double p_mixed;
    double q_mixed;
    if (pq.p <= pq.q) {
        e_mixed = ip - iq;
        e_11 = iq;
        e_inf = 1.0 - ip;
        p_mixed = 1.0;
        q_mixed = kInf;
    } else {
        e_mixed = iq - ip;
        e_11 = ip;
        e_inf = 1.0 - iq;
        p_mixed = kInf;
        q_mixed = 1.0;
    }
    double log_total = 0.0;
    auto factor = [&](double e, double p, double q) {
        if (e <= 0.0) return;
        log_total += e * std::log(corner_constant(w, m, kappa, p, q));
    };
    factor(e_mixed, p_mixed, q_mixed);
    factor(e_11, 1.0, 1.0);
    factor(e_inf, kInf, kInf);
    return std::exp(log_total);
}

namespace {

std::vector<double> ones_on_support(const LatticeOperator& op) {
    std::vector<double> c(op.size(), 0.0);
    for (std::size_t u = 0; u < c.size(); ++u) {
        if (op.in_support(u)) c[u] = 1.0;
    }
    return c;
}

double layered_dense(const LatticeOperator& op, double q) {
    const unsigned d = op.dim();
    std::vector<double> count(d + 1, 0.0);
    for (std::size_t u = 0; u < op.size(); ++u) {
        if (op.in_support(u)) count[popcount(u)] += 1.0;
    }
    if (std::isinf(q)) return op.ratio(ones_on_support(op), q);
    if (q == 1.0) {
        double best = 0.0;
        for (unsigned k = 0; k <= d; ++k) {
            if (count[k] == 0.0) continue;
            std::vector<double> c(op.size(), 0.0);
            for (std::size_t u = 0; u < c.size(); ++u) {
                if (op.in_support(u) && popcount(u) == k) c[u] = 1.0;
            }
            best = std::max(best, op.ratio(c, 1.0));
        }
        return best;
    }
    std::vector<double> scale(d + 1, 0.0);
    for (unsigned k = 0; k <= d; ++k) {
        if (count[k] > 0.0) scale[k] = std::pow(count[k], -1.0 / q);
    }
    std::vector<double> c;
    std::vector<double> x;
    LinearMap apply = [&](const std::vector<double>& phi, std::vector<double>& y) {
        c.assign(op.size(), 0.0);
        for (std::size_t u = 0; u < c.size(); ++u) {
            if (op.in_support(u)) c[u] = phi[popcount(u)] * scale[popcount(u)];
        }
        op.apply(c, y);
    };
    LinearMap apply_t = [&](const std::vector<double>& z, std::vector<double>& phi) {
        op.apply_transpose(z, x);
        phi.assign(d + 1, 0.0);
        for (std::size_t u = 0; u < x.size(); ++u) phi[popcount(u)] += x[u];
        for (unsigned k = 0; k <= d; ++k) phi[k] *= scale[k];
    };
    std::vector<double> start(d + 1, 0.0);
    for (unsigned k = 0; k <= d; ++k) start[k] = count[k] > 0.0 ? 1.0 : 0.0;
    return lq_power_norm(apply, apply_t, start, q, 300);
}

double gradient_restarts(const LatticeOperator& op, double q, const LowerOptions& opt) {
    std::vector<double> results(opt.restarts, 0.0);
    parallel_for(opt.restarts, [&](std::size_t r) {
        std::mt19937_64 rng(opt.seed * 0x9E3779B97F4A7C15ULL + r);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> c(op.size(), 0.0);
        for (std::size_t u = 0; u < c.size(); ++u) {
            if (op.in_support(u)) c[u] = unit(rng);
        }
        std::vector<double> y;
        std::vector<double> g;
        std::vector<double> yq;
        double best = 0.0;
        for (unsigned it = 0; it < opt.gradient_steps; ++it) {
            double nc = lq_norm(c, q);
            if (nc == 0.0) break;
            for (double& v : c) v /= nc;
            op.apply(c, y);
            double ny = lq_norm(y, q);
            best = std::max(best, ny);
            if (ny == 0.0) break;
            yq.resize(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) yq[i] = std::pow(y[i] / ny, q - 1.0) / ny;
            op.apply_transpose(yq, g);
            for (std::size_t u = 0; u < c.size(); ++u) {
                if (!op.in_support(u)) continue;
                double grad = g[u] - std::pow(c[u], q - 1.0);
                c[u] = std::max(0.0, c[u] + opt.step * grad);
            }
        }
        best = std::max(best, op.ratio(c, q));
        // round to the unit vectors at the heaviest coordinates; near q = 1 the
        // optimum sits at a vertex that projected steps approach slowly
        std::vector<std::size_t> order;
        for (std::size_t u = 0; u < c.size(); ++u) {
            if (op.in_support(u)) order.push_back(u);
        }
        const std::size_t top = std::min<std::size_t>(4, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                          [&](std::size_t a, std::size_t b) { return c[a] > c[b] || (c[a] == c[b] && a < b); });
        std::vector<double> e(c.size(), 0.0);
        for (std::size_t i = 0; i < top; ++i) {
            e[order[i]] = 1.0;
            best = std::max(best, op.ratio(e, q));
            e[order[i]] = 0.0;
        }
        results[r] = best;
    });
    return *std::max_element(results.begin(), results.end());
}

}  // namespace

double lower_with(const WeightFamily& w, double B, double q, LowerStrategy s, const LowerOptions& opt) {
    if (!(B >= 0.0)) throw DomainError("B must be non-negative");
    if (std::isinf(B)) throw InfeasibleError("B_p = inf: eq2 fails at this p, no finite lower bound");
    require_monotone(w);
    const unsigned d = w.dim();
    const bool dense = d <= opt.dense_limit;
    const bool finite_q = !std::isinf(q);
    switch (s) {
        case LowerStrategy::Row:
            if (!finite_q) {
                return has_closed_form(w) ? closed_form_value(w, B, true) : lattice_corner(w, B, true).value;
            }
            if (!dense) return 0.0;
            {
                LatticeOperator op(w, B);
                return op.ratio(ones_on_support(op), q);
            }
        case LowerStrategy::Column:
            if (q == 1.0) {
                return has_closed_form(w) ? closed_form_value(w, B, false) : lattice_corner(w, B, false).value;
            }
            if (w.kind() == WeightKind::POD) return pod_column_lower(w, B, q);
            if (!dense) return 0.0;
            return LatticeOperator(w, B).best_column(q).first;
        case LowerStrategy::Layered:
            if (w.is_symmetric()) return symmetric_layered_lower(w, B, q);
            if (!dense) return 0.0;
            return layered_dense(LatticeOperator(w, B), q);
        case LowerStrategy::Indicator: return indicator_lower(w, B, q);
        case LowerStrategy::ProductVector: return product_vector_lower(w, B, q);
        case LowerStrategy::Power:
            if (!dense || !finite_q || q == 1.0) return 0.0;
            {
                LatticeOperator op(w, B);
                LinearMap apply = [&](const std::vector<double>& x, std::vector<double>& y) { op.apply(x, y); };
                LinearMap apply_t = [&](const std::vector<double>& z, std::vector<double>& x) {
                    op.apply_transpose(z, x);
                };
                return lq_power_norm(apply, apply_t, ones_on_support(op), q, 300);
            }
        case LowerStrategy::Gradient:
            if (d > opt.gradient_limit || !finite_q) return 0.0;
            return gradient_restarts(LatticeOperator(w, B), q, opt);
        case LowerStrategy::Best: break;
    }
    throw DomainError("lower_with needs a concrete strategy");
}

LowerBound variational_lower(const WeightFamily& w, double B, const NormIndexPair& pq, LowerStrategy s,
                             const LowerOptions& opt) {
    if (s != LowerStrategy::Best) return {lower_with(w, B, pq.q, s, opt), s};
    LowerBound best{0.0, LowerStrategy::Row};
    for (auto k : {LowerStrategy::Row, LowerStrategy::Column, LowerStrategy::Layered, LowerStrategy::Indicator,
                   LowerStrategy::ProductVector, LowerStrategy::Power, LowerStrategy::Gradient}) {
        double v = lower_with(w, B, pq.q, k, opt);
        if (v > best.value) best = {v, k};
    }
    return best;
}

EmbeddingConstants embedding_norm(const WeightFamily& w, const DensityMetrics& metrics, const NormIndexPair& pq,
                                  const LowerOptions& opt) {
    require_monotone(w);
    EmbeddingConstants out{pq.p, pq.q, std::nullopt, std::nullopt, 0.0, 0.0, std::nullopt, w.dim(), ""};
    const double B = metrics.b_at(pq.p);
    if (pq.is_corner()) {
        const Corner c = corner_of(pq.p, pq.q);
        const double exact = corner_constant(w, metrics.m, metrics.kappa, pq.p, pq.q);
        out.exact = exact;
        const auto& xr = uses_kappa(c) ? metrics.exact_kappa : metrics.exact_m;
        if (xr && w.exact_available() && (w.dim() <= 64 || !has_closed_form(w))) {
            const Rational& m = metrics.exact_m ? *metrics.exact_m : *xr;
            const Rational& k = metrics.exact_kappa ? *metrics.exact_kappa : *xr;
            out.exact_rational = corner_constant_exact(w, m, k, pq.p, pq.q);
        }
        if (w.dim() <= 16) {
            out.witness = lattice_corner(w, uses_kappa(c) ? metrics.kappa : metrics.m, q_is_inf(c)).witness;
        }
        out.upper = interpolation_upper(w, metrics.m, metrics.kappa, pq);
        LowerBound lb = variational_lower(w, B, pq, LowerStrategy::Best, opt);
        out.lower = lb.value;
        out.method_notes = std::string("exact: ") + (has_closed_form(w) ? "closed form" : "lattice sums") +
                           "; lower: " + strategy_name(lb.strategy) + "; upper: interpolation";
        if (out.witness) out.method_notes += "; maximiser first in mask order";
        return out;
    }
    if (!std::isfinite(B)) {
        throw InfeasibleError("B_p = inf at p = " + format_index(pq.p) +
                              ": the integrability condition eq2 fails for this density");
    }
    LowerBound lb = variational_lower(w, B, pq, LowerStrategy::Best, opt);
    out.lower = lb.value;
    out.method_notes = "lower: " + strategy_name(lb.strategy) + " (best of row, column, layered, indicator, "
                       "product-vector, power, gradient)";
    try {
        out.upper = interpolation_upper(w, metrics.m, metrics.kappa, pq);
        out.method_notes += "; upper: interpolation of corner constants";
    } catch (const InfeasibleError& e) {
        out.upper = kInf;
        out.method_notes += std::string("; upper: inf (") + e.what() + ")";
    }
    return out;
}

}  // namespace normbridge
