// SPDX-License-Identifier: MIT
#include "normbridge/oracle.hpp"

#include "normbridge/decomp.hpp"
#include "normbridge/errors.hpp"
#include "normbridge/parallel.hpp"
#include "normbridge/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

namespace normbridge::oracle {

template <Scalar T>
T bruteforce_corner(const WeightFamily& w, const T& m, const T& kappa, double p, double q) {
    const unsigned d = w.dim();
    if (d > kMaxBruteForceDim) {
        throw CapacityError("brute force supports d <= " + std::to_string(kMaxBruteForceDim));
    }
    const Corner corner = corner_of(p, q);
    T x = uses_kappa(corner) ? kappa : m;
    if constexpr (std::same_as<T, Rational>) x.canonicalize();
    if constexpr (std::same_as<T, double>) {
        if (std::isinf(x)) throw InfeasibleError("corner scalar is infinite");
    }
    const Mask full = full_mask(d);
    const Mask n = Mask{1} << d;
    std::vector<T> gamma(n);
    for (Mask u = 0; u < n; ++u) gamma[u] = w.template gamma_as<T>(u);
    std::vector<T> xpow(d + 1, T(1));
    for (unsigned k = 1; k <= d; ++k) xpow[k] = xpow[k - 1] * x;

    std::vector<T> inv_gamma(n, T(0));
    for (Mask u = 0; u < n; ++u) {
        if (!is_zero(gamma[u])) inv_gamma[u] = T(1) / gamma[u];
    }

    T best(0);
    bool any = false;
    for (Mask outer = 0; outer < n; ++outer) {
        if (is_zero(gamma[outer])) continue;
        T sum(0);
        if (q_is_inf(corner)) {
            // Σ_{v ⊆ u^c} x^{|v|} γ_{u∪v} / γ_u, with 1/γ_u factored out
            const Mask u = outer;
            for_each_submask(full & ~u, [&](Mask v) {
                if (!is_zero(gamma[u | v])) sum += xpow[popcount(v)] * gamma[u | v];
            });
            sum *= inv_gamma[u];
        } else {
            // Σ_{u ⊆ v} x^{|v|−|u|} γ_v / γ_u, with γ_v factored out
            const Mask v = outer;
            const unsigned kv = popcount(v);
            for_each_submask(v, [&](Mask u) {
                if (!is_zero(gamma[u])) sum += xpow[kv - popcount(u)] * inv_gamma[u];
            });
            sum *= gamma[v];
        }
        if (!any || sum > best) {
            best = sum;
            any = true;
        }
    }
    return best;
}

template double bruteforce_corner<double>(const WeightFamily&, const double&, const double&, double, double);
template Rational bruteforce_corner<Rational>(const WeightFamily&, const Rational&, const Rational&, double,
                                              double);

namespace {

using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::tanh_sinh;

/// ∫_a^b f with tanh-sinh (endpoint singularities allowed, endpoints never sampled).
double ts_integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    thread_local tanh_sinh<double> ts;
    try {
        return ts.integrate(f, a, b, tol);
    } catch (const std::exception&) {
        return kInf;
    }
}

/// ∫_a^∞ f over dyadic shells, with a geometric tail estimate; ∞ when the
/// shells stop shrinking.
double half_line(const std::function<double(double)>& f, double a, double tol) {
    double total = ts_integrate(f, a, a + 1.0, tol);
    double lo = a + 1.0;
    double prev = total;
    unsigned growing = 0;
    for (unsigned k = 0; k < 1100 && std::isfinite(lo); ++k) {
        const double hi = 2.0 * lo;
        const double shell = ts_integrate(f, lo, hi, tol);
        if (!std::isfinite(shell)) return kInf;
        total += shell;
        const double rho = prev > 0.0 ? shell / prev : 0.0;
        growing = rho > 1.0 - 1e-3 ? growing + 1 : 0;
        if (growing >= 8) return kInf;
        if (shell == 0.0) return total;
        if (rho < 1.0 - 1e-3 && shell / (1.0 - rho) <= 1e-3 * tol * std::fabs(total)) {
            return total + shell * rho / (1.0 - rho);
        }
        prev = shell;
        lo = hi;
    }
    return total;
}

/// ψ̄ rebuilt from the pdf alone. Finite domains [0,T] are split at T/2 and
/// the right half is parameterised by s = T − t, so the mass next to T is
/// not lost to rounding of t.
class SurvivalOracle {
public:
    SurvivalOracle(const Density& density, double tol) : density_(density), tol_(tol) {
        const double end = density.domain_end();
        if (std::isfinite(end)) {
            half_ = 0.5 * end;
            right_mass_ = ts_integrate([&](double s) { return pdf_right(s); }, 0.0, half_, tol_);
            return;
        }
        // knots 0, 1, 2, 4, ... shortened wherever the pdf drops by more than 1e-2
        // within one step, until the pdf underflows
        knots_.push_back(0.0);
        for (double x = 1.0; x < 1e300;) {
            knots_.push_back(x);
            const double px = density.pdf(x);
            if (px < 1e-300) break;
            double step = x;
            while (step > 1e-3 * x && density.pdf(x + step) < 1e-2 * px) step *= 0.5;
            x += step;
        }
        std::vector<double> seg(knots_.size(), 0.0);
        for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
            seg[k] = ts_integrate(pdf_fn(), knots_[k], knots_[k + 1], tol_);
        }
        double tail = 0.0;
        if (density.pdf(knots_.back()) >= 1e-300) {
            exp_sinh<double> es;
            try {
                tail = es.integrate(pdf_fn(), knots_.back(), std::numeric_limits<double>::infinity(), tol_);
            } catch (const std::exception&) {
                tail = 0.0;
            }
        }
        suffix_.assign(knots_.size(), 0.0);
        suffix_.back() = tail;
        for (std::size_t k = knots_.size() - 1; k-- > 0;) suffix_[k] = suffix_[k + 1] + seg[k];
    }

    [[nodiscard]] bool finite() const { return knots_.empty(); }
    [[nodiscard]] double half() const { return half_; }

    [[nodiscard]] double pdf_left(double t) const { return density_.pdf(t); }
    [[nodiscard]] double pdf_right(double s) const { return density_.pdf_near(density_.domain_end(), -1, s); }

    /// ψ̄(t) for t ∈ [0, T/2] on finite domains, any t ≥ 0 otherwise.
    [[nodiscard]] double left(double t) const {
        if (finite()) return ts_integrate(pdf_fn(), t, half_, tol_) + right_mass_;
        auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
        if (it == knots_.end()) {
            exp_sinh<double> es;
            try {
                return es.integrate(pdf_fn(), t, std::numeric_limits<double>::infinity(), tol_);
            } catch (const std::exception&) {
                return 0.0;
            }
        }
        const std::size_t k = static_cast<std::size_t>(it - knots_.begin());
        return ts_integrate(pdf_fn(), t, knots_[k], tol_) + suffix_[k];
    }

    /// ψ̄(T − s) on finite domains.
    [[nodiscard]] double right(double s) const {
        return ts_integrate([&](double x) { return pdf_right(x); }, 0.0, s, tol_);
    }

private:
    [[nodiscard]] std::function<double(double)> pdf_fn() const {
        return [this](double t) { return density_.pdf(t); };
    }

    const Density& density_;
    double tol_;
    double half_ = 0.0;
    double right_mass_ = 0.0;
    std::vector<double> knots_;
    std::vector<double> suffix_;
};

double ratio_of(double bar, double ps) {
    if (bar <= 0.0) return 0.0;
    return ps > 0.0 ? bar / ps : kInf;
}

/// Scan on [a, b] (uniform plus geometric points toward a), then golden refinement.
double scan_sup(const std::function<double(double)>& r, double a, double b) {
    std::vector<double> xs;
    for (int i = 0; i <= 256; ++i) xs.push_back(a + (b - a) * i / 256.0);
    for (int k = 1; k <= 60; ++k) xs.push_back(a + (b - a) * std::ldexp(1.0, -k));
    std::sort(xs.begin(), xs.end());
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = r(xs[i]);
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    if (std::isinf(best)) return kInf;
    const double lo = xs[arg == 0 ? 0 : arg - 1];
    const double hi = xs[std::min(arg + 1, xs.size() - 1)];
    if (hi > lo) best = std::max(best, maximize_scalar(r, lo, hi).second);
    return best;
}

}  // namespace

QuadResult quad_metric(const Density& density, Metric metric, double p, double tol) {
    if (density.family() == DensityFamily::Tabulated) {
        throw DomainError("quad_metric is defined for parametric densities");
    }
    const double qtol = std::min(tol, 1e-12);
    const SurvivalOracle bar(density, qtol);
    if (metric == Metric::B && p == 1.0) metric = Metric::Kappa;
    if (metric == Metric::B && std::isinf(p)) metric = Metric::M;
    const double end = density.domain_end();

    switch (metric) {
        case Metric::M: {
            if (bar.finite()) {
                const double h = bar.half();
                double v = ts_integrate([&](double t) { return t * bar.pdf_left(t); }, 0.0, h, qtol) +
                           ts_integrate([&](double s) { return (end - s) * bar.pdf_right(s); }, 0.0, h, qtol);
                return {v, tol * std::max(1.0, v)};
            }
            double v = half_line([&](double t) { return t * density.pdf(t); }, 0.0, qtol);
            return {v, std::isinf(v) ? kInf : tol * std::max(1.0, v)};
        }
        case Metric::Kappa: {
            if (bar.finite()) {
                const double h = bar.half();
                double left = scan_sup([&](double t) { return ratio_of(bar.left(t), bar.pdf_left(t)); }, 0.0, h);
                // right half: s runs from T/2 down toward 0
                double right = scan_sup(
                    [&](double x) {
                        const double s = h - x;
                        return s > 0.0 ? ratio_of(bar.right(s), bar.pdf_right(s)) : 0.0;
                    },
                    0.0, h);
                double v = std::max(left, right);
                return {v, std::isinf(v) ? kInf : tol};
            }
            // doubling probe for unbounded growth of ψ̄/ψ
            std::vector<double> r;
            double t = 1.0;
            for (unsigned k = 0; k < 1000 && density.pdf(t) > 1e-280; ++k, t *= 2.0) {
                r.push_back(ratio_of(bar.left(t), density.pdf(t)));
            }
            if (r.size() >= 9) {
                bool growing = true;
                for (std::size_t i = r.size() - 8; i < r.size(); ++i) growing = growing && r[i] > 1.01 * r[i - 1];
                if (growing) return {kInf, kInf};
            }
            // keep the scan where ψ is a normal double; the tail is monotone there
            double lo = 0.5 * t;
            double hi = t;
            for (int i = 0; i < 60 && density.pdf(lo) > 1e-280; ++i) {
                const double mid = 0.5 * (lo + hi);
                (density.pdf(mid) > 1e-280 ? lo : hi) = mid;
            }
            double v = scan_sup([&](double x) { return ratio_of(bar.left(x), density.pdf(x)); }, 0.0, lo);
            return {v, tol};
        }
        case Metric::B: {
            const double pc = conjugate(p);
            auto h = [&](double sv, double ps) {
                if (sv <= 0.0) return 0.0;
                if (ps <= 0.0) return kInf;
                return std::exp(pc * std::log(sv) + (1.0 - pc) * std::log(ps));
            };
            double raw;
            if (bar.finite()) {
                const double hh = bar.half();
                raw = ts_integrate([&](double t) { return h(bar.left(t), bar.pdf_left(t)); }, 0.0, hh, qtol) +
                      ts_integrate([&](double s) { return h(bar.right(s), bar.pdf_right(s)); }, 0.0, hh, qtol);
            } else {
                raw = half_line([&](double t) { return h(bar.left(t), density.pdf(t)); }, 0.0, qtol);
            }
            if (!std::isfinite(raw)) return {kInf, kInf};
            const double v = std::pow(raw, 1.0 / pc);
            return {v, tol * std::max(1.0, v)};
        }
    }
    return {kInf, kInf};
}

// ---------------------------------------------------------------------------

namespace {

struct PoolEntry {
    std::string name;
    double g_norm;
    double c;
};

std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::vector<PoolEntry> profile_pool(const Density& density, double p, std::uint64_t seed) {
    std::vector<PoolEntry> pool;
    if (std::isfinite(density.mean_m())) pool.push_back({"constant", 1.0, density.mean_m()});
    if (std::isfinite(density.kappa())) {
        for (unsigned n : {1U, 2U, 10U, 100U, 1000U}) {
            auto g = UnivariateProfile::level_set(n);
            double norm = profile_norm(g, density, p);
            if (std::isfinite(norm) && norm > 0.0) pool.push_back({g.description(), norm, coupling_c(g, density)});
        }
    }
    if (p > 1.0 && std::isfinite(p) && std::isfinite(density.b_p(p))) {
        auto g = UnivariateProfile::dual(p);
        pool.push_back({g.description(), profile_norm(g, density, p), coupling_c(g, density, p)});
    }
    // a few random nonnegative piecewise-linear profiles
    std::mt19937_64 rng(mix(seed ^ 0x5EED));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double horizon = std::min(density.scan_horizon(), std::isinf(density.domain_end()) ? 50.0 : kInf);
    for (int k = 0; k < 4; ++k) {
        std::vector<double> t;
        std::vector<double> g;
        for (int i = 0; i <= 6; ++i) {
            t.push_back(horizon * i / 6.0);
            g.push_back(unit(rng));
        }
        auto prof = UnivariateProfile::tabulated(t, g);
        double norm = profile_norm(prof, density, p);
        if (norm > 0.0 && std::isfinite(norm)) pool.push_back({prof.description(), norm, coupling_c(prof, density, p)});
    }
    return pool;
}

struct Trial {
    Side side;
    std::size_t profile;
    CoefficientMap<double> eta;
    std::string label;
};

double trial_ratio(const Trial& tr, const std::vector<PoolEntry>& pool, const WeightFamily& w, double q) {
    const PoolEntry& g = pool[tr.profile];
    TensorFunction<double> f;
    f.dim = w.dim();
    f.side = tr.side;
    f.eta = tr.eta;
    double source = tensor_norm(f.eta, w, g.g_norm, q);
    if (source == 0.0) return 0.0;
    TensorFunction<double> h = convert(f, g.c);
    return tensor_norm(h.eta, w, g.g_norm, q) / source;
}

}  // namespace

RatioScanResult ratio_scan(const WeightFamily& w, const Density& density, const NormIndexPair& pq,
                           std::size_t trials, std::uint64_t seed, bool seed_witnesses) {
    if (w.dim() > 10) throw CapacityError("ratio_scan supports d <= 10");
    require_monotone(w);
    const std::vector<PoolEntry> pool = profile_pool(density, pq.p, seed);
    if (pool.empty()) throw InfeasibleError("no profile with finite norm and coupling for this density");
    const std::vector<Mask> support = w.support();

    std::vector<Trial> fixed;
    if (seed_witnesses) {
        for (std::size_t k = 0; k < pool.size(); ++k) {
            Trial a{Side::Anchored, k, {}, "witness eta=gamma (anchored), " + pool[k].name};
            Trial b{Side::Anova, k, {}, "witness eta=(-1)^|u| gamma (anova), " + pool[k].name};
            for (Mask u : support) {
                a.eta[u] = w.gamma(u);
                b.eta[u] = (popcount(u) & 1U) ? -w.gamma(u) : w.gamma(u);
            }
            fixed.push_back(std::move(a));
            fixed.push_back(std::move(b));
            for (Mask v : support) {
                Trial s{Side::Anova, k, {{v, w.gamma(v)}}, "witness single " + SubsetIndex(v, w.dim()).to_string() +
                                                                " (anova), " + pool[k].name};
                fixed.push_back(std::move(s));
                if (fixed.size() > 4096) break;
            }
        }
    }

    const std::size_t total = fixed.size() + trials;
    std::vector<double> ratios(total, 0.0);
    parallel_for(total, [&](std::size_t i) {
        if (i < fixed.size()) {
            ratios[i] = trial_ratio(fixed[i], pool, w, pq.q);
            return;
        }
        std::mt19937_64 rng(mix(seed ^ mix(i - fixed.size())));
        std::uniform_real_distribution<double> sym(-1.0, 1.0);
        std::uniform_int_distribution<std::size_t> pick_profile(0, pool.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_count(1, support.size());
        Trial tr{rng() & 1U ? Side::Anchored : Side::Anova, pick_profile(rng), {}, ""};
        const std::size_t count = pick_count(rng);
        const bool scaled = (rng() & 1U) != 0;
        std::vector<Mask> chosen = support;
        std::shuffle(chosen.begin(), chosen.end(), rng);
        chosen.resize(count);
        for (Mask u : chosen) tr.eta[u] = sym(rng) * (scaled ? w.gamma(u) : 1.0);
        ratios[i] = trial_ratio(tr, pool, w, pq.q);
    });

    RatioScanResult out{0.0, 0, trials, seed, ""};
    for (std::size_t i = 0; i < total; ++i) {
        if (ratios[i] > out.best) {
            out.best = ratios[i];
            out.best_trial = i;
        }
    }
    if (out.best_trial < fixed.size()) {
        out.best_description = fixed[out.best_trial].label;
    } else {
        std::ostringstream os;
        os << "random trial " << (out.best_trial - fixed.size());
        out.best_description = os.str();
    }
    return out;
}

}  // namespace normbridge::oracle
