// SPDX-License-Identifier: MIT
#include "normbridge/decomp.hpp"

#include "normbridge/errors.hpp"
#include "normbridge/quadrature.hpp"
#include "normbridge/structured.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace normbridge {

std::string side_name(Side s) { return s == Side::Anchored ? "anchored" : "anova"; }

Side parse_side(const std::string& name) {
    if (name == "anchored") return Side::Anchored;
    if (name == "anova") return Side::Anova;
    throw DomainError("unknown side '" + name + "' (expected anchored or anova)");
}

UnivariateProfile UnivariateProfile::level_set(unsigned n) {
    if (n == 0) throw DomainError("witness index n must be positive");
    UnivariateProfile g;
    g.kind = ProfileKind::WitnessLevelSet;
    g.n = n;
    return g;
}

UnivariateProfile UnivariateProfile::dual(double p) {
    if (!(p > 1.0) || std::isinf(p)) throw DomainError("dual witness needs 1 < p < inf");
    UnivariateProfile g;
    g.kind = ProfileKind::WitnessDual;
    g.p = p;
    return g;
}

UnivariateProfile UnivariateProfile::tabulated(std::vector<double> t, std::vector<double> g) {
    if (t.size() != g.size() || t.size() < 2) throw DomainError("tabulated profile needs matching rows");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw DomainError("tabulated profile t must be strictly increasing");
    }
    UnivariateProfile out;
    out.kind = ProfileKind::Tabulated;
    out.t = std::move(t);
    out.values = std::move(g);
    return out;
}

std::string UnivariateProfile::description() const {
    std::ostringstream os;
    switch (kind) {
        case ProfileKind::Constant: os << "constant(1)"; break;
        case ProfileKind::WitnessLevelSet: os << "level-set(n=" << n << ")"; break;
        case ProfileKind::WitnessDual: os << "dual(p=" << format_index(p) << ")"; break;
        case ProfileKind::Tabulated: os << "tabulated(" << t.size() << " knots)"; break;
    }
    return os.str();
}

namespace {

/// Integrates f over D, splitting infinite domains at the scan horizon.
double integrate_domain(const std::function<double(double)>& f, const Density& density, double lo, double hi) {
    hi = std::min(hi, density.scan_horizon());
    if (!(hi > lo)) return 0.0;
    const unsigned pieces = std::isinf(density.domain_end()) ? 16 : 1;
    double total = 0.0;
    for (unsigned i = 0; i < pieces; ++i) {
        double a = lo + (hi - lo) * i / pieces;
        double b = lo + (hi - lo) * (i + 1) / pieces;
        total += integrate(f, a, b, 1e-13, 1e-12).value;
    }
    return total;
}

double tabulated_value(const UnivariateProfile& g, double x) {
    if (x < g.t.front() || x > g.t.back()) return 0.0;
    auto it = std::upper_bound(g.t.begin(), g.t.end(), x);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - g.t.begin()), g.t.size() - 1);
    if (i == 0) return g.values.front();
    double w = (x - g.t[i - 1]) / (g.t[i] - g.t[i - 1]);
    return g.values[i - 1] + w * (g.values[i] - g.values[i - 1]);
}

struct DualShape {
    double pc;
    double b;
    double p;
};

double dual_value(const DualShape& s, const Density& density, double t) {
    double psi = density.pdf(t);
    if (psi <= 0.0) return 0.0;
    double h = density.survival(t) * std::pow(psi, -1.0 / s.p);
    return std::pow(h / s.b, s.pc - 1.0) * std::pow(psi, -1.0 / s.p);
}

DualShape dual_shape(const UnivariateProfile& g, const Density& density) {
    double b = density.b_p(g.p);
    if (!std::isfinite(b) || b <= 0.0) {
        throw InfeasibleError("dual witness needs 0 < B_p < inf at p = " + format_index(g.p));
    }
    return {conjugate(g.p), b, g.p};
}

}  // namespace

WitnessSequence witness_sequence(const Density& density, unsigned n) {
    if (n == 0) throw DomainError("witness index n must be positive");
    const double kappa = density.kappa();
    Interval k = density.level_set(kappa - 1.0 / n);
    const double len = k.length();
    if (!(len > 0.0) || !std::isfinite(len)) throw InfeasibleError("level set has no positive finite measure");
    auto ratio = [&](double t) { return density.hazard_ratio(t); };
    double m_n = integrate(ratio, k.lo, k.hi, 1e-14, 1e-13).value / len;
    return {n, k, len, m_n};
}

double profile_norm(const UnivariateProfile& g, const Density& density, double p) {
    if (!(p >= 1.0)) throw DomainError("profile norm needs p in [1, inf]");
    switch (g.kind) {
        case ProfileKind::Constant: return 1.0;
        case ProfileKind::WitnessLevelSet: {
            if (p == 1.0) return 1.0;  // ∫ |g| ψ = ∫ G_n = 1
            WitnessSequence ws = witness_sequence(density, g.n);
            const Interval k = ws.level_set;
            if (std::isinf(p)) {
                auto neg_pdf = [&](double t) { return -density.pdf(t); };
                double min_psi = -maximize_scalar(neg_pdf, k.lo, k.hi).second;
                min_psi = std::min({min_psi, density.pdf(k.lo), density.pdf(k.hi)});
                return 1.0 / (ws.measure * min_psi);
            }
            auto f = [&](double t) { return std::pow(ws.measure, -p) * std::pow(density.pdf(t), 1.0 - p); };
            return std::pow(integrate(f, k.lo, k.hi, 1e-14, 1e-13).value, 1.0 / p);
        }
        case ProfileKind::WitnessDual: {
            DualShape s = dual_shape(g, density);
            if (std::isinf(p)) {
                const double h = density.scan_horizon();
                double best = 0.0;
                for (unsigned j = 0; j <= 1024; ++j) {
                    double t = h * j / 1024.0;
                    if (density.contains(t)) best = std::max(best, std::fabs(dual_value(s, density, t)));
                }
                return best;
            }
            auto f = [&](double t) { return std::pow(std::fabs(dual_value(s, density, t)), p) * density.pdf(t); };
            return std::pow(integrate_domain(f, density, 0.0, density.domain_end()), 1.0 / p);
        }
        case ProfileKind::Tabulated: {
            if (std::isinf(p)) {
                double best = 0.0;
                for (double v : g.values) best = std::max(best, std::fabs(v));
                return best;
            }
            const double lo = std::max(0.0, g.t.front());
            const double hi = std::min(g.t.back(), density.domain_end());
            auto f = [&](double t) { return std::pow(std::fabs(tabulated_value(g, t)), p) * density.pdf(t); };
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < g.t.size(); ++i) {
                double a = std::max(lo, g.t[i]);
                double b = std::min(hi, g.t[i + 1]);
                if (b > a) total += integrate(f, a, b, 1e-13, 1e-12).value;
            }
            return std::pow(total, 1.0 / p);
        }
    }
    return kInf;
}

double coupling_c(const UnivariateProfile& g, const Density& density, double /*p*/) {
    switch (g.kind) {
        case ProfileKind::Constant: {
            double m = density.mean_m();
            if (!std::isfinite(m)) {
                throw InfeasibleError("c = m is infinite: survival is not integrable (eq2 fails)");
            }
            return m;
        }
        case ProfileKind::WitnessLevelSet: return witness_sequence(density, g.n).m_n;
        case ProfileKind::WitnessDual: {
            DualShape s = dual_shape(g, density);
            auto f = [&](double t) { return dual_value(s, density, t) * density.survival(t); };
            return integrate_domain(f, density, 0.0, density.domain_end());
        }
        case ProfileKind::Tabulated: {
            const double hi = std::min(g.t.back(), density.domain_end());
            auto f = [&](double t) { return tabulated_value(g, t) * density.survival(t); };
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < g.t.size(); ++i) {
                double a = std::max(0.0, g.t[i]);
                double b = std::min(hi, g.t[i + 1]);
                if (b > a) total += integrate(f, a, b, 1e-13, 1e-12).value;
            }
            if (!std::isfinite(total)) throw InfeasibleError("c = integral of g*survival diverges");
            return total;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------

template <Scalar T>
CoefficientMap<T> superset_transform(const CoefficientMap<T>& eta, unsigned dim, const T& s) {
    if (dim > kMaxMaskDim) throw CapacityError("coefficient maps support d <= 63");
    CoefficientMap<T> out;
    const bool dense = dim <= kMaxEnumerationDim && eta.size() > (std::size_t{1} << dim) / 2;
    if (dense) {
        const std::size_t n = std::size_t{1} << dim;
        std::vector<T> a(n, T(0));
        for (const auto& [u, v] : eta) a[u] = v;
        for (unsigned j = 0; j < dim; ++j) {
            const std::size_t bit = std::size_t{1} << j;
            for (std::size_t u = 0; u < n; ++u) {
                if (!(u & bit)) a[u] += s * a[u | bit];
            }
        }
        for (std::size_t u = 0; u < n; ++u) {
            if (!is_zero(a[u])) out.emplace(u, a[u]);
        }
        return out;
    }
    std::vector<T> spow(dim + 1, T(1));
    for (unsigned k = 1; k <= dim; ++k) spow[k] = spow[k - 1] * s;
    for (const auto& [v, value] : eta) {
        if ((v & ~full_mask(dim)) != 0) throw DomainError("coefficient mask exceeds d");
        if (is_zero(value)) continue;
        const unsigned kv = popcount(v);
        for_each_submask(v, [&](Mask u) { out[u] += value * spow[kv - popcount(u)]; });
    }
    for (auto it = out.begin(); it != out.end();) {
        it = is_zero(it->second) ? out.erase(it) : std::next(it);
    }
    return out;
}

template <Scalar T>
TensorFunction<T> convert(const TensorFunction<T>& f, const T& c) {
    TensorFunction<T> out;
    out.dim = f.dim;
    out.side = other(f.side);
    out.profile = f.profile;
    const T s = f.side == Side::Anchored ? T(c) : T(-c);
    out.eta = superset_transform<T>(f.eta, f.dim, s);
    return out;
}

template CoefficientMap<double> superset_transform<double>(const CoefficientMap<double>&, unsigned, const double&);
template CoefficientMap<Rational> superset_transform<Rational>(const CoefficientMap<Rational>&, unsigned,
                                                               const Rational&);
template TensorFunction<double> convert<double>(const TensorFunction<double>&, const double&);
template TensorFunction<Rational> convert<Rational>(const TensorFunction<Rational>&, const Rational&);

double tensor_norm(const CoefficientMap<double>& eta, const WeightFamily& w, double g_norm, double q) {
    std::vector<double> terms;
    terms.reserve(eta.size());
    for (const auto& [u, value] : eta) {
        if (value == 0.0) continue;
        if (!w.in_support(u)) {
            throw DomainError("coefficient on " + SubsetIndex(u, w.dim()).to_string() +
                              " has zero weight: the function is not in the space");
        }
        terms.push_back(std::fabs(value) * std::pow(g_norm, static_cast<double>(popcount(u))) / w.gamma(u));
    }
    return lq_norm(terms, q);
}

double tensor_norm(const TensorFunction<double>& f, const WeightFamily& w, const Density& density,
                   const NormIndexPair& pq) {
    if (f.dim != w.dim()) throw DomainError("tensor function and weights differ in dimension");
    return tensor_norm(f.eta, w, profile_norm(f.profile, density, pq.p), pq.q);
}

// ---------------------------------------------------------------------------

template <Scalar T>
T LatticeMatrix<T>::at(Mask row, Mask col) const {
    auto r = rows_.find(row);
    if (r == rows_.end()) return T(0);
    auto c = r->second.find(col);
    return c == r->second.end() ? T(0) : c->second;
}

template <Scalar T>
void LatticeMatrix<T>::set(Mask row, Mask col, const T& value) {
    rows_[row][col] = value;
}

template <Scalar T>
LatticeMatrix<T> LatticeMatrix<T>::multiply(const LatticeMatrix& other) const {
    LatticeMatrix out(dim_);
    out.index_ = index_;
    for (const auto& [u, row] : rows_) {
        auto& dest = out.rows_[u];
        for (const auto& [k, a] : row) {
            auto it = other.rows_.find(k);
            if (it == other.rows_.end()) continue;
            for (const auto& [v, b] : it->second) dest[v] += a * b;
        }
    }
    return out;
}

template <Scalar T>
LatticeMatrix<T> LatticeMatrix<T>::sign_conjugate() const {
    LatticeMatrix out(dim_);
    out.index_ = index_;
    for (const auto& [u, row] : rows_) {
        for (const auto& [v, a] : row) {
            bool odd = ((popcount(u) + popcount(v)) & 1U) != 0;
            out.rows_[u][v] = odd ? T(-a) : T(a);
        }
    }
    return out;
}

template <Scalar T>
T LatticeMatrix<T>::max_deviation_from_identity() const {
    T worst(0);
    for (Mask u : index_) {
        if (is_zero(at(u, u))) worst = std::max(worst, T(1));
    }
    for (const auto& [u, row] : rows_) {
        for (const auto& [v, a] : row) {
            T dev = abs_value(T(u == v ? T(a - 1) : a));
            if (dev > worst) worst = dev;
        }
    }
    return worst;
}

template class LatticeMatrix<double>;
template class LatticeMatrix<Rational>;

template <Scalar T>
LatticeMatrix<T> transform_matrix(const WeightFamily& w, const T& c) {
    if (w.dim() > kMaxBruteForceDim) {
        throw CapacityError("transform_matrix supports d <= " + std::to_string(kMaxBruteForceDim));
    }
    require_monotone(w);
    LatticeMatrix<T> m(w.dim());
    std::vector<Mask> support = w.support();
    std::vector<T> cpow(w.dim() + 1, T(1));
    for (unsigned k = 1; k <= w.dim(); ++k) cpow[k] = cpow[k - 1] * c;
    for (Mask v : support) {
        for_each_submask(v, [&](Mask u) { m.set(u, v, cpow[popcount(v) - popcount(u)]); });
    }
    m.set_index(std::move(support));
    return m;
}

template LatticeMatrix<double> transform_matrix<double>(const WeightFamily&, const double&);
template LatticeMatrix<Rational> transform_matrix<Rational>(const WeightFamily&, const Rational&);

// ---------------------------------------------------------------------------

WitnessResult witness_ratio(Corner corner, const WeightFamily& w, const Density& density, unsigned n) {
    require_monotone(w);
    if (w.dim() > 16) throw CapacityError("witness evaluation supports d <= 16");
    const bool p_one = uses_kappa(corner);
    const double q = q_is_inf(corner) ? kInf : 1.0;
    WitnessResult out{corner, n, 0.0, 0.0, 0.0, 0.0, 0};

    UnivariateProfile g = p_one ? UnivariateProfile::level_set(n) : UnivariateProfile::constant();
    const double p = p_one ? 1.0 : kInf;
    out.coupling = coupling_c(g, density, p);
    const double g_norm = profile_norm(g, density, p);
    const double x_limit = p_one ? density.kappa() : density.mean_m();
    if (!std::isfinite(x_limit)) {
        throw InfeasibleError(p_one ? "kappa = inf: the p = 1 corners are infeasible for this density"
                                    : "m = inf: the p = inf corners are infeasible for this density");
    }
    out.target = corner_constant(w, density.mean_m(), x_limit, p, q);
    out.subset = lattice_corner(w, x_limit, q_is_inf(corner)).witness;

    TensorFunction<double> f;
    f.dim = w.dim();
    f.profile = g;
    switch (corner) {
        case Corner::InfInf:
            f.side = Side::Anchored;
            for (Mask u : w.support()) f.eta[u] = w.gamma(u);
            break;
        case Corner::OneInf:
            f.side = Side::Anova;
            for (Mask u : w.support()) f.eta[u] = (popcount(u) & 1U) ? -w.gamma(u) : w.gamma(u);
            break;
        case Corner::InfOne:
        case Corner::OneOne:
            f.side = Side::Anova;
            f.eta[out.subset] = w.gamma(out.subset);
            break;
    }
    TensorFunction<double> h = convert(f, out.coupling);
    const double source = tensor_norm(f.eta, w, g_norm, q);
    const double target = tensor_norm(h.eta, w, g_norm, q);
    out.ratio = target / source;
    out.gap = out.target - out.ratio;
    return out;
}

}  // namespace normbridge
