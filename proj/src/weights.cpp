// SPDX-License-Identifier: MIT
#include "normbridge/weights.hpp"

#include "normbridge/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace normbridge {

namespace {

bool is_integer(const Rational& x) { return x.get_den() == 1; }

unsigned long to_exponent(const Rational& x) {
    if (!is_integer(x) || sgn(x) < 0 || !x.get_num().fits_ulong_p()) {
        throw DomainError("exponent " + to_string(x) + " is not a non-negative integer");
    }
    return x.get_num().get_ui();
}

Rational rational_pow(const Rational& base, const Rational& exponent) {
    if (sgn(exponent) >= 0) return pow_int(base, static_cast<unsigned>(to_exponent(exponent)));
    Rational inv = 1 / base;
    return pow_int(inv, static_cast<unsigned>(to_exponent(Rational(-exponent))));
}

Rational factorial(unsigned k) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), k);
    return Rational(f);
}

}  // namespace

std::string kind_name(WeightKind kind) {
    switch (kind) {
        case WeightKind::Explicit: return "explicit";
        case WeightKind::Product: return "product";
        case WeightKind::POD: return "pod";
        case WeightKind::FiniteOrder: return "finite-order";
        case WeightKind::FiniteDiameter: return "finite-diameter";
        case WeightKind::DimensionDependent: return "dimension-dependent";
    }
    return "unknown";
}

WeightKind parse_kind(const std::string& name) {
    for (auto k : {WeightKind::Explicit, WeightKind::Product, WeightKind::POD, WeightKind::FiniteOrder,
                   WeightKind::FiniteDiameter, WeightKind::DimensionDependent}) {
        if (kind_name(k) == name) return k;
    }
    throw DomainError("unknown weight kind '" + name + "'");
}

WeightFamily::WeightFamily(WeightSpec spec, unsigned d) : spec_(std::move(spec)), d_(d) {
    // gmp arithmetic assumes canonical operands; user input may not be
    for (auto& g : spec_.gammas) g.canonicalize();
    for (auto& [mask, value] : spec_.table) value.canonicalize();
    for (Rational* r : {&spec_.scale, &spec_.exponent, &spec_.ratio, &spec_.beta1, &spec_.beta2, &spec_.c,
                        &spec_.omega}) {
        r->canonicalize();
    }
    validate();
}

void WeightFamily::validate() const {
    switch (spec_.kind) {
        case WeightKind::Explicit:
            if (d_ > kMaxMaskDim) throw CapacityError("explicit weights support d <= 63");
            for (const auto& [mask, value] : spec_.table) {
                if ((mask & ~full_mask(d_)) != 0) {
                    throw DomainError("weight mask " + std::to_string(mask) + " exceeds d = " +
                                      std::to_string(d_));
                }
                if (sgn(value) < 0) throw DomainError("weights must be non-negative");
            }
            {
                bool any = false;
                for (const auto& [mask, value] : spec_.table) any = any || sgn(value) > 0;
                if (!any) throw DomainError("explicit weights need at least one positive entry");
            }
            break;
        case WeightKind::Product:
            if (spec_.rule == ProductRule::List) {
                if (spec_.gammas.size() != d_) throw DomainError("product weights need d gammas");
                for (const auto& g : spec_.gammas) {
                    if (sgn(g) < 0) throw DomainError("product weights must be non-negative");
                }
            } else if (spec_.rule == ProductRule::Power) {
                if (sgn(spec_.scale) < 0) throw DomainError("product scale must be non-negative");
            } else if (sgn(spec_.ratio) < 0) {
                throw DomainError("geometric ratio must be non-negative");
            }
            break;
        case WeightKind::POD:
            if (!(sgn(spec_.beta1) > 0 && spec_.beta1 < spec_.beta2 && sgn(spec_.c) > 0)) {
                throw DomainError("POD weights require 0 < beta1 < beta2 and c > 0");
            }
            break;
        case WeightKind::FiniteOrder:
        case WeightKind::FiniteDiameter:
            if (!(sgn(spec_.omega) > 0)) throw DomainError("omega must be positive");
            break;
        case WeightKind::DimensionDependent: break;
    }
}

WeightFamily WeightFamily::explicit_table(unsigned d, std::map<Mask, Rational> table) {
    WeightSpec s;
    s.kind = WeightKind::Explicit;
    s.table = std::move(table);
    s.table_dim = d;
    return {std::move(s), d};
}

WeightFamily WeightFamily::product(std::vector<Rational> gammas) {
    WeightSpec s;
    s.kind = WeightKind::Product;
    s.rule = ProductRule::List;
    auto d = static_cast<unsigned>(gammas.size());
    s.gammas = std::move(gammas);
    return {std::move(s), d};
}

WeightFamily WeightFamily::product_power(unsigned d, const Rational& scale, const Rational& exponent) {
    WeightSpec s;
    s.kind = WeightKind::Product;
    s.rule = ProductRule::Power;
    s.scale = scale;
    s.exponent = exponent;
    return {std::move(s), d};
}

WeightFamily WeightFamily::product_geometric(unsigned d, const Rational& ratio) {
    WeightSpec s;
    s.kind = WeightKind::Product;
    s.rule = ProductRule::Geometric;
    s.ratio = ratio;
    return {std::move(s), d};
}

WeightFamily WeightFamily::pod(unsigned d, const Rational& beta1, const Rational& beta2, const Rational& c) {
    WeightSpec s;
    s.kind = WeightKind::POD;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.c = c;
    return {std::move(s), d};
}

WeightFamily WeightFamily::finite_order(unsigned d, const Rational& omega, unsigned r) {
    WeightSpec s;
    s.kind = WeightKind::FiniteOrder;
    s.omega = omega;
    s.r = r;
    return {std::move(s), d};
}

WeightFamily WeightFamily::finite_diameter(unsigned d, const Rational& omega, unsigned r) {
    WeightSpec s;
    s.kind = WeightKind::FiniteDiameter;
    s.omega = omega;
    s.r = r;
    return {std::move(s), d};
}

WeightFamily WeightFamily::dimension_dependent(unsigned d) {
    WeightSpec s;
    s.kind = WeightKind::DimensionDependent;
    return {std::move(s), d};
}

WeightFamily WeightFamily::instantiate(const WeightSpec& spec, unsigned d) {
    if (spec.kind == WeightKind::Explicit && d != spec.table_dim) {
        throw DomainError("explicit weights are fixed at d = " + std::to_string(spec.table_dim));
    }
    if (spec.kind == WeightKind::Product && spec.rule == ProductRule::List) {
        if (d > spec.gammas.size()) {
            throw DomainError("product weight list has only " + std::to_string(spec.gammas.size()) +
                              " entries");
        }
        WeightSpec s = spec;
        s.gammas.resize(d);
        return {std::move(s), d};
    }
    return {spec, d};
}

std::string WeightFamily::description() const {
    std::ostringstream os;
    os << kind_name(spec_.kind) << "(d=" << d_;
    switch (spec_.kind) {
        case WeightKind::Explicit: os << ", entries=" << spec_.table.size(); break;
        case WeightKind::Product:
            if (spec_.rule == ProductRule::List) {
                os << ", gammas=[";
                for (std::size_t j = 0; j < spec_.gammas.size(); ++j) {
                    os << (j ? "," : "") << to_string(spec_.gammas[j]);
                }
                os << "]";
            } else if (spec_.rule == ProductRule::Power) {
                os << ", gamma_j=" << to_string(spec_.scale) << "*j^-" << to_string(spec_.exponent);
            } else {
                os << ", gamma_j=" << to_string(spec_.ratio) << "^j";
            }
            break;
        case WeightKind::POD:
            os << ", beta1=" << to_string(spec_.beta1) << ", beta2=" << to_string(spec_.beta2)
               << ", c=" << to_string(spec_.c);
            break;
        case WeightKind::FiniteOrder:
        case WeightKind::FiniteDiameter:
            os << ", omega=" << to_string(spec_.omega) << ", r=" << spec_.r;
            break;
        case WeightKind::DimensionDependent: break;
    }
    os << ")";
    return os.str();
}

bool WeightFamily::exact_available() const noexcept {
    switch (spec_.kind) {
        case WeightKind::Product:
            return spec_.rule != ProductRule::Power || is_integer(spec_.exponent);
        case WeightKind::POD: return is_integer(spec_.beta1) && is_integer(spec_.beta2);
        default: return true;
    }
}

void WeightFamily::require_mask(Mask u) const {
    if (d_ > kMaxMaskDim) {
        throw CapacityError("subset masks support d <= 63; use the closed-form routes for d = " +
                            std::to_string(d_));
    }
    if ((u & ~full_mask(d_)) != 0) {
        throw DomainError("subset mask " + std::to_string(u) + " invalid for d = " + std::to_string(d_));
    }
}

double WeightFamily::product_gamma(unsigned j) const {
    if (j < 1 || j > d_) throw DomainError("coordinate out of range");
    switch (spec_.rule) {
        case ProductRule::List: return spec_.gammas[j - 1].get_d();
        case ProductRule::Power:
            return spec_.scale.get_d() * std::pow(static_cast<double>(j), -spec_.exponent.get_d());
        case ProductRule::Geometric: return std::pow(spec_.ratio.get_d(), static_cast<double>(j));
    }
    return 0.0;
}

Rational WeightFamily::product_gamma_exact(unsigned j) const {
    if (j < 1 || j > d_) throw DomainError("coordinate out of range");
    switch (spec_.rule) {
        case ProductRule::List: return spec_.gammas[j - 1];
        case ProductRule::Power: {
            Rational out = spec_.scale * rational_pow(Rational(1, j), spec_.exponent);
            out.canonicalize();
            return out;
        }
        case ProductRule::Geometric: return pow_int(spec_.ratio, j);
    }
    return Rational(0);
}

double WeightFamily::gamma(const SubsetIndex& u) const {
    if (u.dim() != d_) throw DomainError("subset dimension does not match the weight family");
    return gamma(u.mask());
}

double WeightFamily::gamma(Mask u) const {
    require_mask(u);
    const unsigned k = popcount(u);
    switch (spec_.kind) {
        case WeightKind::Explicit: {
            auto it = spec_.table.find(u);
            return it == spec_.table.end() ? 0.0 : it->second.get_d();
        }
        case WeightKind::Product: {
            double g = 1.0;
            for (unsigned j = 1; j <= d_; ++j) {
                if ((u >> (j - 1)) & 1U) g *= product_gamma(j);
            }
            return g;
        }
        case WeightKind::POD: {
            const double b2 = spec_.beta2.get_d();
            const double c = spec_.c.get_d();
            double g = std::pow(std::tgamma(k + 1.0), spec_.beta1.get_d());
            for (unsigned j = 1; j <= d_; ++j) {
                if ((u >> (j - 1)) & 1U) g *= c * std::pow(static_cast<double>(j), -b2);
            }
            return g;
        }
        case WeightKind::FiniteOrder:
            return k <= spec_.r ? std::pow(spec_.omega.get_d(), static_cast<double>(k)) : 0.0;
        case WeightKind::FiniteDiameter:
            return mask_diameter(u) <= spec_.r ? std::pow(spec_.omega.get_d(), static_cast<double>(k)) : 0.0;
        case WeightKind::DimensionDependent:
            return std::pow(static_cast<double>(d_), -static_cast<double>(k));
    }
    return 0.0;
}

Rational WeightFamily::gamma_exact(Mask u) const {
    require_mask(u);
    if (!exact_available()) throw DomainError(description() + " has irrational weights");
    const unsigned k = popcount(u);
    switch (spec_.kind) {
        case WeightKind::Explicit: {
            auto it = spec_.table.find(u);
            return it == spec_.table.end() ? Rational(0) : it->second;
        }
        case WeightKind::Product: {
            Rational g(1);
            for (unsigned j = 1; j <= d_; ++j) {
                if ((u >> (j - 1)) & 1U) g *= product_gamma_exact(j);
            }
            return g;
        }
        case WeightKind::POD: {
            Rational g = rational_pow(factorial(k), spec_.beta1);
            for (unsigned j = 1; j <= d_; ++j) {
                if ((u >> (j - 1)) & 1U) g *= spec_.c * rational_pow(Rational(1, j), spec_.beta2);
            }
            g.canonicalize();
            return g;
        }
        case WeightKind::FiniteOrder: return k <= spec_.r ? pow_int(spec_.omega, k) : Rational(0);
        case WeightKind::FiniteDiameter:
            return mask_diameter(u) <= spec_.r ? pow_int(spec_.omega, k) : Rational(0);
        case WeightKind::DimensionDependent: return k == 0 ? Rational(1) : pow_int(Rational(1, d_), k);
    }
    return Rational(0);
}

bool WeightFamily::in_support(Mask u) const {
    require_mask(u);
    switch (spec_.kind) {
        case WeightKind::Explicit: {
            auto it = spec_.table.find(u);
            return it != spec_.table.end() && sgn(it->second) > 0;
        }
        case WeightKind::Product:
            for (unsigned j = 1; j <= d_; ++j) {
                if (((u >> (j - 1)) & 1U) && product_gamma(j) <= 0.0) return false;
            }
            return true;
        case WeightKind::FiniteOrder: return popcount(u) <= spec_.r;
        case WeightKind::FiniteDiameter: return mask_diameter(u) <= spec_.r;
        case WeightKind::POD:
        case WeightKind::DimensionDependent: return true;
    }
    return false;
}

std::vector<Mask> WeightFamily::support() const {
    std::vector<Mask> out;
    if (spec_.kind == WeightKind::Explicit) {
        for (const auto& [mask, value] : spec_.table) {
            if (sgn(value) > 0) out.push_back(mask);
        }
        return out;
    }
    if (d_ > kMaxEnumerationDim) {
        throw CapacityError("support enumeration needs d <= " + std::to_string(kMaxEnumerationDim) +
                            "; use in_support() for d = " + std::to_string(d_));
    }
    const Mask n = Mask{1} << d_;
    for (Mask u = 0; u < n; ++u) {
        if (in_support(u)) out.push_back(u);
    }
    return out;
}

bool WeightFamily::check_monotone() const {
    if (spec_.kind != WeightKind::Explicit) return true;
    for (const auto& [w, value] : spec_.table) {
        if (sgn(value) <= 0) continue;
        for (unsigned j = 0; j < d_; ++j) {
            if (((w >> j) & 1U) && !in_support(w & ~(Mask{1} << j))) return false;
        }
    }
    return true;
}

WeightFamily WeightFamily::to_explicit() const {
    if (spec_.kind == WeightKind::Explicit) return *this;
    if (d_ > kMaxEnumerationDim) {
        throw CapacityError("materialising weights needs d <= " + std::to_string(kMaxEnumerationDim));
    }
    if (!exact_available()) throw DomainError(description() + " has irrational weights");
    std::map<Mask, Rational> table;
    for (Mask u : support()) table.emplace(u, gamma_exact(u));
    return explicit_table(d_, std::move(table));
}

WeightFamily WeightFamily::scaled(const Rational& lambda) const {
    if (!(sgn(lambda) > 0)) throw DomainError("scaling factor must be positive");
    WeightFamily base = to_explicit();
    std::map<Mask, Rational> table;
    for (const auto& [mask, value] : base.spec_.table) table.emplace(mask, value * lambda);
    return explicit_table(d_, std::move(table));
}

bool WeightFamily::is_symmetric() const noexcept {
    return spec_.kind == WeightKind::FiniteOrder || spec_.kind == WeightKind::DimensionDependent;
}

double WeightFamily::layer_gamma(unsigned k) const {
    double lg = log_layer_gamma(k);
    return std::isinf(lg) ? 0.0 : std::exp(lg);
}

double WeightFamily::log_layer_gamma(unsigned k) const {
    if (k > d_) throw DomainError("layer index exceeds d");
    switch (spec_.kind) {
        case WeightKind::FiniteOrder:
            if (k > spec_.r) return -std::numeric_limits<double>::infinity();
            return k * std::log(spec_.omega.get_d());
        case WeightKind::DimensionDependent: return -static_cast<double>(k) * std::log(static_cast<double>(d_));
        default: throw DomainError(description() + " is not symmetric");
    }
}

}  // namespace normbridge
