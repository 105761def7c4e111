// SPDX-License-Identifier: MIT
#pragma once

#include "normbridge/rational.hpp"
#include "normbridge/subset.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace normbridge {

enum class WeightKind { Explicit, Product, POD, FiniteOrder, FiniteDiameter, DimensionDependent };

std::string kind_name(WeightKind kind);
WeightKind parse_kind(const std::string& name);

/// How product weights γ_j are generated.
enum class ProductRule {
    List,       // γ_1..γ_d given explicitly
    Power,      // γ_j = scale · j^{−exponent}
    Geometric,  // γ_j = ratio^j
};

/// Dimension-free description of a weight family; instantiate() fixes d.
struct WeightSpec {
    WeightKind kind = WeightKind::Product;
    ProductRule rule = ProductRule::List;
    std::vector<Rational> gammas;  // ProductRule::List
    Rational scale{1};
    Rational exponent{1};  // ProductRule::Power
    Rational ratio{1, 2};  // ProductRule::Geometric
    Rational beta1{1};
    Rational beta2{2};
    Rational c{1};
    Rational omega{1};
    unsigned r = 1;
    std::map<Mask, Rational> table;  // Explicit; absent masks have weight 0
    unsigned table_dim = 0;
};

/// γ^{[d]} = (γ_{d,u})_{u ⊆ [1:d]}. Immutable.
class WeightFamily {
public:
    static WeightFamily explicit_table(unsigned d, std::map<Mask, Rational> table);
    static WeightFamily product(std::vector<Rational> gammas);
    static WeightFamily product_power(unsigned d, const Rational& scale, const Rational& exponent);
    static WeightFamily product_geometric(unsigned d, const Rational& ratio);
    static WeightFamily pod(unsigned d, const Rational& beta1, const Rational& beta2, const Rational& c);
    static WeightFamily finite_order(unsigned d, const Rational& omega, unsigned r);
    static WeightFamily finite_diameter(unsigned d, const Rational& omega, unsigned r);
    static WeightFamily dimension_dependent(unsigned d);

    /// Same family rule at another dimension (Explicit only at its own d).
    static WeightFamily instantiate(const WeightSpec& spec, unsigned d);

    [[nodiscard]] WeightKind kind() const noexcept { return spec_.kind; }
    [[nodiscard]] unsigned dim() const noexcept { return d_; }
    [[nodiscard]] const WeightSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::string description() const;

    /// True when every γ_u is rational and can be produced exactly.
    [[nodiscard]] bool exact_available() const noexcept;

    [[nodiscard]] double gamma(const SubsetIndex& u) const;
    [[nodiscard]] double gamma(Mask u) const;
    /// Throws DomainError when !exact_available().
    [[nodiscard]] Rational gamma_exact(Mask u) const;

    template <Scalar T>
    [[nodiscard]] T gamma_as(Mask u) const {
        if constexpr (std::same_as<T, double>) {
            return gamma(u);
        } else {
            return gamma_exact(u);
        }
    }

    /// γ_j of a product family (ProductRule applied at coordinate j ≥ 1).
    [[nodiscard]] double product_gamma(unsigned j) const;
    [[nodiscard]] Rational product_gamma_exact(unsigned j) const;

    /// γ_u > 0, decided structurally without evaluating γ_u.
    [[nodiscard]] bool in_support(Mask u) const;
    /// U_γ in increasing mask order. Capacity error for d > 24.
    [[nodiscard]] std::vector<Mask> support() const;

    /// γ_w > 0 ⇒ γ_u > 0 for every u ⊆ w.
    [[nodiscard]] bool check_monotone() const;

    /// Explicit copy with every weight multiplied by λ > 0.
    [[nodiscard]] WeightFamily scaled(const Rational& lambda) const;
    /// Explicit copy with the full table materialised (d ≤ 24).
    [[nodiscard]] WeightFamily to_explicit() const;

    /// γ_u depends on |u| only.
    [[nodiscard]] bool is_symmetric() const noexcept;
    /// For symmetric families: γ at cardinality k (0 ≤ k ≤ d), valid for any d.
    [[nodiscard]] double layer_gamma(unsigned k) const;
    [[nodiscard]] double log_layer_gamma(unsigned k) const;

private:
    WeightFamily(WeightSpec spec, unsigned d);
    void validate() const;
    void require_mask(Mask u) const;

    WeightSpec spec_;
    unsigned d_;
};

}  // namespace normbridge
