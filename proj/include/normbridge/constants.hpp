// SPDX-License-Identifier: MIT
#pragma once

#include "normbridge/norm_index.hpp"
#include "normbridge/rational.hpp"
#include "normbridge/subset.hpp"
#include "normbridge/weights.hpp"

namespace normbridge {

/// The four corners p, q ∈ {1, ∞}.
enum class Corner { OneOne, OneInf, InfOne, InfInf };

Corner corner_of(double p, double q);
std::string corner_name(Corner c);
/// Inverse of corner_name; accepts "11", "1inf", "inf1", "infinf".
Corner parse_corner(const std::string& text);
[[nodiscard]] inline bool uses_kappa(Corner c) { return c == Corner::OneOne || c == Corner::OneInf; }
[[nodiscard]] inline bool q_is_inf(Corner c) { return c == Corner::OneInf || c == Corner::InfInf; }

/// Corner value together with the maximising subset (first in mask order).
template <Scalar T>
struct CornerValue {
    T value;
    Mask witness;
};

/// Lattice evaluation with a scalar x (m for p = ∞, κ for p = 1):
///   q = ∞: max_{u∈U} Σ_{v⊆u^c} x^{|v|} γ_{u∪v}/γ_u
///   q = 1: max_{v∈U} Σ_{u⊆v, u∈U} x^{|v|−|u|} γ_v/γ_u
/// Weighted zeta transforms, O(d·2^d); d ≤ 24 (d ≤ 16 for rationals).
template <Scalar T>
CornerValue<T> lattice_corner(const WeightFamily& w, const T& x, bool q_inf);

/// Polynomial-cost evaluation of the same quantity for the structured kinds.
template <Scalar T>
T closed_form_value(const WeightFamily& w, const T& x, bool q_inf);

/// True when closed_form_value supports this family.
[[nodiscard]] bool has_closed_form(const WeightFamily& w);

/// C_{p,q} for p, q ∈ {1, ∞}. Structured families use closed forms,
/// explicit ones the lattice route.
double corner_constant(const WeightFamily& w, double m, double kappa, double p, double q);
Rational corner_constant_exact(const WeightFamily& w, const Rational& m, const Rational& kappa, double p,
                               double q);

/// Closed form only. Falls back to the lattice for explicit families with
/// d ≤ 14, capacity error beyond.
double closed_form_constant(const WeightFamily& w, double m, double kappa, double p, double q);
Rational closed_form_constant_exact(const WeightFamily& w, const Rational& m, const Rational& kappa,
                                    double p, double q);

/// Throws InfeasibleError unless every γ_w > 0 has γ_u > 0 for all u ⊆ w.
void require_monotone(const WeightFamily& w);

}  // namespace normbridge
