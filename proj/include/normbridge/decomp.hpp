// SPDX-License-Identifier: MIT
#pragma once

#include "normbridge/constants.hpp"
#include "normbridge/density.hpp"
#include "normbridge/norm_index.hpp"
#include "normbridge/rational.hpp"
#include "normbridge/subset.hpp"
#include "normbridge/weights.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace normbridge {

enum class Side { Anchored, Anova };

std::string side_name(Side s);
Side parse_side(const std::string& name);
inline Side other(Side s) { return s == Side::Anchored ? Side::Anova : Side::Anchored; }

enum class ProfileKind { Constant, WitnessLevelSet, WitnessDual, Tabulated };

/// The univariate factor g of a tensor function.
struct UnivariateProfile {
    ProfileKind kind = ProfileKind::Constant;
    unsigned n = 1;                  // WitnessLevelSet
    double p = 2.0;                  // WitnessDual
    std::vector<double> t, values;   // Tabulated: piecewise-linear g on [t_0, t_last], zero elsewhere

    static UnivariateProfile constant() { return {}; }
    static UnivariateProfile level_set(unsigned n);
    static UnivariateProfile dual(double p);
    static UnivariateProfile tabulated(std::vector<double> t, std::vector<double> g);

    [[nodiscard]] std::string description() const;
};

/// ‖g‖_{L_{p,ψ}} = (∫ |g|^p ψ)^{1/p}, esup |g| for p = ∞.
double profile_norm(const UnivariateProfile& g, const Density& density, double p);

/// c = ∫_D g ψ̄. Throws InfeasibleError when the integral diverges.
double coupling_c(const UnivariateProfile& g, const Density& density, double p = 1.0);

/// Level set K_n = {ψ̄/ψ ≥ κ − 1/n}, its measure, and m_n = ∫ g_n ψ̄.
struct WitnessSequence {
    unsigned n;
    Interval level_set;
    double measure;
    double m_n;
};
WitnessSequence witness_sequence(const Density& density, unsigned n);

template <Scalar T>
using CoefficientMap = std::map<Mask, T>;

/// f = Σ_u η_u T_{◇,u}(g^{⊗u}) with ◇ = side.
template <Scalar T>
struct TensorFunction {
    unsigned dim = 0;
    Side side = Side::Anchored;
    UnivariateProfile profile;
    CoefficientMap<T> eta;
};

/// a_u = Σ_{w⊆u^c} η_{u∪w} s^{|w|}: s = c from anchored to ANOVA, s = −c back.
/// Sparse subset sums, or a dense zeta transform when the support covers
/// more than half the lattice.
template <Scalar T>
TensorFunction<T> convert(const TensorFunction<T>& f, const T& c);

/// The raw subset-sum transform with an explicit signed factor s.
template <Scalar T>
CoefficientMap<T> superset_transform(const CoefficientMap<T>& eta, unsigned dim, const T& s);

/// |(|η_u| ‖g‖^{|u|}/γ_u)_u|_q over U_γ. Throws DomainError when η_u ≠ 0 with γ_u = 0.
double tensor_norm(const CoefficientMap<double>& eta, const WeightFamily& w, double g_norm, double q);
double tensor_norm(const TensorFunction<double>& f, const WeightFamily& w, const Density& density,
                   const NormIndexPair& pq);

/// Sparse square matrix indexed by subsets of U_γ.
template <Scalar T>
class LatticeMatrix {
public:
    explicit LatticeMatrix(unsigned dim) : dim_(dim) {}

    [[nodiscard]] unsigned dim() const noexcept { return dim_; }
    [[nodiscard]] T at(Mask row, Mask col) const;
    void set(Mask row, Mask col, const T& value);
    [[nodiscard]] const std::map<Mask, std::map<Mask, T>>& rows() const noexcept { return rows_; }
    [[nodiscard]] const std::vector<Mask>& index() const noexcept { return index_; }
    void set_index(std::vector<Mask> idx) { index_ = std::move(idx); }

    [[nodiscard]] LatticeMatrix multiply(const LatticeMatrix& other) const;
    /// S·M·S with S = diag((−1)^{|u|}).
    [[nodiscard]] LatticeMatrix sign_conjugate() const;
    /// max |(M − I)_{u,v}| over the index set.
    [[nodiscard]] T max_deviation_from_identity() const;

private:
    unsigned dim_;
    std::vector<Mask> index_;
    std::map<Mask, std::map<Mask, T>> rows_;
};

/// M_{u,v} = c^{|v\u|} for u ⊆ v in U_γ. d ≤ 14.
template <Scalar T>
LatticeMatrix<T> transform_matrix(const WeightFamily& w, const T& c);

/// Ratio ‖target‖/‖source‖ of the corner witness after one side change.
struct WitnessResult {
    Corner corner;
    unsigned n;
    double ratio;
    double target;  // the corner constant
    double gap;     // target − ratio
    double coupling;
    Mask subset;
};

/// p = ∞ corners use g = 1 (n is ignored); p = 1 corners use g_n.
WitnessResult witness_ratio(Corner corner, const WeightFamily& w, const Density& density, unsigned n);

}  // namespace normbridge
