// SPDX-License-Identifier: MIT
#pragma once

#include "normbridge/constants.hpp"
#include "normbridge/density.hpp"
#include "normbridge/norm_index.hpp"
#include "normbridge/weights.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace normbridge {

/// M_{u,v} = γ_v B^{|v\u|}/γ_u for u ⊆ v in U_γ, stored densely over 2^d.
/// Vectors live on the full lattice with zeros outside U_γ.
class LatticeOperator {
public:
    LatticeOperator(const WeightFamily& w, double B);

    [[nodiscard]] unsigned dim() const noexcept { return d_; }
    [[nodiscard]] std::size_t size() const noexcept { return gamma_.size(); }
    [[nodiscard]] bool in_support(Mask u) const { return in_[u] != 0; }
    [[nodiscard]] double gamma(Mask u) const { return gamma_[u]; }

    void apply(const std::vector<double>& c, std::vector<double>& y) const;
    void apply_transpose(const std::vector<double>& z, std::vector<double>& x) const;
    /// |Mc|_q / |c|_q, 0 for c = 0.
    [[nodiscard]] double ratio(const std::vector<double>& c, double q) const;
    /// max_v |M e_v|_q and its maximiser.
    [[nodiscard]] std::pair<double, Mask> best_column(double q) const;

private:
    unsigned d_;
    double b_;
    std::vector<double> gamma_;
    std::vector<char> in_;
};

enum class LowerStrategy { Best, Row, Column, Layered, Indicator, Gradient, Power, ProductVector };

std::string strategy_name(LowerStrategy s);
LowerStrategy parse_strategy(const std::string& name);

struct LowerOptions {
    std::uint64_t seed = 1;
    unsigned restarts = 16;
    unsigned gradient_steps = 500;
    double step = 0.1;
    unsigned dense_limit = 20;     // largest d for lattice-based strategies
    unsigned gradient_limit = 10;  // largest d for projected-gradient restarts
};

struct LowerBound {
    double value;
    LowerStrategy strategy;
};

/// C_{1,∞}^{1/p−1/q} C_{1,1}^{1/q} C_{∞,∞}^{1−1/p} for p ≤ q and
/// C_{∞,1}^{1/q−1/p} C_{1,1}^{1/p} C_{∞,∞}^{1−1/q} for q ≤ p.
/// Corners with exponent zero are not evaluated.
double interpolation_upper(const WeightFamily& w, double m, double kappa, const NormIndexPair& pq);

/// One strategy; returns 0 when it does not apply to (w, d, q).
double lower_with(const WeightFamily& w, double B, double q, LowerStrategy s, const LowerOptions& opt = {});

/// Certified lower bound sup_c |Mc|_q/|c|_q over nonnegative c. Best runs
/// every applicable strategy and keeps the first maximum.
LowerBound variational_lower(const WeightFamily& w, double B, const NormIndexPair& pq,
                             LowerStrategy s = LowerStrategy::Best, const LowerOptions& opt = {});

struct EmbeddingConstants {
    double p;
    double q;
    std::optional<double> exact;
    std::optional<Rational> exact_rational;
    double lower;
    double upper;
    std::optional<Mask> witness;
    unsigned dim;
    std::string method_notes;
};

/// ‖ι_{p,q}‖ = ‖ι⁻¹_{p,q}‖: exact at the corners, (lower, upper) elsewhere.
/// metrics must carry B_p for non-corner p.
EmbeddingConstants embedding_norm(const WeightFamily& w, const DensityMetrics& metrics, const NormIndexPair& pq,
                                  const LowerOptions& opt = {});

}  // namespace normbridge
