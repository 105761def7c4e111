// SPDX-License-Identifier: MIT
#pragma once

#include "normbridge/norm_index.hpp"
#include "normbridge/rational.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace normbridge {

enum class DensityFamily { Uniform, BetaLike, ParetoLike, ExpType, Tabulated };

enum class EndPoint { Open, Closed };

/// Integrability conditions of a density at index p.
///   eq1: p = ∞, or ψ^{-1/p} ∈ L_{p'}^{loc}(D)
///   eq2: p = ∞ and ψ̄ ∈ L_1(D), or eq1 together with ψ̄·ψ^{-1/p} ∈ L_{p'}(D)
struct ConditionReport {
    double p;
    bool eq1_holds;
    bool eq2_holds;
    std::string reason;
};

/// m_ψ, κ_ψ and sampled B_p. ∞ is a valid value for each.
struct DensityMetrics {
    double m;
    double kappa;
    std::vector<std::pair<double, double>> b;  // (p, B_p)
    std::optional<Rational> exact_m;
    std::optional<Rational> exact_kappa;

    /// B_p for a p that was sampled; B_1 = κ and B_∞ = m are always known.
    [[nodiscard]] double b_at(double p) const;
};

/// Interval [lo, hi] ⊆ D.
struct Interval {
    double lo;
    double hi;
    [[nodiscard]] double length() const { return hi - lo; }
};

/// Tuning knobs for the numerical routes.
struct QuadratureOptions {
    double tolerance = 1e-10;
    /// Dyadic increment ratio at or above this value is read as divergence.
    double divergence_cutoff = 1.0 - 1e-6;
    unsigned dyadic_levels = 60;
};

/// Probability density ψ on D = [0,T) or [0,T]. Immutable after construction.
class Density {
public:
    static Density uniform();
    /// ψ(t) = (α+1)(1−t)^α on [0,1) or [0,1], α > −1.
    static Density beta_like(const Rational& alpha, EndPoint end = EndPoint::Closed);
    /// ψ(t) = (α−1)(1+t)^{−α} on [0,∞), α > 1.
    static Density pareto_like(const Rational& alpha);
    /// ψ(t) = c·exp(−b t^a) on [0,∞), a, b > 0.
    static Density exp_type(double a, double b);
    /// Piecewise-linear density through (t_i, ψ_i) on [0, t_n]; t_0 = 0.
    static Density tabulated(std::vector<double> t, std::vector<double> psi);
    /// Two-column CSV with header row: t,psi.
    static Density from_csv(const std::filesystem::path& path);

    [[nodiscard]] DensityFamily family() const noexcept { return family_; }
    [[nodiscard]] double domain_end() const noexcept { return end_; }
    [[nodiscard]] bool closed_end() const noexcept { return closed_; }
    [[nodiscard]] bool contains(double t) const noexcept;
    [[nodiscard]] std::string description() const;

    /// Shape parameter α for BetaLike / ParetoLike (0 for Uniform).
    [[nodiscard]] double alpha() const noexcept { return alpha_d_; }
    [[nodiscard]] const Rational& exact_alpha() const noexcept { return alpha_; }
    [[nodiscard]] double exp_a() const noexcept { return a_; }
    [[nodiscard]] double exp_b() const noexcept { return b_; }

    [[nodiscard]] double pdf(double t) const;
    /// ψ̄(t) = ∫_t^T ψ.
    [[nodiscard]] double survival(double t) const;
    /// ψ̄(t)/ψ(t); 0 where ψ̄ = 0, ∞ where ψ < 1e−300 and ψ̄ > 0.
    [[nodiscard]] double hazard_ratio(double t) const;

    /// ψ and ψ̄ at distance s from a finite anchor x0 on side ±1, evaluated
    /// without forming x0 ± s (needed as s → 0 near singular points).
    [[nodiscard]] double pdf_near(double x0, int side, double s) const;
    [[nodiscard]] double survival_near(double x0, int side, double s) const;

    /// m_ψ = ∫_D ψ̄.
    [[nodiscard]] double mean_m(const QuadratureOptions& opt = {}) const;
    /// κ_ψ = esup ψ̄/ψ.
    [[nodiscard]] double kappa() const;
    /// Location where ψ̄/ψ attains (or approaches) κ_ψ.
    [[nodiscard]] double kappa_argmax() const;
    /// B_p = ‖ψ̄/ψ^{1/p}‖_{L_{p'}(D)}.
    [[nodiscard]] double b_p(double p, const QuadratureOptions& opt = {}) const;

    /// Closed form for the built-in families, numerical test for Tabulated.
    [[nodiscard]] ConditionReport check_conditions(double p, const QuadratureOptions& opt = {}) const;
    /// Dyadic-growth convergence test, available for every family.
    [[nodiscard]] ConditionReport check_conditions_numeric(double p,
                                                           const QuadratureOptions& opt = {}) const;

    [[nodiscard]] DensityMetrics metrics(const std::vector<double>& ps = {},
                                         const QuadratureOptions& opt = {}) const;

    /// Maximal interval around the maximiser of ψ̄/ψ on which ψ̄/ψ ≥ level.
    /// Infinite domains are truncated at scan_horizon().
    [[nodiscard]] Interval level_set(double level) const;

    /// Finite right end for scans: T, or a point where ψ̄ has decayed below 1e−14.
    [[nodiscard]] double scan_horizon() const;

    /// Knots of the tabulated density (empty otherwise).
    [[nodiscard]] const std::vector<double>& nodes() const noexcept { return t_; }
    [[nodiscard]] const std::vector<double>& node_values() const noexcept { return psi_; }

private:
    Density() = default;

    [[nodiscard]] std::size_t segment_of(double t) const;
    [[nodiscard]] std::vector<double> zero_nodes() const;
    [[nodiscard]] std::pair<double, double> ratio_sup() const;

    DensityFamily family_ = DensityFamily::Uniform;
    double end_ = 1.0;
    bool closed_ = true;
    Rational alpha_{0};
    double alpha_d_ = 0.0;
    double a_ = 1.0;
    double b_ = 1.0;
    double norm_c_ = 1.0;  // ExpType normalisation
    std::vector<double> t_;
    std::vector<double> psi_;
    std::vector<double> tail_;  // ∫_{t_i}^T ψ for Tabulated
    double kappa_ = 1.0;
    double kappa_at_ = 0.0;
};

}  // namespace normbridge
