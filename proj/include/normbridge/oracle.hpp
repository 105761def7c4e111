// SPDX-License-Identifier: MIT
#pragma once

#include "normbridge/constants.hpp"
#include "normbridge/density.hpp"
#include "normbridge/norm_index.hpp"
#include "normbridge/rational.hpp"
#include "normbridge/weights.hpp"

#include <cstdint>
#include <string>

namespace normbridge::oracle {

/// The corner formulas evaluated literally: nested loops over subsets and
/// submasks, O(3^d), no transforms, no structure. d ≤ 14.
template <Scalar T>
T bruteforce_corner(const WeightFamily& w, const T& m, const T& kappa, double p, double q);

enum class Metric { M, Kappa, B };

struct QuadResult {
    double value;
    double error;
};

/// m = ∫ t ψ(t) dt, κ = sup ψ̄/ψ and B_p = ‖ψ̄ ψ^{−1/p}‖_{p'} computed from
/// the pdf alone: ψ̄ is itself a quadrature of ψ. Divergence yields ∞.
QuadResult quad_metric(const Density& density, Metric metric, double p = 2.0, double tol = 1e-10);

struct RatioScanResult {
    double best;
    std::size_t best_trial;
    std::size_t trials;
    std::uint64_t seed;
    std::string best_description;
};

/// Largest ‖convert(f)‖/‖f‖ over random tensor functions (and the four
/// corner witnesses when seed_witnesses is set), in both directions. d ≤ 10.
RatioScanResult ratio_scan(const WeightFamily& w, const Density& density, const NormIndexPair& pq,
                           std::size_t trials, std::uint64_t seed, bool seed_witnesses = true);

}  // namespace normbridge::oracle
