// SPDX-License-Identifier: MIT
#pragma once

#include "normbridge/weights.hpp"

#include <functional>
#include <vector>

namespace normbridge {

// Lower bounds sup_c |Mc|_q/|c|_q, M_{u,v} = γ_v B^{|v\u|}/γ_u, evaluated
// without touching the 2^d lattice. Each certifies a valid lower bound at
// any d; a result of 0 means the construction does not apply.

/// Finite-order: c = 1 on the top layer |u| = min(r, d).
/// Finite-diameter: c = 1 on every block of min(r+1, d) consecutive coordinates.
double indicator_lower(const WeightFamily& w, double B, double q);

/// Product and dimension-dependent weights: c = ⊗_j (cos θ_j, sin θ_j),
/// each factor maximised on its own.
double product_vector_lower(const WeightFamily& w, double B, double q);

/// POD weights: max over t of |M e_{{1..t}}|_q, which is max_v |M e_v|_q.
double pod_column_lower(const WeightFamily& w, double B, double q);

/// Symmetric weights: c_u = φ(|u|), optimised in the reduced layer space.
/// Returns 0 when the number of layers exceeds max_layers.
double symmetric_layered_lower(const WeightFamily& w, double B, double q, unsigned max_layers = 512);

using LinearMap = std::function<void(const std::vector<double>&, std::vector<double>&)>;

/// Nonlinear power iteration for the ℓ_q → ℓ_q norm of a nonnegative
/// matrix given by its action and its transpose's action, 1 < q < ∞.
/// Returns the largest ratio |Ax|_q/|x|_q seen along the iteration.
double lq_power_norm(const LinearMap& apply, const LinearMap& apply_t, std::vector<double> start, double q,
                     unsigned iterations = 200);

/// |x|_q over all entries, q ∈ [1, ∞].
double lq_norm(const std::vector<double>& x, double q);

/// ln C(n, k), −∞ when k > n.
double log_binomial(double n, double k);

}  // namespace normbridge
