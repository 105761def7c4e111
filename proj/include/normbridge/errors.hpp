// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace normbridge {

/// Argument outside the domain of an operation (bad parameters, t ∉ D, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The model is infeasible: weights violate the monotonicity condition,
/// or the density fails the integrability condition needed at this p.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problem size exceeds what the dense/brute-force routes can enumerate.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace normbridge
