// SPDX-License-Identifier: MIT
#pragma once

#include "normbridge/bounds.hpp"
#include "normbridge/density.hpp"
#include "normbridge/norm_index.hpp"
#include "normbridge/weights.hpp"

#include <optional>
#include <string>
#include <vector>

namespace normbridge {

struct GrowthSample {
    unsigned d;
    double lower;
    double upper;
    std::optional<double> exact;
};

enum class GrowthClass { Uniform, Polynomial, Superpolynomial, Inconclusive };

std::string class_name(GrowthClass c);

/// Least-squares line log(value) = slope·log(d) + intercept; residual is the
/// RMS deviation in log space.
struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    std::size_t points = 0;
};

LogLogFit fit_loglog(const std::vector<unsigned>& d, const std::vector<double>& values);

/// Density scalars a sweep needs: m, κ and B_p at the working p.
struct SweepMetrics {
    double m;
    double kappa;
    double b_p;
};

struct GrowthThresholds {
    double bounded_rel_increase = 1e-6;
    double flat_slope = 0.01;
    double residual = 0.05;
    double slope_drift = 0.5;
};

struct GrowthReport {
    std::string family_desc;
    double p;
    double q;
    std::vector<GrowthSample> samples;
    GrowthClass classification = GrowthClass::Inconclusive;
    double tau_hat = 0.0;
    LogLogFit fit;        // on exact values, or on the upper series off the corners
    LogLogFit lower_fit;  // on the lower series
    double cap = 0.0;     // max of the fitted series
    std::string series;   // "exact" or "upper"
    std::string notes;
};

/// Evaluates the family at each d with polynomial-cost routes, fits the
/// upper half of d_list and classifies the growth.
GrowthReport sweep(const WeightSpec& spec, const SweepMetrics& metrics, const NormIndexPair& pq,
                   const std::vector<unsigned>& d_list, const GrowthThresholds& thresholds = {});

/// Classification of a positive series sampled at increasing d.
GrowthClass classify(const std::vector<unsigned>& d, const std::vector<double>& values, LogLogFit& fit,
                     const GrowthThresholds& thresholds = {});

struct ExponentCheck {
    double tau_hat;
    double tau_theory;
    LogLogFit fit;
    std::vector<std::pair<unsigned, double>> series;
};

/// Fits the indicator-vector lower bound over d_list and compares with
/// r(1−1/q) (finite-order) or 1−1/q (finite-diameter).
ExponentCheck exponent_check(const WeightSpec& spec, double q, double b_p, const std::vector<unsigned>& d_list);

/// Roughly geometric d values from d_min to d_max, always including both.
std::vector<unsigned> geometric_d_list(unsigned d_min, unsigned d_max, unsigned points);

}  // namespace normbridge
