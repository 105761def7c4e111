// SPDX-License-Identifier: MIT
#include "normbridge/growth.hpp"

#include "normbridge/constants.hpp"
#include "normbridge/errors.hpp"
#include "normbridge/parallel.hpp"
#include "normbridge/structured.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace normbridge {

std::string class_name(GrowthClass c) {
    switch (c) {
        case GrowthClass::Uniform: return "uniform";
        case GrowthClass::Polynomial: return "polynomial";
        case GrowthClass::Superpolynomial: return "superpolynomial";
        case GrowthClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

LogLogFit fit_loglog(const std::vector<unsigned>& d, const std::vector<double>& values) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < d.size() && i < values.size(); ++i) {
        if (d[i] == 0 || !(values[i] > 0.0) || !std::isfinite(values[i])) continue;
        xs.push_back(std::log(static_cast<double>(d[i])));
        ys.push_back(std::log(values[i]));
    }
    LogLogFit fit;
    fit.points = xs.size();
    if (xs.size() < 2) return fit;
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double e = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

namespace {

template <typename Pred>
LogLogFit fit_where(const std::vector<unsigned>& d, const std::vector<double>& v, Pred keep) {
    std::vector<unsigned> dd;
    std::vector<double> vv;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (keep(i)) {
            dd.push_back(d[i]);
            vv.push_back(v[i]);
        }
    }
    return fit_loglog(dd, vv);
}

}  // namespace

GrowthClass classify(const std::vector<unsigned>& d, const std::vector<double>& values, LogLogFit& fit,
                     const GrowthThresholds& th) {
    const std::size_t n = d.size();
    const std::size_t half = n / 2;
    fit = fit_where(d, values, [&](std::size_t i) { return i >= half; });
    for (double v : values) {
        if (std::isinf(v)) return GrowthClass::Superpolynomial;
    }
    if (n < 3) return GrowthClass::Inconclusive;

    // last decade of d
    const double d_max = d.back();
    std::size_t first = n - 1;
    while (first > 0 && d[first - 1] >= d_max / 10.0) --first;
    if (first == n - 1 && n >= 2) first = n - 2;
    const double rel_increase = (values.back() - values[first]) / values[first];
    LogLogFit decade = fit_where(d, values, [&](std::size_t i) { return i >= first; });
    if (rel_increase < th.bounded_rel_increase || decade.slope < th.flat_slope) return GrowthClass::Uniform;

    // slope drift between the two quarters of the fitted half
    const std::size_t three_q = half + (n - half) / 2;
    LogLogFit early = fit_where(d, values, [&](std::size_t i) { return i >= half && i <= three_q; });
    LogLogFit late = fit_where(d, values, [&](std::size_t i) { return i >= three_q; });
    if (early.points >= 2 && late.points >= 2 && late.slope - early.slope > th.slope_drift) {
        return GrowthClass::Superpolynomial;
    }
    if (fit.residual < th.residual && fit.slope > th.flat_slope) return GrowthClass::Polynomial;
    return GrowthClass::Inconclusive;
}

GrowthReport sweep(const WeightSpec& spec, const SweepMetrics& metrics, const NormIndexPair& pq,
                   const std::vector<unsigned>& d_list, const GrowthThresholds& thresholds) {
    if (d_list.empty()) throw DomainError("growth sweep needs at least one d");
    for (std::size_t i = 1; i < d_list.size(); ++i) {
        if (d_list[i] <= d_list[i - 1]) throw DomainError("d values must be strictly increasing");
    }
    if (spec.kind == WeightKind::Explicit && d_list.back() > kMaxBruteForceDim) {
        throw CapacityError("explicit weights have no polynomial-cost route; d must stay <= " +
                            std::to_string(kMaxBruteForceDim));
    }
    GrowthReport report;
    report.p = pq.p;
    report.q = pq.q;
    report.family_desc = WeightFamily::instantiate(spec, d_list.back()).description();
    report.samples.resize(d_list.size());
    const bool corner = pq.is_corner();
    LowerOptions lo;
    lo.dense_limit = 0;
    lo.gradient_limit = 0;
    parallel_for(d_list.size(), [&](std::size_t i) {
        const unsigned d = d_list[i];
        WeightFamily w = WeightFamily::instantiate(spec, d);
        GrowthSample s{d, 0.0, 0.0, std::nullopt};
        if (corner) {
            double c = corner_constant(w, metrics.m, metrics.kappa, pq.p, pq.q);
            s.exact = c;
            s.lower = c;
            s.upper = c;
        } else {
            s.lower = variational_lower(w, metrics.b_p, pq, LowerStrategy::Best, lo).value;
            try {
                s.upper = interpolation_upper(w, metrics.m, metrics.kappa, pq);
            } catch (const InfeasibleError&) {
                s.upper = kInf;
            }
        }
        report.samples[i] = s;
    });

    std::vector<double> series;
    std::vector<double> lower;
    for (const auto& s : report.samples) {
        series.push_back(s.exact ? *s.exact : s.upper);
        lower.push_back(s.lower);
    }
    report.series = corner ? "exact" : "upper";
    report.classification = classify(d_list, series, report.fit, thresholds);
    report.lower_fit = fit_where(d_list, lower, [&](std::size_t i) { return i >= d_list.size() / 2; });
    report.cap = *std::max_element(series.begin(), series.end());
    switch (report.classification) {
        case GrowthClass::Uniform: report.tau_hat = 0.0; break;
        default: report.tau_hat = std::max(0.0, report.fit.slope); break;
    }
    report.notes = "fit over the upper half of d on the " + report.series +
                   " series; finite-sample classification, not an asymptotic proof";
    return report;
}

ExponentCheck exponent_check(const WeightSpec& spec, double q, double b_p, const std::vector<unsigned>& d_list) {
    if (spec.kind != WeightKind::FiniteOrder && spec.kind != WeightKind::FiniteDiameter) {
        throw DomainError("exponent_check applies to finite-order and finite-diameter weights");
    }
    if (!(q >= 1.0)) throw DomainError("q must be in [1, inf]");
    ExponentCheck out{};
    const double iq = reciprocal(q);
    out.tau_theory = spec.kind == WeightKind::FiniteOrder ? spec.r * (1.0 - iq) : 1.0 - iq;
    std::vector<double> values(d_list.size());
    parallel_for(d_list.size(), [&](std::size_t i) {
        values[i] = indicator_lower(WeightFamily::instantiate(spec, d_list[i]), b_p, q);
    });
    for (std::size_t i = 0; i < d_list.size(); ++i) out.series.emplace_back(d_list[i], values[i]);
    out.fit = fit_loglog(d_list, values);
    out.tau_hat = std::max(0.0, out.fit.slope);
    return out;
}

std::vector<unsigned> geometric_d_list(unsigned d_min, unsigned d_max, unsigned points) {
    if (d_min == 0 || d_max < d_min) throw DomainError("need 1 <= d_min <= d_max");
    std::set<unsigned> values{d_min, d_max};
    if (points >= 2) {
        const double ratio = std::log(static_cast<double>(d_max) / d_min);
        for (unsigned i = 0; i < points; ++i) {
            double x = d_min * std::exp(ratio * i / (points - 1));
            values.insert(std::clamp(static_cast<unsigned>(std::lround(x)), d_min, d_max));
        }
    }
    return {values.begin(), values.end()};
}

}  // namespace normbridge
