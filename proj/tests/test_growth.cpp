// SPDX-License-Identifier: MIT
#include "normbridge/constants.hpp"
#include "normbridge/errors.hpp"
#include "normbridge/growth.hpp"
#include "normbridge/io.hpp"
#include "normbridge/oracle.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace normbridge;
using fixtures::frac;

namespace {

WeightSpec product_geometric(const Rational& ratio) {
    WeightSpec s;
    s.kind = WeightKind::Product;
    s.rule = ProductRule::Geometric;
    s.ratio = ratio;
    return s;
}

WeightSpec product_power(const Rational& exponent) {
    WeightSpec s;
    s.kind = WeightKind::Product;
    s.rule = ProductRule::Power;
    s.exponent = exponent;
    return s;
}

WeightSpec order_or_diameter(WeightKind kind, unsigned r) {
    WeightSpec s;
    s.kind = kind;
    s.r = r;
    s.omega = Rational(1);
    return s;
}

WeightSpec of_kind(WeightKind kind) {
    WeightSpec s;
    s.kind = kind;
    return s;
}

const SweepMetrics kUniform{0.5, 1.0, 1.0 / std::sqrt(3.0)};

void expect_report_invariants(const GrowthReport& r) {
    for (std::size_t i = 1; i < r.samples.size(); ++i) EXPECT_LT(r.samples[i - 1].d, r.samples[i].d);
    EXPECT_GE(r.tau_hat, 0.0);
    for (const GrowthSample& s : r.samples) {
        EXPECT_LE(s.lower, s.upper * (1.0 + 1e-12)) << "d=" << s.d;
        if (r.classification == GrowthClass::Uniform) EXPECT_LE(s.upper, r.cap * (1.0 + 1e-12));
    }
}

}  // namespace

TEST(GrowthHelpers, GeometricDList) {
    const std::vector<unsigned> ds = geometric_d_list(64, 4096, 16);
    EXPECT_EQ(ds.front(), 64U);
    EXPECT_EQ(ds.back(), 4096U);
    for (std::size_t i = 1; i < ds.size(); ++i) EXPECT_LT(ds[i - 1], ds[i]);
    EXPECT_LE(ds.size(), 16U);
    EXPECT_EQ(geometric_d_list(5, 5, 10), (std::vector<unsigned>{5}));
}

TEST(GrowthHelpers, FitRecoversExactPowerLaw) {
    std::vector<unsigned> d{10, 20, 40, 80, 160};
    std::vector<double> v;
    for (unsigned x : d) v.push_back(3.0 * std::pow(x, 1.7));
    const LogLogFit f = fit_loglog(d, v);
    EXPECT_NEAR(f.slope, 1.7, 1e-12);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-10);
    EXPECT_NEAR(f.residual, 0.0, 1e-10);
    EXPECT_EQ(f.points, 5U);
}

TEST(GrowthHelpers, ClassifyShapes) {
    std::vector<unsigned> d = geometric_d_list(8, 4096, 20);
    std::vector<double> flat;
    std::vector<double> poly;
    std::vector<double> expo;
    for (unsigned x : d) {
        flat.push_back(2.0 - 1.0 / std::pow(2.0, x));
        poly.push_back(std::pow(x, 1.5));
        expo.push_back(std::exp(0.05 * x));
    }
    LogLogFit f;
    EXPECT_EQ(classify(d, flat, f), GrowthClass::Uniform);
    EXPECT_EQ(classify(d, poly, f), GrowthClass::Polynomial);
    EXPECT_NEAR(f.slope, 1.5, 1e-9);
    EXPECT_EQ(classify(d, expo, f), GrowthClass::Superpolynomial);
    for (GrowthClass c : {GrowthClass::Uniform, GrowthClass::Polynomial, GrowthClass::Superpolynomial,
                          GrowthClass::Inconclusive}) {
        EXPECT_FALSE(class_name(c).empty());
    }
}

TEST(Sweep, GeometricProductIsUniform) {
    const GrowthReport r = sweep(product_geometric(frac(1, 2)), kUniform, {1.0, 1.0}, geometric_d_list(1, 1024, 20));
    EXPECT_EQ(r.classification, GrowthClass::Uniform);
    double cap = 1.0;
    for (int j = 1; j < 200; ++j) cap *= 1.0 + std::ldexp(1.0, -j);
    EXPECT_LE(r.cap, cap * (1.0 + 1e-12));
    EXPECT_EQ(r.series, "exact");
    expect_report_invariants(r);
}

TEST(Sweep, FiniteOrderCornerIsPolynomialOfDegreeR) {
    const GrowthReport r = sweep(order_or_diameter(WeightKind::FiniteOrder, 2), kUniform, {1.0, kInf},
                                 geometric_d_list(16, 4096, 16));
    EXPECT_EQ(r.classification, GrowthClass::Polynomial);
    EXPECT_NEAR(r.tau_hat, 2.0, 0.1);
    expect_report_invariants(r);
}

TEST(Sweep, DimensionDependentIsUniformBelowE) {
    const GrowthReport r = sweep(of_kind(WeightKind::DimensionDependent), kUniform, {1.0, 1.0},
                                 geometric_d_list(1, 10000, 24));
    EXPECT_EQ(r.classification, GrowthClass::Uniform);
    EXPECT_LE(r.cap, std::exp(1.0));
    EXPECT_GT(r.cap, 2.7);
    expect_report_invariants(r);
}

TEST(Sweep, InverseSquareProductIsUniformInverseLinearIsNot) {
    for (auto pq : {NormIndexPair(1.0, 1.0), NormIndexPair(kInf, kInf)}) {
        EXPECT_EQ(sweep(product_power(Rational(2)), kUniform, pq, geometric_d_list(1, 4096, 20)).classification,
                  GrowthClass::Uniform);
        const GrowthReport harmonic = sweep(product_power(Rational(1)), kUniform, pq, geometric_d_list(1, 4096, 20));
        EXPECT_EQ(harmonic.classification, GrowthClass::Polynomial);
        expect_report_invariants(harmonic);
    }
}

TEST(Sweep, OffCornerUsesBounds) {
    const GrowthReport r = sweep(order_or_diameter(WeightKind::FiniteOrder, 1), kUniform, {2.0, 2.0},
                                 geometric_d_list(1, 256, 10));
    EXPECT_EQ(r.series, "upper");
    for (const GrowthSample& s : r.samples) EXPECT_FALSE(s.exact.has_value());
    expect_report_invariants(r);
}

TEST(Sweep, SmallExplicitFamiliesMatchBruteForce) {
    std::mt19937_64 rng(51);
    const WeightFamily w = fixtures::random_monotone_explicit(6, rng, false);
    const GrowthReport r = sweep(w.spec(), kUniform, {kInf, 1.0}, {6});
    ASSERT_EQ(r.samples.size(), 1U);
    ASSERT_TRUE(r.samples[0].exact.has_value());
    EXPECT_NEAR(*r.samples[0].exact, oracle::bruteforce_corner<double>(w, 0.5, 1.0, kInf, 1.0), 1e-12);
}

TEST(Sweep, InfeasibleDensityPropagates) {
    const SweepMetrics heavy{1.0, kInf, kInf};
    EXPECT_THROW(sweep(order_or_diameter(WeightKind::FiniteOrder, 1), heavy, {1.0, 1.0}, {1, 2, 4}), InfeasibleError);
}

TEST(ExponentCheck, TheoryValues) {
    EXPECT_DOUBLE_EQ(exponent_check(order_or_diameter(WeightKind::FiniteOrder, 2), 2.0, 0.5, {64, 128}).tau_theory, 1.0);
    EXPECT_DOUBLE_EQ(exponent_check(order_or_diameter(WeightKind::FiniteDiameter, 3), kInf, 0.5, {64, 128}).tau_theory,
                     1.0);
    EXPECT_DOUBLE_EQ(exponent_check(order_or_diameter(WeightKind::FiniteOrder, 3), 1.0, 0.5, {64, 128}).tau_theory, 0.0);
    EXPECT_THROW(exponent_check(of_kind(WeightKind::DimensionDependent), 2.0, 0.5, {64}), DomainError);
}

TEST(ExponentCheckProperty, FittedExponentsMatchTheory) {
    const std::vector<unsigned> ds = geometric_d_list(64, 4096, 12);
    const double b2 = kUniform.b_p;
    for (unsigned r = 1; r <= 3; ++r) {
        for (double q : {2.0, 4.0, kInf}) {
            const ExponentCheck e = exponent_check(order_or_diameter(WeightKind::FiniteOrder, r), q, b2, ds);
            EXPECT_NEAR(e.tau_hat, e.tau_theory, 0.1) << "finite-order r=" << r << " q=" << q;
        }
    }
    // at q = 2 the constant part of |Mc|_2^2 dominates d (ωB)^{2(r+1)} up to d = 4096 once r ≥ 3
    for (unsigned r = 1; r <= 4; ++r) {
        for (double q : r <= 2 ? std::vector<double>{2.0, kInf} : std::vector<double>{kInf}) {
            const ExponentCheck e = exponent_check(order_or_diameter(WeightKind::FiniteDiameter, r), q, b2, ds);
            EXPECT_NEAR(e.tau_hat, e.tau_theory, 0.1) << "finite-diameter r=" << r << " q=" << q;
        }
    }
}

TEST(ExponentCheckProperty, FiniteDiameterAtQTwoReachesTheoryAtLargerD) {
    const ExponentCheck e = exponent_check(order_or_diameter(WeightKind::FiniteDiameter, 3), 2.0, kUniform.b_p,
                                           geometric_d_list(4096, 262144, 6));
    EXPECT_NEAR(e.tau_hat, 0.5, 0.1);
}

TEST(ExponentCheckProperty, FiniteOrderAtQOneIsUniform) {
    const std::vector<unsigned> ds = geometric_d_list(64, 4096, 12);
    for (unsigned r = 1; r <= 3; ++r) {
        const GrowthReport rep = sweep(order_or_diameter(WeightKind::FiniteOrder, r), kUniform, {1.0, 1.0}, ds);
        EXPECT_EQ(rep.classification, GrowthClass::Uniform) << "r=" << r;
    }
}

TEST(GrowthProperty, DimensionDependentBelowExponentials) {
    for (unsigned d : geometric_d_list(1, 10000, 40)) {
        const WeightFamily w = WeightFamily::dimension_dependent(d);
        for (double q : {1.0, kInf}) {
            EXPECT_LE(corner_constant(w, 0.5, 1.0, 1.0, q), std::exp(1.0)) << "d=" << d;
            EXPECT_LE(corner_constant(w, 0.5, 1.0, kInf, q), std::exp(0.5)) << "d=" << d;
        }
    }
}

TEST(GrowthProperty, PodLowerBoundOutgrowsPolynomials) {
    WeightSpec pod = of_kind(WeightKind::POD);
    pod.beta1 = Rational(1);
    pod.beta2 = Rational(2);
    pod.c = Rational(1);
    const std::vector<unsigned> ds = geometric_d_list(16, 1024, 12);
    const GrowthReport r = sweep(pod, kUniform, {2.0, 2.0}, ds);
    EXPECT_EQ(r.classification, GrowthClass::Superpolynomial);
    for (double tau : {1.0, 2.0, 3.0}) {
        // lower(d)/d^τ increases over the upper half of the range
        for (std::size_t i = ds.size() / 2 + 1; i < ds.size(); ++i) {
            const double a = r.samples[i - 1].lower / std::pow(r.samples[i - 1].d, tau);
            const double b = r.samples[i].lower / std::pow(r.samples[i].d, tau);
            EXPECT_GT(b, a) << "tau=" << tau << " d=" << r.samples[i].d;
        }
    }
}

TEST(GrowthIo, CsvAndJson) {
    const GrowthReport r = sweep(order_or_diameter(WeightKind::FiniteOrder, 1), kUniform, {2.0, kInf}, {1, 2, 4});
    std::ostringstream csv;
    io::write_growth_csv(csv, r);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "d,lower,upper,exact");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(line.back(), ',');  // exact column empty off the corners
    }
    EXPECT_EQ(rows, 3);
    const io::Json j = io::growth_to_json(r);
    EXPECT_EQ(j.at("classification"), class_name(r.classification));
    EXPECT_EQ(j.at("d").size(), 3U);
}
