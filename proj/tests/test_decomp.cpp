// SPDX-License-Identifier: MIT
#include "normbridge/constants.hpp"
#include "normbridge/decomp.hpp"
#include "normbridge/density.hpp"
#include "normbridge/errors.hpp"
#include "normbridge/io.hpp"
#include "normbridge/structured.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace normbridge;
using fixtures::frac;

namespace {

/// a_u = Σ_{w ⊆ u^c} η_{u∪w} s^{|w|}, summed literally over the full lattice.
CoefficientMap<Rational> literal_transform(const CoefficientMap<Rational>& eta, unsigned d, const Rational& s) {
    CoefficientMap<Rational> out;
    for (Mask u = 0; u <= full_mask(d); ++u) {
        Rational a(0);
        for_each_submask(full_mask(d) & ~u, [&](Mask w) {
            auto it = eta.find(u | w);
            if (it != eta.end()) a += it->second * pow_int(s, popcount(w));
        });
        if (!is_zero(a)) out[u] = a;
    }
    return out;
}

CoefficientMap<Rational> nonzero(const CoefficientMap<Rational>& m) {
    CoefficientMap<Rational> out;
    for (const auto& [u, v] : m) {
        if (!is_zero(v)) out[u] = v;
    }
    return out;
}

/// Weighted ℓ_q norm (|c_u| b^{|u|}/γ_u)_u over the full lattice.
double weighted_norm(const std::vector<double>& c, const WeightFamily& w, double b, double q) {
    std::vector<double> x(c.size(), 0.0);
    for (Mask u = 0; u < c.size(); ++u) {
        if (c[u] != 0.0) x[u] = std::fabs(c[u]) * std::pow(b, popcount(u)) / w.gamma(u);
    }
    return lq_norm(x, q);
}

std::vector<double> mat_vec(const LatticeMatrix<double>& m, const std::vector<double>& c) {
    std::vector<double> y(c.size(), 0.0);
    for (const auto& [row, cols] : m.rows()) {
        for (const auto& [col, v] : cols) y[row] += v * c[col];
    }
    return y;
}

}  // namespace

TEST(Coupling, Examples) {
    EXPECT_NEAR(coupling_c(UnivariateProfile::constant(), Density::uniform()), 0.5, 1e-15);
    EXPECT_NEAR(coupling_c(UnivariateProfile::constant(), Density::beta_like(Rational(1))), 1.0 / 3.0, 1e-14);
    const double m1000 = coupling_c(UnivariateProfile::level_set(1000), Density::uniform());
    EXPECT_GE(m1000, 0.999);
    EXPECT_LE(m1000, 1.0);
    EXPECT_THROW((void)coupling_c(UnivariateProfile::constant(), Density::pareto_like(Rational(2))), InfeasibleError);
}

TEST(Coupling, TabulatedProfile) {
    // g = t on [0,1] against ψ = 1: ∫ t (1 − t) dt = 1/6
    const UnivariateProfile g = UnivariateProfile::tabulated({0.0, 1.0}, {0.0, 1.0});
    EXPECT_NEAR(coupling_c(g, Density::uniform()), 1.0 / 6.0, 1e-13);
    EXPECT_NEAR(profile_norm(g, Density::uniform(), 2.0), 1.0 / std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(profile_norm(g, Density::uniform(), kInf), 1.0, 1e-15);
}

TEST(WitnessSequenceTest, LevelSetNormalisation) {
    const Density d = Density::beta_like(Rational(1));
    double prev = 0.0;
    for (unsigned n : {1U, 10U, 100U, 1000U}) {
        const WitnessSequence ws = witness_sequence(d, n);
        EXPECT_GT(ws.measure, 0.0);
        EXPECT_TRUE(std::isfinite(ws.measure));
        EXPECT_NEAR(ws.measure, ws.level_set.length(), 1e-15);
        // ∫ G_n ψ̄/ψ ... is m_n; ‖g_n‖_{L_1,ψ} = ∫ G_n = 1
        EXPECT_NEAR(profile_norm(UnivariateProfile::level_set(n), d, 1.0), 1.0, 1e-15);
        EXPECT_GE(ws.m_n, prev - 1e-12);
        EXPECT_LE(ws.m_n, d.kappa() + 1e-12);
        prev = ws.m_n;
    }
    EXPECT_THROW((void)witness_sequence(d, 0), DomainError);
}

TEST(Convert, OneDimensionalExample) {
    TensorFunction<Rational> f;
    f.dim = 1;
    f.eta[1] = Rational(1);
    const TensorFunction<Rational> g = convert(f, frac(1, 2));
    EXPECT_EQ(g.side, Side::Anova);
    EXPECT_EQ(g.eta.at(0), frac(1, 2));
    EXPECT_EQ(g.eta.at(1), Rational(1));
    const TensorFunction<Rational> back = convert(g, frac(1, 2));
    EXPECT_EQ(back.side, Side::Anchored);
    EXPECT_EQ(nonzero(back.eta), f.eta);
}

TEST(Convert, ProductWeightExample) {
    const WeightFamily w = WeightFamily::product({frac(1, 2), frac(1, 8)});
    TensorFunction<Rational> f;
    f.dim = 2;
    for (Mask u = 0; u < 4; ++u) f.eta[u] = w.gamma_exact(u);
    const TensorFunction<Rational> a = convert(f, frac(1, 2));
    EXPECT_EQ(a.eta.at(0), frac(85, 64));
    EXPECT_DOUBLE_EQ(a.eta.at(0).get_d(), 1.328125);
    EXPECT_EQ(a.eta.at(1), frac(1, 2) + frac(1, 32));
    EXPECT_EQ(a.eta.at(2), frac(1, 8) + frac(1, 32));
    EXPECT_EQ(a.eta.at(3), frac(1, 16));
}

TEST(ConvertProperty, MatchesLiteralSubsetSums) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const unsigned d = 1 + static_cast<unsigned>(rng() % 8);
        CoefficientMap<Rational> eta;
        const unsigned k = 1 + static_cast<unsigned>(rng() % (trial % 4 == 0 ? 256 : 6));
        for (unsigned i = 0; i < k; ++i) eta[rng() & full_mask(d)] = frac(static_cast<long>(rng() % 17) - 8, 4);
        const Rational s = frac(static_cast<long>(rng() % 9) - 4, 3);
        EXPECT_EQ(nonzero(superset_transform(eta, d, s)), literal_transform(eta, d, s));
    }
}

TEST(ConvertProperty, RoundTripIsIdentity) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const unsigned d = 1 + static_cast<unsigned>(rng() % 10);
        TensorFunction<double> f;
        TensorFunction<Rational> fr;
        f.dim = fr.dim = d;
        f.side = fr.side = trial % 2 ? Side::Anova : Side::Anchored;
        const unsigned k = 1 + static_cast<unsigned>(rng() % 12);
        for (unsigned i = 0; i < k; ++i) {
            const Mask u = rng() & full_mask(d);
            f.eta[u] = unit(rng);
            fr.eta[u] = frac(static_cast<long>(rng() % 33) - 16, 16);
        }
        const double c = 2.0 * unit(rng);
        const TensorFunction<double> back = convert(convert(f, c), c);
        EXPECT_EQ(back.side, f.side);
        for (const auto& [u, v] : f.eta) {
            auto it = back.eta.find(u);
            worst = std::max(worst, std::fabs(v - (it == back.eta.end() ? 0.0 : it->second)));
        }
        const Rational cr = frac(static_cast<long>(rng() % 17) - 8, 4);
        EXPECT_EQ(nonzero(convert(convert(fr, cr), cr).eta), nonzero(fr.eta));
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(TensorNorm, Examples) {
    const WeightFamily w = WeightFamily::pod(4, Rational(1), Rational(2), frac(1, 2));
    CoefficientMap<double> eta;
    for (Mask u : w.support()) eta[u] = w.gamma(u);
    EXPECT_NEAR(tensor_norm(eta, w, 1.0, kInf), 1.0, 1e-15);
    CoefficientMap<double> single{{Mask{0b0110}, w.gamma(0b0110)}};
    EXPECT_NEAR(tensor_norm(single, w, 1.0, 1.0), 1.0, 1e-15);
    const WeightFamily one = WeightFamily::product({Rational(1)});
    EXPECT_NEAR(tensor_norm(CoefficientMap<double>{{Mask{1}, 2.0}}, one, 0.5, 1.0), 1.0, 1e-15);
    const WeightFamily fo = WeightFamily::finite_order(3, Rational(1), 1);
    EXPECT_THROW((void)tensor_norm(CoefficientMap<double>{{Mask{3}, 1.0}}, fo, 1.0, 1.0), DomainError);
}

TEST(TensorNorm, WholeFunctionOverload) {
    const WeightFamily w = WeightFamily::finite_order(3, Rational(1), 2);
    TensorFunction<double> f;
    f.dim = 3;
    f.profile = UnivariateProfile::tabulated({0.0, 1.0}, {0.0, 1.0});
    f.eta = {{Mask{0}, 1.0}, {Mask{3}, 3.0}};
    const double g = 1.0 / std::sqrt(3.0);
    EXPECT_NEAR(tensor_norm(f, w, Density::uniform(), {2.0, 2.0}), std::sqrt(1.0 + 9.0 * std::pow(g, 4)), 1e-12);
}

TEST(TransformMatrix, SmallCases) {
    const WeightFamily one = WeightFamily::product({Rational(1)});
    const LatticeMatrix<Rational> m1 = transform_matrix(one, frac(2, 3));
    EXPECT_EQ(m1.at(0, 0), Rational(1));
    EXPECT_EQ(m1.at(0, 1), frac(2, 3));
    EXPECT_EQ(m1.at(1, 0), Rational(0));
    EXPECT_EQ(m1.at(1, 1), Rational(1));
    const Rational c = frac(1, 3);
    const LatticeMatrix<Rational> m2 = transform_matrix(WeightFamily::product({Rational(1), Rational(1)}), c);
    for (Mask u = 0; u < 4; ++u) {
        for (Mask v = 0; v < 4; ++v) {
            const Rational want = (u & ~v) == 0 ? pow_int(c, popcount(v & ~u)) : Rational(0);
            EXPECT_EQ(m2.at(u, v), want);
            if (v < u) EXPECT_EQ(m2.at(u, v), Rational(0));
        }
    }
    std::map<Mask, Rational> big{{Mask{0}, Rational(1)}};
    EXPECT_THROW(transform_matrix(WeightFamily::explicit_table(15, big), Rational(1)), CapacityError);
}

TEST(TransformMatrixProperty, SignConjugateIsTheInverse) {
    std::mt19937_64 rng(43);
    for (unsigned d = 1; d <= 8; ++d) {
        std::vector<WeightFamily> ws{WeightFamily::finite_order(d, Rational(1), 2),
                                     WeightFamily::finite_diameter(d, Rational(1), 1),
                                     fixtures::random_monotone_explicit(d, rng, false)};
        for (const WeightFamily& w : ws) {
            const LatticeMatrix<Rational> m = transform_matrix(w, frac(static_cast<long>(rng() % 9) + 1, 5));
            EXPECT_EQ(m.multiply(m.sign_conjugate()).max_deviation_from_identity(), Rational(0)) << w.description();
            EXPECT_EQ(m.sign_conjugate().multiply(m).max_deviation_from_identity(), Rational(0)) << w.description();
        }
    }
}

TEST(TransformMatrixProperty, SignFlipIsAnIsometry) {
    // S preserves the weighted ℓ_q norm, so ‖M c‖/‖c‖ = ‖SMS (Sc)‖/‖Sc‖ and the two
    // operator norms coincide
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (unsigned d = 1; d <= 8; ++d) {
        const WeightFamily w = WeightFamily::finite_order(d, Rational(1), 2);
        const LatticeMatrix<double> m = transform_matrix(w, 0.5);
        const LatticeMatrix<double> sms = m.sign_conjugate();
        for (double q : {1.0, 2.0, 4.0, kInf}) {
            double best_m = 0.0;
            double best_sms = 0.0;
            for (int t = 0; t < 200; ++t) {
                std::vector<double> c(std::size_t{1} << d, 0.0);
                for (Mask u : w.support()) c[u] = unit(rng);
                std::vector<double> sc(c);
                for (Mask u = 0; u < sc.size(); ++u) {
                    if (popcount(u) & 1U) sc[u] = -sc[u];
                }
                const double rm = weighted_norm(mat_vec(m, c), w, 1.0, q) / weighted_norm(c, w, 1.0, q);
                const double rs = weighted_norm(mat_vec(sms, sc), w, 1.0, q) / weighted_norm(sc, w, 1.0, q);
                EXPECT_NEAR(rm, rs, 1e-12 * rm);
                best_m = std::max(best_m, rm);
                best_sms = std::max(best_sms, rs);
            }
            EXPECT_NEAR(best_m, best_sms, 1e-6 * best_m);
        }
    }
}

TEST(Witness, InfInfIsExact) {
    const Density u = Density::uniform();
    for (const WeightFamily& w : {WeightFamily::finite_order(4, Rational(1), 2),
                                  WeightFamily::product({frac(1, 2), frac(1, 8), Rational(1)}),
                                  WeightFamily::dimension_dependent(5)}) {
        for (unsigned n : {1U, 1000U}) {
            const WitnessResult r = witness_ratio(Corner::InfInf, w, u, n);
            EXPECT_NEAR(r.ratio, r.target, 1e-13 * r.target) << w.description();
            EXPECT_NEAR(r.gap, 0.0, 1e-13 * r.target);
        }
        const WitnessResult r1 = witness_ratio(Corner::InfOne, w, u, 1);
        EXPECT_NEAR(r1.ratio, r1.target, 1e-13 * r1.target) << w.description();
    }
}

TEST(Witness, OneOneMatchesPaperFormula) {
    const Density u = Density::uniform();
    const WeightFamily w = WeightFamily::finite_diameter(5, Rational(1), 2);
    for (unsigned n : {1U, 10U, 100U}) {
        const WitnessResult r = witness_ratio(Corner::OneOne, w, u, n);
        const double mn = witness_sequence(u, n).m_n;
        EXPECT_NEAR(r.coupling, mn, 1e-12);
        double want = 0.0;
        for_each_submask(r.subset, [&](Mask s) {
            if (w.in_support(s)) want += std::pow(mn, popcount(r.subset) - popcount(s)) * w.gamma(r.subset) / w.gamma(s);
        });
        EXPECT_NEAR(r.ratio, want, 1e-12 * want);
    }
}

TEST(WitnessProperty, POneCornersIncreaseTowardTheConstant) {
    std::mt19937_64 rng(45);
    const std::vector<Density> ds{Density::uniform(), Density::beta_like(Rational(1)), Density::beta_like(Rational(2)),
                                  Density::exp_type(2.0, 1.0)};
    for (const Density& d : ds) {
        for (const WeightFamily& w : {WeightFamily::finite_order(4, Rational(1), 2), WeightFamily::dimension_dependent(4),
                                      fixtures::random_monotone_explicit(5, rng, false)}) {
            for (Corner c : {Corner::OneOne, Corner::OneInf}) {
                double prev = 0.0;
                for (unsigned n : {1U, 3U, 10U, 30U, 100U, 1000U}) {
                    const WitnessResult r = witness_ratio(c, w, d, n);
                    EXPECT_GE(r.ratio, prev - 1e-12) << d.description() << " " << w.description();
                    EXPECT_LE(r.ratio, r.target * (1.0 + 1e-12)) << d.description() << " " << w.description();
                    prev = r.ratio;
                }
                if (d.family() == DensityFamily::Uniform) EXPECT_LT(witness_ratio(c, w, d, 1000).gap, 0.01 * prev);
            }
        }
    }
}

TEST(DecompIo, TensorJsonRoundTrip) {
    TensorFunction<double> f;
    f.dim = 3;
    f.side = Side::Anova;
    f.profile = UnivariateProfile::level_set(10);
    f.eta = {{Mask{0}, 0.25}, {Mask{5}, -1.5}};
    const TensorFunction<double> g = io::tensor_from_json(io::Json::parse(io::dump_canonical(io::tensor_to_json(f))));
    EXPECT_EQ(g.dim, f.dim);
    EXPECT_EQ(g.side, f.side);
    EXPECT_EQ(g.profile.kind, ProfileKind::WitnessLevelSet);
    EXPECT_EQ(g.profile.n, 10U);
    EXPECT_EQ(g.eta, f.eta);
    EXPECT_EQ(parse_side(side_name(Side::Anchored)), Side::Anchored);
    EXPECT_EQ(other(Side::Anova), Side::Anchored);
}
