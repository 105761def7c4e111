// SPDX-License-Identifier: MIT
#include "cli.hpp"

#include "normbridge/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using normbridge::io::Json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
    [[nodiscard]] Json json() const { return Json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "normbridge");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = normbridge::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("normbridge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const {
        const auto path = dir_ / name;
        std::ofstream(path) << text;
        return path.string();
    }

    std::filesystem::path dir_;
};

double number(const Json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return INFINITY;
        return normbridge::parse_rational(s).get_d();
    }
    return j.get<double>();
}

}  // namespace

TEST_F(CliTest, DensityUniform) {
    const Outcome o = run({"density", "--family", "uniform", "--p", "1"});
    ASSERT_EQ(o.code, 0) << o.err;
    const Json j = o.json();
    EXPECT_DOUBLE_EQ(j.at("m").get<double>(), 0.5);
    EXPECT_DOUBLE_EQ(j.at("kappa").get<double>(), 1.0);
    EXPECT_TRUE(j.at("eq2").get<bool>());
    EXPECT_TRUE(j.at("eq1").get<bool>());
    EXPECT_TRUE(j.contains("B_p"));
    EXPECT_TRUE(j.contains("reason"));
}

TEST_F(CliTest, DensityConditionFailures) {
    EXPECT_FALSE(run({"density", "--family", "pareto", "--alpha", "3", "--p", "1.5"}).json().at("eq2").get<bool>());
    EXPECT_FALSE(run({"density", "--family", "exp", "--a", "0.5", "--b", "1", "--p", "1"}).json().at("eq2").get<bool>());
    const Json beta = run({"density", "--family", "beta", "--alpha", "0.5", "--p", "2"}).json();
    EXPECT_TRUE(beta.at("eq2").get<bool>());
    EXPECT_EQ(beta.at("m_exact"), "2/5");
}

TEST_F(CliTest, DensityTabulatedCsv) {
    const std::string csv = write("psi.csv", "t,psi\n0,2\n1,0\n");
    const Outcome o = run({"density", "--family", "tabulated", "--csv", csv, "--p", "3"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_NEAR(o.json().at("m").get<double>(), 1.0 / 3.0, 1e-12);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"density", "--family", "beta", "--alpha", "-3"}).code, 2);
    EXPECT_EQ(run({"density", "--family", "nope"}).code, 2);
    EXPECT_EQ(run({"density", "--p", "0.5"}).code, 2);
    EXPECT_EQ(run({"constants"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, ConstantsFiniteOrderExact) {
    const std::string w = write("fo.json", R"({"kind":"finite-order","d":4,"omega":1,"r":1})");
    const Outcome o = run({"constants", "--weights-file", w, "--density", "uniform", "--p", "1", "--q", "1"});
    ASSERT_EQ(o.code, 0) << o.err;
    const Json j = o.json();
    EXPECT_EQ(j.at("mode"), "exact");
    EXPECT_EQ(j.at("exact"), "2");
    EXPECT_DOUBLE_EQ(number(j.at("lower")), 2.0);
    EXPECT_DOUBLE_EQ(number(j.at("upper")), 2.0);
}

TEST_F(CliTest, ConstantsProductWithVerify) {
    const std::string w = write("prod.json", R"({"kind":"product","d":2,"gammas":["1/2","1/8"]})");
    const Outcome o = run({"constants", "--weights-file", w, "--density", "uniform", "--p", "inf", "--q", "inf",
                           "--verify", "--trials", "200"});
    ASSERT_EQ(o.code, 0) << o.err;
    const Json j = o.json();
    EXPECT_EQ(j.at("exact"), "85/64");
    const Json& v = j.at("verify");
    EXPECT_EQ(v.at("bruteforce"), "85/64");
    EXPECT_TRUE(v.at("bruteforce_agrees").get<bool>());
    EXPECT_TRUE(v.at("ratio_scan_within_upper").get<bool>());
    EXPECT_NEAR(v.at("quadrature_m").get<double>(), 0.5, 1e-10);

    const Outcome f = run({"constants", "--weights-file", w, "--p", "inf", "--q", "inf", "--mode", "float"});
    EXPECT_EQ(f.json().at("mode"), "float");
    EXPECT_DOUBLE_EQ(f.json().at("exact").get<double>(), 1.328125);
}

TEST_F(CliTest, ConstantsInverseSquareProduct) {
    const std::string w = write("inv.json", R"({"kind":"product","d":2,"rule":"power","scale":1,"exponent":2})");
    const Outcome o = run({"constants", "--weights-file", w, "--p", "inf", "--q", "inf"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.json().at("exact"), "27/16");
}

TEST_F(CliTest, ConstantsOffCornerBounds) {
    const std::string w = write("geo.json", R"({"kind":"product","d":8,"rule":"geometric","ratio":"1/2"})");
    const Outcome o = run({"constants", "--weights-file", w, "--p", "2", "--q", "2"});
    ASSERT_EQ(o.code, 0) << o.err;
    const Json j = o.json();
    EXPECT_EQ(j.at("mode"), "float");
    EXPECT_LE(j.at("lower").get<double>(), j.at("upper").get<double>());
    EXPECT_FALSE(j.contains("exact") && !j.at("exact").is_null());
    EXPECT_FALSE(j.at("method_notes").get<std::string>().empty());
}

TEST_F(CliTest, InfeasibleModelsExitThree) {
    const std::string bad = write("bad.json", R"({"kind":"explicit","d":2,"weights":{"0":1,"3":"1/2"}})");
    const Outcome o = run({"constants", "--weights-file", bad, "--p", "1", "--q", "1"});
    EXPECT_EQ(o.code, 3);
    EXPECT_NE(o.err.find("monotonicity"), std::string::npos);
    const std::string fo = write("fo.json", R"({"kind":"finite-order","d":3,"omega":1,"r":1})");
    EXPECT_EQ(run({"constants", "--weights-file", fo, "--density", "pareto", "--alpha", "3", "--p", "1", "--q", "1"}).code,
              3);
}

TEST_F(CliTest, CapacityErrorsExitFour) {
    const std::string big = write("big.json", R"({"kind":"explicit","d":40,"weights":{"0":1,"1":1}})");
    EXPECT_EQ(run({"constants", "--weights-file", big, "--p", "1", "--q", "1"}).code, 4);
    const std::string w = write("fo.json", R"({"kind":"finite-order","d":20,"omega":1,"r":1})");
    EXPECT_EQ(run({"witness", "--case", "11", "--weights-file", w}).code, 4);
}

TEST_F(CliTest, GrowthDimensionDependent) {
    const Outcome o = run({"growth", "--family", "dimension-dependent", "--p", "1", "--q", "1", "--d-max", "10000"});
    ASSERT_EQ(o.code, 0) << o.err;
    const Json j = o.json();
    EXPECT_EQ(j.at("classification"), "uniform");
    EXPECT_LE(j.at("cap").get<double>(), 2.7182819);
}

TEST_F(CliTest, GrowthFiniteDiameterExponent) {
    const Outcome o = run({"growth", "--family", "finite-diameter", "--r", "1", "--p", "1", "--q", "inf",
                           "--d-min", "64", "--d-max", "4096", "--points", "12"});
    ASSERT_EQ(o.code, 0) << o.err;
    const double tau = o.json().at("tau_hat").get<double>();
    EXPECT_GE(tau, 0.9);
    EXPECT_LE(tau, 1.1);
}

TEST_F(CliTest, GrowthGeometricProductAndCsv) {
    const std::string csv = (dir_ / "series.csv").string();
    const Outcome o = run({"growth", "--family", "product", "--gamma-rule", "geometric", "--gamma-param", "1/2", "--p",
                           "1", "--q", "1", "--out", csv});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.json().at("classification"), "uniform");
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "d,lower,upper,exact");
    std::string row;
    ASSERT_TRUE(static_cast<bool>(std::getline(in, row)));
    EXPECT_EQ(row.rfind("1,", 0), 0U);
}

TEST_F(CliTest, GrowthFiniteOrderSeries) {
    const Outcome o = run({"growth", "--family", "finite-order", "--r", "2", "--omega", "1", "--q", "2", "--p", "2",
                           "--d-min", "64", "--d-max", "4096", "--points", "12"});
    ASSERT_EQ(o.code, 0) << o.err;
    const Json j = o.json();
    EXPECT_EQ(j.at("classification"), "polynomial");
    EXPECT_NEAR(j.at("tau_theory").get<double>(), 1.0, 1e-15);
    EXPECT_NEAR(j.at("indicator_tau_hat").get<double>(), 1.0, 0.1);
}

TEST_F(CliTest, WitnessCases) {
    const std::string w = write("w.json", R"({"kind":"finite-order","d":4,"omega":1,"r":2})");
    const Json inf = run({"witness", "--case", "∞∞", "--weights-file", w, "--density", "uniform"}).json();
    ASSERT_EQ(inf.at("rows").size(), 4U);
    for (const Json& row : inf.at("rows")) EXPECT_NEAR(row.at("gap").get<double>(), 0.0, 1e-12);

    const Json one = run({"witness", "--case", "11", "--n", "1,10,100,1000", "--weights-file", w}).json();
    const Json& last = one.at("rows").back();
    EXPECT_EQ(last.at("n"), 1000);
    EXPECT_LT(last.at("gap").get<double>(), 0.01 * last.at("target").get<double>());

    const Json mixed = run({"witness", "--case", "1∞", "--weights-file", w}).json();
    double prev = INFINITY;
    for (const Json& row : mixed.at("rows")) {
        const double gap = row.at("gap").get<double>();
        EXPECT_LE(gap, prev);
        prev = gap;
    }
    EXPECT_EQ(run({"witness", "--case", "22", "--weights-file", w}).code, 2);
    EXPECT_EQ(run({"witness", "--case", "11", "--n", "0", "--weights-file", w}).code, 2);
}

TEST_F(CliTest, OutputIsByteIdentical) {
    const std::string w = write("w.json", R"({"kind":"pod","d":5,"beta1":1,"beta2":2,"c":"1/2"})");
    const std::vector<std::vector<std::string>> calls{
        {"density", "--family", "exp", "--a", "2", "--b", "1", "--p", "3"},
        {"constants", "--weights-file", w, "--p", "4/3", "--q", "2", "--verify", "--trials", "300", "--seed", "9"},
        {"growth", "--family", "pod", "--p", "1", "--q", "inf", "--d-max", "64"},
        {"witness", "--case", "1inf", "--weights-file", w, "--density", "beta", "--alpha", "2"}};
    for (const auto& args : calls) {
        const Outcome a = run(args);
        const Outcome b = run(args);
        ASSERT_EQ(a.code, 0) << a.err;
        EXPECT_EQ(a.out, b.out);
        EXPECT_EQ(a.out, normbridge::io::dump_canonical(Json::parse(a.out)));
        EXPECT_EQ(a.out.back(), '\n');
    }
}

TEST(CanonicalJson, Formatting) {
    Json j;
    j["b"] = 0.1;
    j["a"] = INFINITY;
    j["c"] = normbridge::io::exact_value(normbridge::Rational(6, 4));
    EXPECT_EQ(normbridge::io::dump_canonical(j),
              "{\n  \"a\": \"inf\",\n  \"b\": 0.10000000000000001,\n  \"c\": \"3/2\"\n}\n");
    EXPECT_EQ(normbridge::io::rational_from_json(Json(0.1)), normbridge::Rational(1, 10));
    EXPECT_EQ(normbridge::io::rational_from_json(Json("2/6")), normbridge::Rational(1, 3));
    EXPECT_EQ(normbridge::io::rational_from_json(Json(7)), normbridge::Rational(7));
}
