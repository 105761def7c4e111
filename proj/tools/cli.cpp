// SPDX-License-Identifier: MIT
#include "cli.hpp"

#include "normbridge/bounds.hpp"
#include "normbridge/constants.hpp"
#include "normbridge/decomp.hpp"
#include "normbridge/density.hpp"
#include "normbridge/errors.hpp"
#include "normbridge/growth.hpp"
#include "normbridge/io.hpp"
#include "normbridge/oracle.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace normbridge::cli {

namespace {

using io::Json;

struct DensityArgs {
    std::string family = "uniform";
    std::string alpha = "0";
    double a = 1.0;
    double b = 1.0;
    bool open = false;
    std::string csv;

    void attach(CLI::App* app, const std::string& flag) {
        app->add_option(flag, family, "uniform | beta | pareto | exp | tabulated")->capture_default_str();
        app->add_option("--alpha", alpha, "shape parameter of beta / pareto (rational text)")->capture_default_str();
        app->add_option("--a", a, "exp-type exponent a")->capture_default_str();
        app->add_option("--b", b, "exp-type rate b")->capture_default_str();
        app->add_flag("--open", open, "beta-like on [0,1) instead of [0,1]");
        app->add_option("--csv", csv, "two-column CSV (t,psi) for --" + flag.substr(2) + " tabulated");
    }

    [[nodiscard]] Density build() const {
        if (family == "uniform") return Density::uniform();
        if (family == "beta") return Density::beta_like(parse_rational(alpha), open ? EndPoint::Open : EndPoint::Closed);
        if (family == "pareto") return Density::pareto_like(parse_rational(alpha));
        if (family == "exp") return Density::exp_type(a, b);
        if (family == "tabulated") {
            if (csv.empty()) throw DomainError("tabulated density needs --csv");
            return Density::from_csv(csv);
        }
        throw DomainError("unknown density family '" + family + "'");
    }
};

double index_of(const std::string& text) { return parse_index(text); }

Json number_or_exact(double x, const std::optional<Rational>& exact, bool exact_mode) {
    if (exact_mode && exact) return io::exact_value(*exact);
    return x;
}

// --------------------------------------------------------------------------

int cmd_density(const DensityArgs& da, const std::string& p_text, std::ostream& out) {
    const Density density = da.build();
    const double p = index_of(p_text);
    const DensityMetrics mt = density.metrics({p});
    const ConditionReport cr = density.check_conditions(p);
    Json j;
    j["mode"] = "float";
    j["density"] = density.description();
    j["p"] = format_index(p);
    j["m"] = mt.m;
    j["kappa"] = mt.kappa;
    j["B_p"] = mt.b_at(p);
    j["eq1"] = cr.eq1_holds;
    j["eq2"] = cr.eq2_holds;
    j["reason"] = cr.reason;
    if (mt.exact_m) j["m_exact"] = io::exact_value(*mt.exact_m);
    if (mt.exact_kappa) j["kappa_exact"] = io::exact_value(*mt.exact_kappa);
    out << io::dump_canonical(j);
    return 0;
}

struct ConstantsArgs {
    std::string weights_file;
    std::string p = "1";
    std::string q = "1";
    bool verify = false;
    std::string mode = "auto";
    std::uint64_t seed = 1;
    std::size_t trials = 2000;
};

int cmd_constants(const ConstantsArgs& ca, const DensityArgs& da, std::ostream& out) {
    const WeightFamily w = io::load_weights(ca.weights_file);
    const Density density = da.build();
    const NormIndexPair pq{index_of(ca.p), index_of(ca.q)};
    if (ca.mode != "auto" && ca.mode != "float" && ca.mode != "exact") {
        throw DomainError("--mode must be auto, float or exact");
    }
    std::vector<double> ps;
    if (!pq.is_corner()) ps.push_back(pq.p);
    const DensityMetrics mt = density.metrics(ps);
    LowerOptions lo;
    lo.seed = ca.seed;
    const EmbeddingConstants e = embedding_norm(w, mt, pq, lo);
    bool exact_mode = e.exact_rational.has_value() && ca.mode != "float";
    if (ca.mode == "exact" && !exact_mode) {
        throw DomainError("exact mode needs a corner (p, q), rational weights and a density with rational m and kappa");
    }
    Json j = io::embedding_to_json(e, exact_mode);
    j["weights"] = w.description();
    j["density"] = density.description();

    if (ca.verify) {
        Json v;
        if (pq.is_corner() && w.dim() <= kMaxBruteForceDim) {
            if (exact_mode) {
                Rational bf = oracle::bruteforce_corner<Rational>(w, *mt.exact_m, *mt.exact_kappa, pq.p, pq.q);
                v["bruteforce"] = io::exact_value(bf);
                v["bruteforce_agrees"] = bf == *e.exact_rational;
            } else {
                double bf = oracle::bruteforce_corner<double>(w, mt.m, mt.kappa, pq.p, pq.q);
                v["bruteforce"] = bf;
                v["bruteforce_agrees"] = std::fabs(bf - *e.exact) <= 1e-12 * std::max(1.0, std::fabs(bf));
            }
        }
        if (density.family() != DensityFamily::Tabulated) {
            auto qm = oracle::quad_metric(density, oracle::Metric::M);
            auto qk = oracle::quad_metric(density, oracle::Metric::Kappa);
            v["quadrature_m"] = qm.value;
            v["quadrature_kappa"] = qk.value;
        }
        if (w.dim() <= 10 && std::isfinite(e.upper)) {
            auto scan = oracle::ratio_scan(w, density, pq, ca.trials, ca.seed);
            v["ratio_scan_best"] = scan.best;
            v["ratio_scan_trials"] = scan.trials;
            v["ratio_scan_seed"] = scan.seed;
            v["ratio_scan_witness"] = scan.best_description;
            v["ratio_scan_within_upper"] = scan.best <= e.upper * (1.0 + 1e-9);
        }
        j["verify"] = v;
    }
    out << io::dump_canonical(j);
    return 0;
}

struct GrowthArgs {
    std::string family = "finite-order";
    unsigned r = 1;
    std::string omega = "1";
    std::string beta1 = "1";
    std::string beta2 = "2";
    std::string c = "1";
    std::string gamma_rule = "power";
    std::string gamma_param = "2";
    std::string gamma_scale = "1";
    std::string p = "inf";
    std::string q = "inf";
    unsigned d_min = 1;
    unsigned d_max = 1024;
    unsigned points = 24;
    std::string out;
};

WeightSpec growth_spec(const GrowthArgs& ga) {
    WeightSpec spec;
    spec.kind = parse_kind(ga.family);
    switch (spec.kind) {
        case WeightKind::Product:
            if (ga.gamma_rule == "power") {
                spec.rule = ProductRule::Power;
                spec.scale = parse_rational(ga.gamma_scale);
                spec.exponent = parse_rational(ga.gamma_param);
            } else if (ga.gamma_rule == "geometric") {
                spec.rule = ProductRule::Geometric;
                spec.ratio = parse_rational(ga.gamma_param);
            } else {
                throw DomainError("--gamma-rule must be power or geometric for a growth sweep");
            }
            break;
        case WeightKind::POD:
            spec.beta1 = parse_rational(ga.beta1);
            spec.beta2 = parse_rational(ga.beta2);
            spec.c = parse_rational(ga.c);
            break;
        case WeightKind::FiniteOrder:
        case WeightKind::FiniteDiameter:
            spec.omega = parse_rational(ga.omega);
            spec.r = ga.r;
            break;
        case WeightKind::DimensionDependent: break;
        case WeightKind::Explicit: throw DomainError("growth sweeps need a structured family, not explicit weights");
    }
    return spec;
}

int cmd_growth(const GrowthArgs& ga, const DensityArgs& da, std::ostream& out) {
    const WeightSpec spec = growth_spec(ga);
    const Density density = da.build();
    const NormIndexPair pq{index_of(ga.p), index_of(ga.q)};
    std::vector<double> ps;
    if (!pq.is_corner()) ps.push_back(pq.p);
    const DensityMetrics mt = density.metrics(ps);
    const SweepMetrics sm{mt.m, mt.kappa, mt.b_at(pq.p)};
    const std::vector<unsigned> d_list = geometric_d_list(ga.d_min, ga.d_max, ga.points);
    const GrowthReport report = sweep(spec, sm, pq, d_list);

    Json j = io::growth_to_json(report);
    j["density"] = density.description();
    Json samples = Json::array();
    for (const auto& s : report.samples) {
        Json row{{"d", s.d}, {"lower", s.lower}, {"upper", s.upper}};
        if (s.exact) row["exact"] = *s.exact;
        samples.push_back(row);
    }
    j["samples"] = samples;
    if ((spec.kind == WeightKind::FiniteOrder || spec.kind == WeightKind::FiniteDiameter) && std::isfinite(sm.b_p)) {
        ExponentCheck ec = exponent_check(spec, pq.q, sm.b_p, d_list);
        j["indicator_tau_hat"] = ec.tau_hat;
        j["tau_theory"] = ec.tau_theory;
    }
    if (!ga.out.empty()) {
        std::ofstream f(ga.out);
        if (!f) throw DomainError("cannot write " + ga.out);
        io::write_growth_csv(f, report);
        j["csv"] = ga.out;
    }
    out << io::dump_canonical(j);
    return 0;
}

struct WitnessArgs {
    std::string corner;
    std::string n_list = "1,10,100,1000";
    std::string weights_file;
};

std::vector<unsigned> parse_n_list(const std::string& text) {
    std::vector<unsigned> ns;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos || item.size() > 9) {
            throw DomainError("--n expects a comma-separated list of positive integers");
        }
        unsigned n = static_cast<unsigned>(std::stoul(item));
        if (n == 0) throw DomainError("--n values must be positive");
        ns.push_back(n);
    }
    if (ns.empty()) throw DomainError("--n is empty");
    return ns;
}

int cmd_witness(const WitnessArgs& wa, const DensityArgs& da, std::ostream& out) {
    const Corner corner = parse_corner(wa.corner);
    const std::vector<unsigned> ns = parse_n_list(wa.n_list);
    const WeightFamily w = io::load_weights(wa.weights_file);
    const Density density = da.build();
    Json rows = Json::array();
    for (unsigned n : ns) {
        WitnessResult r = witness_ratio(corner, w, density, n);
        rows.push_back({{"n", n},
                        {"ratio", r.ratio},
                        {"target", r.target},
                        {"gap", r.gap},
                        {"coupling", r.coupling},
                        {"subset", SubsetIndex(r.subset, w.dim()).to_string()}});
    }
    Json j;
    j["mode"] = "float";
    j["case"] = corner_name(corner);
    j["weights"] = w.description();
    j["density"] = density.description();
    j["rows"] = rows;
    out << io::dump_canonical(j);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"normbridge: anchored / ANOVA norm equivalence constants"};
    app.require_subcommand(1);

    DensityArgs density_args;
    std::string density_p = "2";
    CLI::App* density = app.add_subcommand("density", "m, kappa, B_p and the integrability conditions");
    density_args.attach(density, "--family");
    density->add_option("--p", density_p, "index p in [1, inf]")->capture_default_str();

    ConstantsArgs ca;
    DensityArgs constants_density;
    CLI::App* constants = app.add_subcommand("constants", "embedding constant for (p, q)");
    constants->add_option("--weights-file", ca.weights_file, "weight family JSON")->required();
    constants_density.attach(constants, "--density");
    constants->add_option("--p", ca.p)->capture_default_str();
    constants->add_option("--q", ca.q)->capture_default_str();
    constants->add_flag("--verify", ca.verify, "cross-check with the brute-force and quadrature oracles");
    constants->add_option("--mode", ca.mode, "auto | float | exact")->capture_default_str();
    constants->add_option("--seed", ca.seed)->capture_default_str();
    constants->add_option("--trials", ca.trials, "ratio scan trials for --verify")->capture_default_str();

    GrowthArgs ga;
    DensityArgs growth_density;
    CLI::App* growth = app.add_subcommand("growth", "sweep d and classify the growth of the constants");
    growth->add_option("--family", ga.family, "product | pod | finite-order | finite-diameter | dimension-dependent")
        ->capture_default_str();
    growth->add_option("--r", ga.r)->capture_default_str();
    growth->add_option("--omega", ga.omega)->capture_default_str();
    growth->add_option("--beta1", ga.beta1)->capture_default_str();
    growth->add_option("--beta2", ga.beta2)->capture_default_str();
    growth->add_option("--c", ga.c)->capture_default_str();
    growth->add_option("--gamma-rule", ga.gamma_rule, "power: scale*j^-param, geometric: param^j")
        ->capture_default_str();
    growth->add_option("--gamma-param", ga.gamma_param)->capture_default_str();
    growth->add_option("--gamma-scale", ga.gamma_scale)->capture_default_str();
    growth_density.attach(growth, "--density");
    growth->add_option("--p", ga.p)->capture_default_str();
    growth->add_option("--q", ga.q)->capture_default_str();
    growth->add_option("--d-min", ga.d_min)->capture_default_str();
    growth->add_option("--d-max", ga.d_max)->capture_default_str();
    growth->add_option("--points", ga.points)->capture_default_str();
    growth->add_option("--out", ga.out, "CSV path for the d,lower,upper,exact series");

    WitnessArgs wa;
    DensityArgs witness_density;
    CLI::App* witness = app.add_subcommand("witness", "corner witness ratios along n");
    witness->add_option("--case", wa.corner, "11 | 1inf | inf1 | infinf (∞ also accepted)")->required();
    witness->add_option("--n", wa.n_list)->capture_default_str();
    witness->add_option("--weights-file", wa.weights_file, "weight family JSON")->required();
    witness_density.attach(witness, "--density");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o;
        std::ostringstream e2;
        int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? 0 : 2;
    }

    try {
        if (*density) return cmd_density(density_args, density_p, out);
        if (*constants) return cmd_constants(ca, constants_density, out);
        if (*growth) return cmd_growth(ga, growth_density, out);
        if (*witness) return cmd_witness(wa, witness_density, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return 3;
    } catch (const CapacityError& e) {
        err << "capacity: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace normbridge::cli
