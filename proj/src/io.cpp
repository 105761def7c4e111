// SPDX-License-Identifier: MIT
#include "normbridge/io.hpp"

#include "normbridge/errors.hpp"
#include "normbridge/norm_index.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace normbridge::io {

namespace {

std::string format_double(double x) {
    if (std::isnan(x)) return "\"nan\"";
    if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void dump_into(std::string& out, const Json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += inner + Json(it.key()).dump() + ": ";
                dump_into(out, it.value(), indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += inner;
                dump_into(out, j[i], indent + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case Json::value_t::number_float: out += format_double(j.get<double>()); return;
        default: out += j.dump(); return;
    }
}

/// Shortest %.{n}g text that reads back as x.
std::string shortest_decimal(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

Rational field(const Json& j, const char* key, const Rational& fallback) {
    return j.contains(key) ? rational_from_json(j.at(key)) : fallback;
}

unsigned unsigned_field(const Json& j, const char* key) {
    if (!j.contains(key)) throw DomainError(std::string("missing field '") + key + "'");
    const Json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw DomainError(std::string("field '") + key + "' must be a nonnegative integer");
    }
    return v.get<unsigned>();
}

Mask parse_mask_key(const std::string& key, unsigned d) {
    if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos) {
        throw DomainError("weight key '" + key + "' is not a decimal mask");
    }
    unsigned long long m = std::stoull(key);
    if (d < 64 && (m >> d) != 0) throw DomainError("mask " + key + " has bits above d = " + std::to_string(d));
    return m;
}

}  // namespace

std::string dump_canonical(const Json& j) {
    std::string out;
    dump_into(out, j, 0);
    out += "\n";
    return out;
}

Json exact_value(const Rational& x) { return to_string(x); }

Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(std::to_string(j.get<long long>()));
    if (j.is_number_float()) {
        const double x = j.get<double>();
        if (!std::isfinite(x)) throw DomainError("weights must be finite");
        return parse_rational(shortest_decimal(x));
    }
    throw DomainError("expected a number or a rational string, got " + j.dump());
}

WeightSpec weight_spec_from_json(const Json& j, unsigned& d) {
    if (!j.is_object()) throw DomainError("weight config must be a JSON object");
    if (!j.contains("kind")) throw DomainError("weight config needs a 'kind'");
    WeightSpec spec;
    spec.kind = parse_kind(j.at("kind").get<std::string>());
    switch (spec.kind) {
        case WeightKind::Product: {
            const std::string rule = j.value("rule", std::string("list"));
            if (rule == "list") {
                if (!j.contains("gammas") || !j.at("gammas").is_array()) {
                    throw DomainError("product weights need a 'gammas' array or a 'rule'");
                }
                for (const auto& g : j.at("gammas")) spec.gammas.push_back(rational_from_json(g));
                d = j.contains("d") ? unsigned_field(j, "d") : static_cast<unsigned>(spec.gammas.size());
                if (d != spec.gammas.size()) throw DomainError("'d' does not match the length of 'gammas'");
                return spec;
            }
            if (rule == "power") {
                spec.rule = ProductRule::Power;
                spec.scale = field(j, "scale", Rational(1));
                spec.exponent = field(j, "exponent", Rational(1));
            } else if (rule == "geometric") {
                spec.rule = ProductRule::Geometric;
                spec.ratio = field(j, "ratio", Rational(1, 2));
            } else {
                throw DomainError("unknown product rule '" + rule + "' (list, power, geometric)");
            }
            break;
        }
        case WeightKind::POD:
            spec.beta1 = field(j, "beta1", Rational(1));
            spec.beta2 = field(j, "beta2", Rational(2));
            spec.c = field(j, "c", Rational(1));
            break;
        case WeightKind::FiniteOrder:
        case WeightKind::FiniteDiameter:
            spec.omega = field(j, "omega", Rational(1));
            spec.r = unsigned_field(j, "r");
            break;
        case WeightKind::DimensionDependent: break;
        case WeightKind::Explicit: {
            if (!j.contains("weights") || !j.at("weights").is_object()) {
                throw DomainError("explicit weights need a 'weights' object keyed by decimal mask");
            }
            d = unsigned_field(j, "d");
            spec.table_dim = d;
            for (auto it = j.at("weights").begin(); it != j.at("weights").end(); ++it) {
                Rational v = rational_from_json(it.value());
                if (!is_zero(v)) spec.table[parse_mask_key(it.key(), d)] = v;
            }
            return spec;
        }
    }
    d = unsigned_field(j, "d");
    return spec;
}

WeightFamily weights_from_json(const Json& j) {
    unsigned d = 0;
    WeightSpec spec = weight_spec_from_json(j, d);
    return WeightFamily::instantiate(spec, d);
}

WeightFamily load_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open weights file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw DomainError("weights file " + path.string() + ": " + e.what());
    }
    return weights_from_json(j);
}

Json weights_to_json(const WeightFamily& w) {
    const WeightSpec& s = w.spec();
    Json j;
    j["kind"] = kind_name(s.kind);
    j["d"] = w.dim();
    switch (s.kind) {
        case WeightKind::Product:
            switch (s.rule) {
                case ProductRule::List: {
                    Json arr = Json::array();
                    for (const auto& g : s.gammas) arr.push_back(exact_value(g));
                    j["gammas"] = arr;
                    break;
                }
                case ProductRule::Power:
                    j["rule"] = "power";
                    j["scale"] = exact_value(s.scale);
                    j["exponent"] = exact_value(s.exponent);
                    break;
                case ProductRule::Geometric:
                    j["rule"] = "geometric";
                    j["ratio"] = exact_value(s.ratio);
                    break;
            }
            break;
        case WeightKind::POD:
            j["beta1"] = exact_value(s.beta1);
            j["beta2"] = exact_value(s.beta2);
            j["c"] = exact_value(s.c);
            break;
        case WeightKind::FiniteOrder:
        case WeightKind::FiniteDiameter:
            j["omega"] = exact_value(s.omega);
            j["r"] = s.r;
            break;
        case WeightKind::DimensionDependent: break;
        case WeightKind::Explicit: {
            Json table = Json::object();
            for (const auto& [mask, v] : s.table) table[std::to_string(mask)] = exact_value(v);
            j["weights"] = table;
            break;
        }
    }
    return j;
}

Json profile_to_json(const UnivariateProfile& g) {
    Json j;
    switch (g.kind) {
        case ProfileKind::Constant: j["kind"] = "constant"; break;
        case ProfileKind::WitnessLevelSet:
            j["kind"] = "level-set";
            j["n"] = g.n;
            break;
        case ProfileKind::WitnessDual:
            j["kind"] = "dual";
            j["p"] = g.p;
            break;
        case ProfileKind::Tabulated:
            j["kind"] = "tabulated";
            j["t"] = g.t;
            j["values"] = g.values;
            break;
    }
    return j;
}

UnivariateProfile profile_from_json(const Json& j) {
    const std::string kind = j.value("kind", std::string("constant"));
    if (kind == "constant") return UnivariateProfile::constant();
    if (kind == "level-set") return UnivariateProfile::level_set(unsigned_field(j, "n"));
    if (kind == "dual") {
        const Json& p = j.at("p");
        return UnivariateProfile::dual(p.is_string() ? parse_index(p.get<std::string>()) : p.get<double>());
    }
    if (kind == "tabulated") {
        return UnivariateProfile::tabulated(j.at("t").get<std::vector<double>>(),
                                            j.at("values").get<std::vector<double>>());
    }
    throw DomainError("unknown profile kind '" + kind + "'");
}

Json tensor_to_json(const TensorFunction<double>& f) {
    Json j;
    j["side"] = side_name(f.side);
    j["d"] = f.dim;
    j["profile"] = profile_to_json(f.profile);
    Json eta = Json::object();
    for (const auto& [mask, v] : f.eta) eta[std::to_string(mask)] = v;
    j["eta"] = eta;
    return j;
}

TensorFunction<double> tensor_from_json(const Json& j) {
    TensorFunction<double> f;
    f.side = parse_side(j.at("side").get<std::string>());
    f.dim = unsigned_field(j, "d");
    f.profile = profile_from_json(j.value("profile", Json::object()));
    for (auto it = j.at("eta").begin(); it != j.at("eta").end(); ++it) {
        double v = it.value().get<double>();
        if (v != 0.0) f.eta[parse_mask_key(it.key(), f.dim)] = v;
    }
    return f;
}

Json embedding_to_json(const EmbeddingConstants& e, bool exact_mode) {
    Json j;
    j["mode"] = exact_mode ? "exact" : "float";
    j["p"] = format_index(e.p);
    j["q"] = format_index(e.q);
    j["d"] = e.dim;
    if (exact_mode && e.exact_rational) {
        j["exact"] = exact_value(*e.exact_rational);
        j["lower"] = exact_value(*e.exact_rational);
        j["upper"] = exact_value(*e.exact_rational);
    } else {
        if (e.exact) j["exact"] = *e.exact;
        j["lower"] = e.lower;
        j["upper"] = e.upper;
    }
    if (e.witness) {
        j["witness_subset"] = SubsetIndex(*e.witness, e.dim).to_string();
        j["witness_mask"] = *e.witness;
    }
    j["method_notes"] = e.method_notes;
    return j;
}

void write_growth_csv(std::ostream& os, const GrowthReport& report) {
    auto num = [](double x) {
        if (std::isinf(x)) return std::string(x > 0 ? "inf" : "-inf");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    os << "d,lower,upper,exact\n";
    for (const auto& s : report.samples) {
        os << s.d << ',' << num(s.lower) << ',' << num(s.upper) << ',';
        if (s.exact) os << num(*s.exact);
        os << '\n';
    }
}

Json growth_to_json(const GrowthReport& report) {
    Json j;
    j["mode"] = "float";
    j["family"] = report.family_desc;
    j["p"] = format_index(report.p);
    j["q"] = format_index(report.q);
    j["classification"] = class_name(report.classification);
    j["tau_hat"] = report.tau_hat;
    j["cap"] = report.cap;
    j["series"] = report.series;
    j["fit"] = {{"slope", report.fit.slope},
                {"intercept", report.fit.intercept},
                {"residual", report.fit.residual},
                {"points", report.fit.points}};
    j["lower_fit"] = {{"slope", report.lower_fit.slope},
                      {"intercept", report.lower_fit.intercept},
                      {"residual", report.lower_fit.residual},
                      {"points", report.lower_fit.points}};
    Json d = Json::array();
    for (const auto& s : report.samples) d.push_back(s.d);
    j["d"] = d;
    j["notes"] = report.notes;
    return j;
}

}  // namespace normbridge::io
