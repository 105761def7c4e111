// SPDX-License-Identifier: MIT
#include "normbridge/density.hpp"

#include "normbridge/errors.hpp"
#include "normbridge/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace normbridge {

namespace {

constexpr double kTinyPdf = 1e-300;
constexpr unsigned kScanPoints = 1024;

std::string fmt(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

/// Outcome of a dyadic-shell test near one anchor.
struct ShellVerdict {
    bool finite;
    double ratio;  // growth ratio of the last shells (NaN when undecided)
};

ShellVerdict decide_integral(const std::vector<double>& shells, double cutoff) {
    for (double j : shells) {
        if (!std::isfinite(j)) return {false, kInf};
    }
    std::vector<double> ratios;
    for (std::size_t k = 1; k < shells.size(); ++k) {
        if (shells[k - 1] > 0.0 && shells[k] > 0.0) ratios.push_back(shells[k] / shells[k - 1]);
    }
    if (ratios.empty()) return {true, 0.0};
    std::size_t take = std::min<std::size_t>(3, ratios.size());
    std::vector<double> tail(ratios.end() - static_cast<std::ptrdiff_t>(take), ratios.end());
    std::sort(tail.begin(), tail.end());
    double rho = tail[tail.size() / 2];
    return {rho < cutoff, rho};
}

ShellVerdict decide_sup(const std::vector<double>& shells, double cutoff) {
    for (double s : shells) {
        if (!std::isfinite(s)) return {false, kInf};
    }
    std::vector<double> ratios;
    for (std::size_t k = 1; k < shells.size(); ++k) {
        if (shells[k - 1] > 0.0) ratios.push_back(shells[k] / shells[k - 1]);
    }
    if (ratios.size() < 3) return {true, ratios.empty() ? 0.0 : ratios.back()};
    const double grow = 2.0 - cutoff;  // 1 + slack
    bool growing = true;
    for (std::size_t k = ratios.size() - 3; k < ratios.size(); ++k) {
        growing = growing && ratios[k] > grow;
    }
    return {!growing, ratios.back()};
}

enum class Probe { InversePdf, HazardWeighted };

}  // namespace

// ---------------------------------------------------------------------------
// construction

Density Density::uniform() {
    Density d;
    d.family_ = DensityFamily::Uniform;
    d.end_ = 1.0;
    d.closed_ = true;
    d.alpha_ = 0;
    d.kappa_ = 1.0;
    d.kappa_at_ = 0.0;
    return d;
}

Density Density::beta_like(const Rational& alpha, EndPoint end) {
    if (!(alpha > -1)) throw DomainError("beta-like density requires alpha > -1");
    Density d;
    d.family_ = DensityFamily::BetaLike;
    d.end_ = 1.0;
    d.closed_ = end == EndPoint::Closed;
    d.alpha_ = alpha;
    d.alpha_.canonicalize();
    d.alpha_d_ = d.alpha_.get_d();
    d.kappa_ = 1.0 / (alpha.get_d() + 1.0);
    d.kappa_at_ = 0.0;
    return d;
}

Density Density::pareto_like(const Rational& alpha) {
    if (!(alpha > 1)) throw DomainError("pareto-like density requires alpha > 1");
    Density d;
    d.family_ = DensityFamily::ParetoLike;
    d.end_ = kInf;
    d.closed_ = false;
    d.alpha_ = alpha;
    d.alpha_.canonicalize();
    d.alpha_d_ = d.alpha_.get_d();
    d.kappa_ = kInf;
    d.kappa_at_ = kInf;
    return d;
}

Density Density::exp_type(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("exp-type density requires a > 0 and b > 0");
    }
    Density d;
    d.family_ = DensityFamily::ExpType;
    d.end_ = kInf;
    d.closed_ = false;
    d.a_ = a;
    d.b_ = b;
    d.norm_c_ = a * std::pow(b, 1.0 / a) / boost::math::tgamma(1.0 / a);
    if (a < 1.0) {
        d.kappa_ = kInf;
        d.kappa_at_ = kInf;
    } else {
        auto [at, value] = d.ratio_sup();
        d.kappa_ = value;
        d.kappa_at_ = at;
    }
    return d;
}

Density Density::tabulated(std::vector<double> t, std::vector<double> psi) {
    if (t.size() != psi.size() || t.size() < 2) {
        throw DomainError("tabulated density needs at least two (t, psi) rows");
    }
    if (t.front() != 0.0) throw DomainError("tabulated density must start at t = 0");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(psi[i]) || psi[i] < 0.0) {
            throw DomainError("tabulated density values must be finite and non-negative");
        }
        if (i > 0 && !(t[i] > t[i - 1])) throw DomainError("tabulated t must be strictly increasing");
        if (i > 0 && psi[i] <= kTinyPdf && psi[i - 1] <= kTinyPdf) {
            throw DomainError("tabulated density vanishes on an interval of positive length");
        }
    }
    Density d;
    d.family_ = DensityFamily::Tabulated;
    d.end_ = t.back();
    d.closed_ = true;
    d.tail_.assign(t.size(), 0.0);
    for (std::size_t i = t.size() - 1; i-- > 0;) {
        d.tail_[i] = d.tail_[i + 1] + 0.5 * (t[i + 1] - t[i]) * (psi[i] + psi[i + 1]);
    }
    if (std::fabs(d.tail_.front() - 1.0) > 1e-6) {
        throw DomainError("tabulated density integrates to " + fmt(d.tail_.front()) +
                          ", expected 1");
    }
    d.t_ = std::move(t);
    d.psi_ = std::move(psi);
    auto [at, value] = d.ratio_sup();
    d.kappa_ = value;
    d.kappa_at_ = at;
    return d;
}

Density Density::from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open density file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DomainError("density file is empty: " + path.string());
    std::vector<double> t;
    std::vector<double> psi;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DomainError("density CSV row " + std::to_string(row) + " needs two columns");
        }
        try {
            t.push_back(std::stod(line.substr(0, comma)));
            psi.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DomainError("density CSV row " + std::to_string(row) + " is not numeric");
        }
    }
    return tabulated(std::move(t), std::move(psi));
}

// ---------------------------------------------------------------------------
// pointwise

bool Density::contains(double t) const noexcept {
    if (!(t >= 0.0)) return false;
    return closed_ ? t <= end_ : t < end_;
}

std::string Density::description() const {
    switch (family_) {
        case DensityFamily::Uniform: return "uniform";
        case DensityFamily::BetaLike:
            return "beta(alpha=" + to_string(alpha_) + (closed_ ? ", [0,1])" : ", [0,1))");
        case DensityFamily::ParetoLike: return "pareto(alpha=" + to_string(alpha_) + ")";
        case DensityFamily::ExpType: return "exp(a=" + fmt(a_) + ", b=" + fmt(b_) + ")";
        case DensityFamily::Tabulated:
            return "tabulated(" + std::to_string(t_.size()) + " knots, T=" + fmt(end_) + ")";
    }
    return "unknown";
}

std::size_t Density::segment_of(double t) const {
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - t_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, t_.size() - 2);
}

double Density::pdf(double t) const {
    if (!contains(t)) throw DomainError("t = " + fmt(t) + " outside the density's domain");
    const double alpha = alpha_d_;
    switch (family_) {
        case DensityFamily::Uniform: return 1.0;
        case DensityFamily::BetaLike: {
            double s = 1.0 - t;
            if (s == 0.0) return alpha > 0.0 ? 0.0 : (alpha == 0.0 ? 1.0 : kInf);
            return (alpha + 1.0) * std::pow(s, alpha);
        }
        case DensityFamily::ParetoLike: return (alpha - 1.0) * std::pow(1.0 + t, -alpha);
        case DensityFamily::ExpType: return norm_c_ * std::exp(-b_ * std::pow(t, a_));
        case DensityFamily::Tabulated: {
            std::size_t i = segment_of(t);
            double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
            return psi_[i] + w * (psi_[i + 1] - psi_[i]);
        }
    }
    return 0.0;
}

double Density::survival(double t) const {
    if (!contains(t)) throw DomainError("t = " + fmt(t) + " outside the density's domain");
    const double alpha = alpha_d_;
    switch (family_) {
        case DensityFamily::Uniform: return 1.0 - t;
        case DensityFamily::BetaLike: return std::pow(1.0 - t, alpha + 1.0);
        case DensityFamily::ParetoLike: return std::pow(1.0 + t, 1.0 - alpha);
        case DensityFamily::ExpType: {
            if (t == 0.0) return 1.0;
            return boost::math::gamma_q(1.0 / a_, b_ * std::pow(t, a_));
        }
        case DensityFamily::Tabulated: {
            std::size_t i = segment_of(t);
            double right = t_[i + 1];
            return tail_[i + 1] + 0.5 * (right - t) * (pdf(t) + psi_[i + 1]);
        }
    }
    return 0.0;
}

double Density::hazard_ratio(double t) const {
    if (std::isfinite(end_) && t == end_) return 0.0;  // survival vanishes at a finite end, open or closed
    double bar = survival(t);
    if (bar <= 0.0) return 0.0;
    double p = pdf(t);
    if (p < kTinyPdf) return kInf;
    return bar / p;
}

double Density::pdf_near(double x0, int side, double s) const {
    const double alpha = alpha_d_;
    if (std::isfinite(end_) && x0 == end_ && side < 0) {
        switch (family_) {
            case DensityFamily::Uniform: return 1.0;
            case DensityFamily::BetaLike: return (alpha + 1.0) * std::pow(s, alpha);
            default: break;
        }
    }
    if (family_ == DensityFamily::Tabulated) {
        auto it = std::lower_bound(t_.begin(), t_.end(), x0);
        if (it != t_.end() && *it == x0) {
            std::size_t i = static_cast<std::size_t>(it - t_.begin());
            std::size_t j = side < 0 ? i - 1 : i + 1;
            double h = std::fabs(t_[j] - t_[i]);
            return psi_[i] + (psi_[j] - psi_[i]) * (s / h);
        }
    }
    return pdf(x0 + side * s);
}

double Density::survival_near(double x0, int side, double s) const {
    const double alpha = alpha_d_;
    if (std::isfinite(end_) && x0 == end_ && side < 0) {
        switch (family_) {
            case DensityFamily::Uniform: return s;
            case DensityFamily::BetaLike: return std::pow(s, alpha + 1.0);
            default: break;
        }
    }
    if (family_ == DensityFamily::Tabulated) {
        auto it = std::lower_bound(t_.begin(), t_.end(), x0);
        if (it != t_.end() && *it == x0) {
            std::size_t i = static_cast<std::size_t>(it - t_.begin());
            double near = pdf_near(x0, side, s);
            double strip = 0.5 * s * (near + psi_[i]);
            return side < 0 ? tail_[i] + strip : tail_[i] - strip;
        }
    }
    return survival(x0 + side * s);
}

// ---------------------------------------------------------------------------
// scalar metrics

double Density::mean_m(const QuadratureOptions& opt) const {
    const double alpha = alpha_d_;
    switch (family_) {
        case DensityFamily::Uniform: return 0.5;
        case DensityFamily::BetaLike: return 1.0 / (alpha + 2.0);
        case DensityFamily::ParetoLike: return alpha > 2.0 ? 1.0 / (alpha - 2.0) : kInf;
        case DensityFamily::ExpType:
            return boost::math::tgamma(2.0 / a_) /
                   (boost::math::tgamma(1.0 / a_) * std::pow(b_, 1.0 / a_));
        case DensityFamily::Tabulated: {
            // ψ̄ is quadratic on every segment, so Simpson's rule is exact
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
                double h = t_[i + 1] - t_[i];
                double mid = survival(t_[i] + 0.5 * h);
                total += h / 6.0 * (tail_[i] + 4.0 * mid + tail_[i + 1]);
            }
            (void)opt;
            return total;
        }
    }
    return kInf;
}

double Density::kappa() const { return kappa_; }

double Density::kappa_argmax() const { return kappa_at_; }

std::pair<double, double> Density::ratio_sup() const {
    auto ratio = [this](double t) { return hazard_ratio(t); };
    if (family_ == DensityFamily::Tabulated) {
        double best = -1.0;
        double best_at = 0.0;
        for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
            if (psi_[i] <= kTinyPdf && tail_[i] > 0.0) return {t_[i], kInf};
            const unsigned n = 64;
            double h = t_[i + 1] - t_[i];
            std::size_t best_j = 0;
            double seg_best = -1.0;
            for (unsigned j = 0; j <= n; ++j) {
                double t = j == n ? t_[i + 1] : t_[i] + h * j / n;
                double r = ratio(t);
                if (r > seg_best) { seg_best = r; best_j = j; }
            }
            double lo = t_[i] + h * (best_j == 0 ? 0.0 : (best_j - 1.0) / n);
            double hi = t_[i] + h * std::min<double>(n, best_j + 1.0) / n;
            auto [at, value] = maximize_scalar(ratio, lo, hi);
            if (value > best) { best = value; best_at = at; }
        }
        return {best_at, best};
    }
    // ExpType with a >= 1: ratio is finite and continuous on [0, horizon]
    const double horizon = scan_horizon();
    double best = -1.0;
    double best_at = 0.0;
    unsigned best_j = 0;
    for (unsigned j = 0; j <= kScanPoints; ++j) {
        double t = horizon * j / kScanPoints;
        double r = ratio(t);
        if (r > best) { best = r; best_at = t; best_j = j; }
    }
    double lo = horizon * (best_j == 0 ? 0.0 : best_j - 1.0) / kScanPoints;
    double hi = horizon * std::min<double>(kScanPoints, best_j + 1.0) / kScanPoints;
    auto [at, value] = maximize_scalar(ratio, lo, hi);
    if (value > best) { best = value; best_at = at; }
    return {best_at, best};
}

double Density::scan_horizon() const {
    switch (family_) {
        case DensityFamily::Uniform:
        case DensityFamily::BetaLike:
        case DensityFamily::Tabulated: return end_;
        case DensityFamily::ParetoLike:
            return std::pow(1e-14, 1.0 / (1.0 - alpha_d_)) - 1.0;
        case DensityFamily::ExpType: {
            double x = boost::math::gamma_q_inv(1.0 / a_, 1e-14);
            return std::pow(x / b_, 1.0 / a_);
        }
    }
    return end_;
}

double Density::b_p(double p, const QuadratureOptions& opt) const {
    if (!(p >= 1.0)) throw DomainError("B_p requires p in [1, inf]");
    if (p == 1.0) return kappa();
    if (std::isinf(p)) return mean_m(opt);
    const double pc = conjugate(p);
    const double alpha = alpha_d_;
    switch (family_) {
        case DensityFamily::Uniform:
        case DensityFamily::BetaLike:
            return std::pow(alpha + 1.0, -1.0 / p) * std::pow(alpha + pc + 1.0, -1.0 / pc);
        case DensityFamily::ParetoLike:
            if (!(alpha > pc + 1.0)) return kInf;
            return std::pow(alpha - 1.0, -1.0 / p) * std::pow(alpha - pc - 1.0, -1.0 / pc);
        case DensityFamily::ExpType: {
            auto f = [&](double t) {
                double bar = survival(t);
                if (bar <= 0.0) return 0.0;
                double log_psi = std::log(norm_c_) - b_ * std::pow(t, a_);
                return std::exp(pc * std::log(bar) + (1.0 - pc) * log_psi);
            };
            double cut = std::pow(650.0 / b_, 1.0 / a_);
            double split = std::min(1.0, cut);
            double total = integrate(f, 0.0, split, opt.tolerance).value +
                           integrate(f, split, cut, opt.tolerance).value;
            return std::pow(total, 1.0 / pc);
        }
        case DensityFamily::Tabulated: {
            // (2) is (1) plus B_p < ∞, so a failure of (2) alone settles it
            const ConditionReport rep = check_conditions(p, opt);
            if (rep.eq1_holds && !rep.eq2_holds) return kInf;
            // otherwise the only singularities are zero nodes with ψ̄ > 0,
            // where the integrand behaves like |t − t_i|^{1−p'}
            for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
                if (psi_[i] <= kTinyPdf && tail_[i] > 0.0 && pc >= 2.0) return kInf;
            }
            auto f = [&](double t) {
                double bar = survival(t);
                if (bar <= 0.0) return 0.0;
                double ps = pdf(t);
                return std::pow(bar, pc) * std::pow(ps, 1.0 - pc);
            };
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
                total += integrate(f, t_[i], t_[i + 1], opt.tolerance).value;
            }
            return std::pow(total, 1.0 / pc);
        }
    }
    return kInf;
}

// ---------------------------------------------------------------------------
// integrability conditions

ConditionReport Density::check_conditions(double p, const QuadratureOptions& opt) const {
    if (!(p >= 1.0)) throw DomainError("conditions require p in [1, inf]");
    ConditionReport r{p, true, true, ""};
    const double alpha = alpha_d_;
    switch (family_) {
        case DensityFamily::Uniform:
            r.reason = "psi = 1 on a compact interval: both conditions hold for every p";
            return r;
        case DensityFamily::BetaLike:
            if (!closed_) {
                r.reason = "beta-like on [0,1): both conditions hold for every p";
                return r;
            }
            r.eq1_holds = std::isinf(p) || p > alpha + 1.0 || (p == 1.0 && alpha == 0.0);
            r.eq2_holds = r.eq1_holds;
            r.reason = r.eq2_holds
                           ? "beta-like on [0,1]: p > alpha+1 (or p = 1, alpha = 0)"
                           : "beta-like on [0,1]: psi^{-1/p} not in L_{p'} near t = 1 "
                             "(needs p > alpha+1 or p = 1 and alpha = 0)";
            return r;
        case DensityFamily::ParetoLike: {
            bool ok = alpha > 2.0 && (std::isinf(p) || p > 1.0 + 1.0 / (alpha - 2.0));
            r.eq2_holds = ok;
            r.reason = ok ? "pareto-like: alpha > 2 and p > 1 + 1/(alpha-2)"
                          : "pareto-like: survival*psi^{-1/p} not in L_{p'} at infinity "
                            "(needs alpha > 2 and p > 1 + 1/(alpha-2))";
            return r;
        }
        case DensityFamily::ExpType: {
            bool ok = a_ >= 1.0 || p > 1.0;
            r.eq2_holds = ok;
            r.reason = ok ? "exp-type: a >= 1 or p > 1"
                          : "exp-type: survival/psi unbounded at infinity for a < 1, p = 1";
            return r;
        }
        case DensityFamily::Tabulated: return check_conditions_numeric(p, opt);
    }
    return r;
}

std::vector<double> Density::zero_nodes() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < t_.size(); ++i) {
        if (psi_[i] <= kTinyPdf) out.push_back(t_[i]);
    }
    return out;
}

ConditionReport Density::check_conditions_numeric(double p, const QuadratureOptions& opt) const {
    if (!(p >= 1.0)) throw DomainError("conditions require p in [1, inf]");
    const double pc = conjugate(p);
    const double cutoff = opt.divergence_cutoff;

    // h(ψ, ψ̄) whose L_{p'} membership is tested; p' = ∞ means a sup test
    auto probe_value = [&](Probe probe, double ps, double bar) -> double {
        if (probe == Probe::InversePdf) {
            if (ps <= kTinyPdf) return kInf;
            return std::isinf(pc) ? 1.0 / ps : std::pow(ps, -pc / p);
        }
        if (bar <= 0.0) return 0.0;
        if (ps <= kTinyPdf) return kInf;
        if (std::isinf(p)) return bar;
        return std::isinf(pc) ? bar / ps : std::exp(pc * std::log(bar) + (1.0 - pc) * std::log(ps));
    };
    const bool sup_test = std::isinf(pc);

    struct Anchor {
        double x0;  // kInf for the point at infinity
        int side;
        double reach;
        bool local;  // relevant for local integrability (eq1)
    };
    std::vector<Anchor> anchors;
    if (family_ == DensityFamily::Tabulated) {
        for (double z : zero_nodes()) {
            auto it = std::lower_bound(t_.begin(), t_.end(), z);
            std::size_t i = static_cast<std::size_t>(it - t_.begin());
            if (i > 0) anchors.push_back({z, -1, 0.5 * (t_[i] - t_[i - 1]), true});
            if (i + 1 < t_.size()) anchors.push_back({z, +1, 0.5 * (t_[i + 1] - t_[i]), true});
        }
    } else if (std::isfinite(end_)) {
        anchors.push_back({end_, -1, 0.5 * end_, closed_});
    }
    if (std::isinf(end_)) anchors.push_back({kInf, +1, 0.0, false});

    auto run = [&](const Anchor& a, Probe probe) -> ShellVerdict {
        std::vector<double> shells;
        if (std::isinf(a.x0)) {
            for (unsigned k = 0; k < opt.dyadic_levels; ++k) {
                double lo = std::ldexp(1.0, static_cast<int>(k));
                double hi = 2.0 * lo;
                // stop before ψ or ψ̄ underflows inside the shell
                if (pdf(hi) < 1e-250 || survival(hi) < 1e-280) break;
                auto h = [&](double t) { return probe_value(probe, pdf(t), survival(t)); };
                if (sup_test) {
                    double s = 0.0;
                    for (int j = 0; j <= 8; ++j) s = std::max(s, h(lo + (hi - lo) * j / 8.0));
                    shells.push_back(s);
                } else if (probe == Probe::HazardWeighted && std::isinf(p)) {
                    shells.push_back(integrate(h, lo, hi, 0.0, 1e-7).value);
                } else {
                    shells.push_back(integrate(h, lo, hi, 0.0, 1e-7).value);
                }
            }
        } else {
            const unsigned levels = std::min(opt.dyadic_levels, 50U);
            for (unsigned k = 0; k < levels; ++k) {
                double hi = std::ldexp(a.reach, -static_cast<int>(k));
                double lo = 0.5 * hi;
                auto h = [&](double s) {
                    return probe_value(probe, pdf_near(a.x0, a.side, s), survival_near(a.x0, a.side, s));
                };
                if (sup_test) {
                    double s = 0.0;
                    for (int j = 0; j <= 8; ++j) s = std::max(s, h(lo + (hi - lo) * j / 8.0));
                    shells.push_back(s);
                } else {
                    shells.push_back(integrate(h, lo, hi, 0.0, 1e-7).value);
                }
            }
        }
        return sup_test ? decide_sup(shells, cutoff) : decide_integral(shells, cutoff);
    };

    auto where = [](const Anchor& a) {
        if (std::isinf(a.x0)) return std::string("t -> inf");
        return std::string("t = ") + fmt(a.x0) + (a.side < 0 ? " (from the left)" : " (from the right)");
    };
    std::string cutoff_note = " [dyadic growth test, cutoff " + fmt(cutoff) + "]";

    ConditionReport r{p, true, true, ""};
    if (!std::isinf(p)) {
        for (const auto& a : anchors) {
            if (!a.local) continue;
            ShellVerdict v = run(a, Probe::InversePdf);
            if (!v.finite) {
                r.eq1_holds = false;
                r.reason = "eq1 fails: psi^{-1/p} not locally in L_{p'} near " + where(a) +
                           " (shell ratio " + fmt(v.ratio) + ")" + cutoff_note;
                break;
            }
        }
    }
    if (!r.eq1_holds) {
        r.eq2_holds = false;
        return r;
    }
    // global part of eq2 (for p = ∞ only ψ̄ ∈ L_1 matters, which needs a non-compact end)
    for (const auto& a : anchors) {
        if (std::isinf(p) && !std::isinf(a.x0)) continue;
        ShellVerdict v = run(a, Probe::HazardWeighted);
        if (!v.finite) {
            r.eq2_holds = false;
            r.reason = std::string("eq2 fails: ") +
                       (std::isinf(p) ? "survival not integrable" : "survival*psi^{-1/p} not in L_{p'}") +
                       " near " + where(a) + " (shell ratio " + fmt(v.ratio) + ")" + cutoff_note;
            return r;
        }
    }
    r.reason = "both conditions hold" + cutoff_note;
    return r;
}

// ---------------------------------------------------------------------------

double DensityMetrics::b_at(double p) const {
    if (p == 1.0) return kappa;
    if (std::isinf(p)) return m;
    for (const auto& [pp, value] : b) {
        if (pp == p) return value;
    }
    throw DomainError("B_p was not sampled at p = " + fmt(p));
}

DensityMetrics Density::metrics(const std::vector<double>& ps, const QuadratureOptions& opt) const {
    DensityMetrics out{mean_m(opt), kappa(), {}, std::nullopt, std::nullopt};
    for (double p : ps) out.b.emplace_back(p, b_p(p, opt));
    switch (family_) {
        case DensityFamily::Uniform:
            out.exact_m = Rational(1, 2);
            out.exact_kappa = Rational(1);
            break;
        case DensityFamily::BetaLike:
            out.exact_m = Rational(1) / (alpha_ + 2);
            out.exact_kappa = Rational(1) / (alpha_ + 1);
            break;
        case DensityFamily::ParetoLike:
            if (alpha_ > 2) out.exact_m = Rational(1) / (alpha_ - 2);
            break;
        default: break;
    }
    if (out.exact_m) out.exact_m->canonicalize();
    if (out.exact_kappa) out.exact_kappa->canonicalize();
    return out;
}

Interval Density::level_set(double level) const {
    if (std::isinf(kappa_)) {
        throw InfeasibleError("level sets of survival/psi need a finite kappa; " + description() +
                              " has kappa = inf");
    }
    const double horizon = scan_horizon();
    const double peak = std::min(kappa_at_, horizon);
    auto ratio = [this](double t) { return hazard_ratio(t); };

    auto bisect = [&](double inside, double outside) {
        for (int i = 0; i < 200 && inside != outside; ++i) {
            double mid = 0.5 * (inside + outside);
            if (mid == inside || mid == outside) break;
            (ratio(mid) >= level ? inside : outside) = mid;
        }
        return inside;
    };
    Interval iv{0.0, horizon};
    if (ratio(horizon) < level) iv.hi = bisect(peak, horizon);
    if (ratio(0.0) < level) iv.lo = bisect(peak, 0.0);

    // verify the monotone-sides assumption on a uniform scan
    const double slack = 1e-12 * std::max(1.0, std::fabs(level));
    bool consistent = true;
    std::vector<double> grid(kScanPoints + 1);
    std::vector<bool> above(kScanPoints + 1);
    for (unsigned j = 0; j <= kScanPoints; ++j) {
        grid[j] = horizon * j / kScanPoints;
        double r = ratio(grid[j]);
        above[j] = r >= level;
        bool inside = grid[j] >= iv.lo && grid[j] <= iv.hi;
        if (inside && r < level - slack) consistent = false;
        if (!inside && r > level + slack) consistent = false;
    }
    if (!consistent) {
        unsigned centre = static_cast<unsigned>(std::lround(peak / horizon * kScanPoints));
        unsigned lo = centre;
        unsigned hi = centre;
        while (lo > 0 && above[lo - 1]) --lo;
        while (hi < kScanPoints && above[hi + 1]) ++hi;
        iv = {grid[lo], grid[hi]};
    }
    if (!(iv.length() > 0.0)) {
        double half = horizon / (2.0 * kScanPoints);
        iv = {std::max(0.0, peak - half), std::min(horizon, peak + half)};
    }
    return iv;
}

}  // namespace normbridge
