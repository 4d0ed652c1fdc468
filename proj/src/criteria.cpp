#include "mixlab/criteria.hpp"

#include "mixlab/error.hpp"
#include "mixlab/quadrature.hpp"
#include "mixlab/simd.hpp"
#include "mixlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mixlab::criteria {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require(bool ok, const std::string& inequality) {
    if (!ok) throw DomainError("precondition violated: " + inequality);
}

void check_forced_domain(int N, double s, double b, double gamma) {
    require(N >= 1, "N >= 1");
    require(s > 0.0 && s <= 1.0, "0 < s <= 1");
    require(gamma > -1.0, "gamma > -1");
    require(b >= 0.0, "0 <= b/(1+gamma)");
    require(b / (1.0 + gamma) < 2.0 * s, "b/(1+gamma) < 2s");
    require(2.0 * s < N, "2s < N");
}

// slack for semigroup round-off on data the multiplier leaves unchanged
constexpr double kRoundoff = 1e-12;

bool close(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); }

}  // namespace

double fujita_exponent(int N, double s, double gamma) {
    require(N >= 1, "N >= 1");
    require(s > 0.0 && s <= 1.0, "0 < s <= 1");
    require(gamma > -1.0, "gamma > -1");
    return 1.0 + 2.0 * s * (gamma + 1.0) / N;
}

double forced_exponent(int N, double s, double b, double gamma, double rho) {
    require(rho <= 0.0, "rho <= 0");
    require(rho > -1.0, "rho > -1");
    check_forced_domain(N, s, b, gamma);
    return (N - b - 2.0 * s * (rho - gamma)) / (N - 2.0 * s * (rho + 1.0));
}

CriticalLebesgue critical_lebesgue(int N, double s, double b, double gamma, double rho, double p) {
    require(N >= 1, "N >= 1");
    require(p > 1.0, "p > 1");
    require(rho > -1.0, "rho > -1");
    const double d = 2.0 * s * (1.0 + gamma) - b;
    require(d > 0.0, "2s(1+gamma) - b > 0");
    CriticalLebesgue out;
    out.p_c = N * (p - 1.0) / d;
    out.q_c = N * out.p_c / (N + 2.0 * s * (rho + 1.0) * out.p_c);
    out.identity_residual = 1.0 / out.q_c - 1.0 / out.p_c - 2.0 * s * (rho + 1.0) / N;
    return out;
}

RWindow admissible_r_window(int N, double s, double b, double gamma, double rho, double p) {
    require(rho < 0.0, "rho < 0");
    require(rho > -1.0, "rho > -1");
    const double p_star = forced_exponent(N, s, b, gamma, rho);
    require(p >= p_star, "p >= p* = " + fmt(p_star));
    const auto cl = critical_lebesgue(N, s, b, gamma, rho, p);
    const double d = 2.0 * s * (1.0 + gamma) - b;

    RWindow w;
    w.first_case_limit = (N - b + 2.0 * s * gamma) / (N - 2.0 * s);
    w.first_case = p <= w.first_case_limit;
    w.inv_lower = std::max(1.0 / cl.p_c + 2.0 * rho * s / N, 1.0 / (p * cl.p_c));
    w.inv_upper = std::min(1.0 / cl.p_c, (N - 2.0 * s * (rho + 1.0)) / (N * p));
    w.empty = !(w.inv_lower < w.inv_upper);
    if (w.empty) return w;
    w.r_lower = 1.0 / w.inv_upper;
    w.r_upper = 1.0 / w.inv_lower;
    const double inv_r = 0.5 * (w.inv_lower + w.inv_upper);
    w.r = 1.0 / inv_r;
    w.mu = N / d * (1.0 / cl.p_c - inv_r);
    w.mu_alt = N / d * (1.0 / cl.q_c - inv_r) - 2.0 * s * (rho + 1.0) / d;
    w.mu_alt_residual = w.mu_alt - w.mu;
    w.identity_residual = (1.0 - p) * w.mu + 1.0 - N * (p - 1.0) / (d * w.r);
    w.mu_in_range = w.mu > 0.0 && w.mu < 1.0 / p;
    w.r_exceeds_p = w.r_lower > p;
    return w;
}

ExponentReport exponent_report(int N, double s, double b, double gamma, double rho, double p) {
    ExponentReport r;
    r.N = N;
    r.s = s;
    r.b = b;
    r.gamma = gamma;
    r.rho = rho;
    r.p = p;
    r.p_F = fujita_exponent(N, s, gamma);
    if (close(p, r.p_F)) {
        r.boundary = true;
        r.notes.push_back("boundary: p = p_F, theory silent");
    }
    try {
        r.p_star = forced_exponent(N, s, b, gamma, rho);
        if (close(p, *r.p_star)) {
            r.boundary = true;
            r.notes.push_back("boundary: p = p*, theory silent");
        }
    } catch (const DomainError& e) {
        r.notes.push_back(std::string("p* undefined: ") + e.what());
    }
    try {
        const auto cl = critical_lebesgue(N, s, b, gamma, rho, p);
        r.p_c = cl.p_c;
        r.q_c = cl.q_c;
    } catch (const DomainError& e) {
        r.notes.push_back(std::string("p_c, q_c undefined: ") + e.what());
    }
    try {
        r.r_window = admissible_r_window(N, s, b, gamma, rho, p);
        if (!r.r_window->first_case)
            r.notes.push_back("p exceeds (N-b+2s gamma)/(N-2s): second case, exponent arithmetic only");
    } catch (const DomainError& e) {
        r.notes.push_back(std::string("r window undefined: ") + e.what());
    }
    return r;
}

nlohmann::json to_json(const RWindow& w) {
    nlohmann::json j;
    j["inv_r_lower"] = w.inv_lower;
    j["inv_r_upper"] = w.inv_upper;
    j["empty"] = w.empty;
    j["first_case"] = w.first_case;
    j["first_case_limit"] = w.first_case_limit;
    if (!w.empty) {
        j["r_lower"] = w.r_lower;
        j["r_upper"] = w.r_upper;
        j["r"] = w.r;
        j["mu"] = w.mu;
        j["mu_alt"] = w.mu_alt;
        j["mu_alt_residual"] = w.mu_alt_residual;
        j["identity_residual"] = w.identity_residual;
        j["mu_in_range"] = w.mu_in_range;
        j["r_exceeds_p"] = w.r_exceeds_p;
    }
    return j;
}

nlohmann::json to_json(const ExponentReport& r) {
    nlohmann::json j;
    j["N"] = r.N;
    j["s"] = r.s;
    j["b"] = r.b;
    j["gamma"] = r.gamma;
    j["rho"] = r.rho;
    j["p"] = r.p;
    j["p_F"] = r.p_F;
    j["p_star"] = r.p_star ? nlohmann::json(*r.p_star) : nlohmann::json(nullptr);
    j["p_c"] = r.p_c ? nlohmann::json(*r.p_c) : nlohmann::json(nullptr);
    j["q_c"] = r.q_c ? nlohmann::json(*r.q_c) : nlohmann::json(nullptr);
    j["r_window"] = r.r_window ? to_json(*r.r_window) : nlohmann::json(nullptr);
    j["mu"] = r.r_window && !r.r_window->empty ? nlohmann::json(r.r_window->mu) : nlohmann::json(nullptr);
    j["boundary"] = r.boundary;
    j["notes"] = r.notes;
    return j;
}

// Certificates -----------------------------------------------------------------

namespace {

void check_nonnegative(const Field& u, bool allow_zero, const char* what) {
    double mx = 0.0;
    for (double v : u.values) {
        if (!std::isfinite(v)) throw ArgumentError(std::string(what) + ": data must be finite");
        if (v < 0.0) throw ArgumentError(std::string(what) + ": data must be nonnegative");
        mx = std::max(mx, v);
    }
    if (!allow_zero && mx == 0.0) throw ArgumentError(std::string(what) + ": data must be nontrivial");
}

}  // namespace

BlowupCertificate blowup_certificate(const Field& u0, double s, const rvf::CoefficientH& h, double p, double t0) {
    check_nonnegative(u0, false, "blow-up certificate");
    if (!(p > 1.0)) throw DomainError("blow-up certificate: p must exceed 1");
    if (!(t0 > 0.0)) throw ArgumentError("blow-up certificate: t0 must be positive");
    BlowupCertificate c;
    c.t0 = t0;
    c.sup_norm = spectral::sup_norm(spectral::apply_semigroup(u0, s, t0));
    try {
        c.h_integral = h.integral(0.0, t0);
    } catch (const Error& e) {
        throw NumericError(std::string("blow-up certificate: quadrature of h failed: ") + e.what());
    }
    c.value = (p - 1.0) * std::pow(c.sup_norm, p - 1.0) * c.h_integral;
    c.satisfied = c.value >= 1.0 - kRoundoff;
    return c;
}

BlowupCertificate blowup_certificate_scan(const Field& u0, double s, const rvf::CoefficientH& h, double p,
                                          const std::vector<double>& t0_values) {
    if (t0_values.empty()) throw ArgumentError("blow-up certificate scan: no t0 values");
    BlowupCertificate best;
    bool have = false;
    for (double t0 : t0_values) {
        const auto c = blowup_certificate(u0, s, h, p, t0);
        if (c.satisfied) return c;
        if (!have || c.value > best.value) best = c;
        have = true;
    }
    return best;
}

GlobalCertificate global_certificate(const Field& v0, double s, const rvf::CoefficientH& h, double p, double t_split,
                                     const GlobalCertificateOptions& opt) {
    check_nonnegative(v0, true, "global certificate");
    const int N = v0.grid.dim;
    const double pF = fujita_exponent(N, s, h.gamma);
    if (!(p > pF))
        throw DomainError("global certificate: p = " + fmt(p) + " <= p_F = " + fmt(pF) +
                          "; the tail integral diverges and small-data global existence is not available");
    if (!(t_split > 0.0)) throw ArgumentError("global certificate: split time must be positive");
    if (opt.probe_points < 2 || !(opt.probe_span > 1.0)) throw ArgumentError("global certificate: bad probe window");

    GlobalCertificate c;
    if (spectral::sup_norm(v0) == 0.0) {
        c.satisfied = true;
        return c;
    }
    const double beta = N * (p - 1.0) / (2.0 * s);

    spectral::Workspace ws(v0.grid);
    std::vector<double> out(v0.size());
    const auto sup_at = [&](double tau) {
        if (tau <= 0.0) return spectral::sup_norm(v0);
        const auto m = ws.semigroup_multiplier(s, tau);
        ws.apply(v0.values, out, m);
        return simd::max_abs(out);
    };
    const auto integrand = [&](double tau) { return h(tau) * std::pow(sup_at(tau), p - 1.0); };
    const auto head = h.gamma < 0.0 ? quad::integrate_head(integrand, t_split, opt.head_rel_tol)
                                    : quad::integrate(integrand, 0.0, t_split, opt.head_rel_tol, 12);
    c.head = head.value;
    c.head_error = head.error;

    std::vector<double> ts(opt.probe_points);
    for (std::size_t k = 0; k < ts.size(); ++k)
        ts[k] = t_split * std::pow(opt.probe_span, static_cast<double>(k) / static_cast<double>(ts.size() - 1));
    const auto probe = spectral::decay_bounds_probe(v0, s, ts, opt.wrap_guard);
    c.c2 = probe.c2;
    c.constant = opt.safety * std::pow(c.c2, p - 1.0);

    const double e = h.gamma - beta;  // tail exponent, < -1 since p > p_F
    if (h.ell.is_constant()) {
        c.tail_integral = h.ell(1.0) * std::pow(t_split, e + 1.0) / (-(e + 1.0));
    } else {
        c.tail_integral = quad::integrate_tail([&](double tau) { return h(tau) * std::pow(tau, -beta); }, t_split).value;
    }
    c.tail_bound = c.constant * c.tail_integral;
    c.total = c.head + c.tail_bound;
    c.satisfied = c.total < 1.0;
    return c;
}

nlohmann::json to_json(const BlowupCertificate& c) {
    return {{"value", c.value}, {"sup_norm", c.sup_norm}, {"h_integral", c.h_integral},
            {"t0", c.t0},       {"satisfied", c.satisfied}};
}

nlohmann::json to_json(const GlobalCertificate& c) {
    return {{"head", c.head},         {"head_error", c.head_error},       {"tail_bound", c.tail_bound},
            {"tail_integral", c.tail_integral}, {"c2", c.c2},            {"constant", c.constant},
            {"total", c.total},       {"satisfied", c.satisfied}};
}

}  // namespace mixlab::criteria
