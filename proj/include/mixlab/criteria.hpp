#pragma once

#include "mixlab/grid.hpp"
#include "mixlab/rvf.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

// Critical exponents of the forced/unforced problem and the integral
// certificates for blow-up and small-data global existence.

namespace mixlab::criteria {

/// 1 + 2s(gamma+1)/N
double fujita_exponent(int N, double s, double gamma);

/// (N - b - 2s(rho - gamma)) / (N - 2s(rho + 1)); needs rho <= 0 and
/// 0 <= b/(1+gamma) < 2s < N.  DomainError names the violated inequality.
double forced_exponent(int N, double s, double b, double gamma, double rho);

struct CriticalLebesgue {
    double p_c = 0.0;
    double q_c = 0.0;
    double identity_residual = 0.0;  ///< 1/q_c - 1/p_c - 2s(rho+1)/N
};

CriticalLebesgue critical_lebesgue(int N, double s, double b, double gamma, double rho, double p);

struct RWindow {
    double inv_lower = 0.0;  ///< open interval for 1/r
    double inv_upper = 0.0;
    bool empty = true;
    double r_lower = 0.0;    ///< 1/inv_upper
    double r_upper = 0.0;    ///< 1/inv_lower
    double r = 0.0;          ///< sample: 1/r at the midpoint of the 1/r interval
    double mu = 0.0;         ///< N/(2s(gamma+1)-b) (1/p_c - 1/r)
    double mu_alt = 0.0;     ///< N/(2s(gamma+1)-b) (1/q_c - 1/r) - 2s(rho+1)/(2s(gamma+1)-b)
    double mu_alt_residual = 0.0;
    double identity_residual = 0.0;  ///< (1-p) mu + 1 - N(p-1)/((2s(1+gamma)-b) r)
    bool mu_in_range = false;        ///< 0 < mu < 1/p
    bool r_exceeds_p = false;
    bool first_case = true;          ///< p <= (N - b + 2s gamma)/(N - 2s)
    double first_case_limit = 0.0;
};

/// Needs p >= p*, 0 <= b/(1+gamma) < 2s < N and -1 < rho < 0.  An empty
/// window is reported, not thrown.  Inputs beyond the first case are
/// evaluated with the same formulas and flagged.
RWindow admissible_r_window(int N, double s, double b, double gamma, double rho, double p);

struct ExponentReport {
    int N = 1;
    double s = 0.5, b = 0.0, gamma = 0.0, rho = 0.0, p = 2.0;
    double p_F = 0.0;
    std::optional<double> p_star;
    std::optional<double> p_c;
    std::optional<double> q_c;
    std::optional<RWindow> r_window;
    std::vector<std::string> notes;  ///< why optional fields are absent, boundary flags
    bool boundary = false;           ///< p equals p_F or p*: theory silent
};

/// Every quantity that is defined for the tuple; undefined ones carry a note.
ExponentReport exponent_report(int N, double s, double b, double gamma, double rho, double p);
nlohmann::json to_json(const ExponentReport& r);
nlohmann::json to_json(const RWindow& w);

struct BlowupCertificate {
    double value = 0.0;       ///< (p-1) ||e^{t0 L} u0||^{p-1} int_0^{t0} h
    double sup_norm = 0.0;
    double h_integral = 0.0;
    double t0 = 0.0;
    bool satisfied = false;   ///< value >= 1
};

/// u0 nonnegative and nontrivial (ArgumentError otherwise).
BlowupCertificate blowup_certificate(const Field& u0, double s, const rvf::CoefficientH& h, double p, double t0);

/// First satisfied t0 from a list, or the certificate with the largest value.
BlowupCertificate blowup_certificate_scan(const Field& u0, double s, const rvf::CoefficientH& h, double p,
                                          const std::vector<double>& t0_values);

struct GlobalCertificate {
    double head = 0.0;        ///< int_0^T h ||e^{tau L} v0||^{p-1}
    double head_error = 0.0;
    double tail_bound = 0.0;  ///< C int_T^inf h(tau) tau^{-N(p-1)/(2s)}
    double tail_integral = 0.0;
    double c2 = 0.0;          ///< upper band constant of t^{N/2s} ||e^{tL} v0||
    double constant = 0.0;    ///< C = safety (c2)^{p-1}
    double total = 0.0;
    bool satisfied = false;   ///< total < 1
};

struct GlobalCertificateOptions {
    double safety = 2.0;
    double probe_span = 16.0;      ///< decay constant fitted on [T, span T]
    std::size_t probe_points = 9;
    double head_rel_tol = 1e-6;
    double wrap_guard = 1e-4;
};

/// Needs p > p_F (else DomainError: the tail integral diverges).
GlobalCertificate global_certificate(const Field& v0, double s, const rvf::CoefficientH& h, double p,
                                     double t_split, const GlobalCertificateOptions& options = {});

nlohmann::json to_json(const BlowupCertificate& c);
nlohmann::json to_json(const GlobalCertificate& c);

}  // namespace mixlab::criteria
