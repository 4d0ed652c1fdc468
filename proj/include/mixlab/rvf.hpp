#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

// Slowly and regularly varying functions: construction, evaluation,
// membership probes and Karamata-type integral asymptotics.

namespace mixlab::rvf {

using ScalarFn = std::function<double(double)>;

/// ell(x) = c(x) exp( int_a^x eps(t)/t dt ),  x > 0 (signed integral for x < a).
struct RepresentationSpec {
    double a_lower = 1.0;
    ScalarFn c_fn;
    double c_limit = 1.0;
    ScalarFn eps_fn;
    std::string label = "representation";
};

class RepresentationCache;

namespace kind {
struct Constant {
    double value = 1.0;
};
/// (log max(t, e))^alpha, so the factor is positive and equals 1 for t <= e.
struct LogPower {
    double alpha = 1.0;
};
/// 2 + sin(log t): bounded, in M(0), but not slowly varying.
struct SinLog {};
/// exp(sqrt(|log t|))
struct ExpSqrtLog {};
struct Representation {
    RepresentationSpec spec;
    std::shared_ptr<RepresentationCache> cache;
};
/// Positive samples, strictly increasing t; log-log interpolation, clamped outside.
struct Tabulated {
    std::vector<double> t;
    std::vector<double> value;
};
}  // namespace kind

class SlowlyVaryingSpec {
public:
    using Kind = std::variant<kind::Constant, kind::LogPower, kind::SinLog, kind::ExpSqrtLog,
                              kind::Representation, kind::Tabulated>;

    SlowlyVaryingSpec() : kind_(kind::Constant{1.0}) {}

    static SlowlyVaryingSpec constant(double value);
    static SlowlyVaryingSpec log_power(double alpha);
    static SlowlyVaryingSpec sin_log();
    static SlowlyVaryingSpec exp_sqrt_log();
    static SlowlyVaryingSpec tabulated(std::vector<std::pair<double, double>> samples);

    /// Finite positive value for t > 0; DomainError otherwise.
    double operator()(double t) const;

    const Kind& kind() const noexcept { return kind_; }
    std::string kind_name() const;
    bool is_constant() const noexcept { return std::holds_alternative<kind::Constant>(kind_); }
    /// Short human-readable description, e.g. "log_power(alpha=1)".
    std::string describe() const;

private:
    friend SlowlyVaryingSpec make_from_representation(const RepresentationSpec& spec);
    explicit SlowlyVaryingSpec(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

/// Evaluates the representation integral on geometric nodes in log t and
/// caches cumulative values; thread-safe, logically immutable.
class RepresentationCache {
public:
    explicit RepresentationCache(RepresentationSpec spec);
    double operator()(double x) const;

private:
    double log_integral(double log_x) const;

    RepresentationSpec spec_;
    double log_a_;
    struct State;
    std::unique_ptr<State> state_;
};

SlowlyVaryingSpec make_from_representation(const RepresentationSpec& spec);

/// log(1+t) written in representation form: a = 1, c = log 2,
/// eps(t) = t / ((1+t) log(1+t)).  Agrees with log(1+t) for every t > 0.
SlowlyVaryingSpec log1p_slowly_varying();

/// Two-column CSV (t,value) with a header row.
SlowlyVaryingSpec load_tabulated_csv(const std::string& path);

struct CoefficientH {
    double gamma = 0.0;
    SlowlyVaryingSpec ell;

    double operator()(double t) const;
    /// int_{t0}^{t1} h, closed form when ell is constant, quadrature otherwise.
    double integral(double t0, double t1) const;
    std::string describe() const;
};

double eval_h(const CoefficientH& h, double t);

struct RatioTable {
    std::vector<double> x;
    std::vector<double> lambda;
    std::vector<std::vector<double>> ratio;  ///< ratio[i][j] = ell(lambda_i x_j) / ell(lambda_i)
    double max_deviation_at_largest = 0.0;    ///< max_j |ratio - 1| for the largest lambda
    bool pass = false;
};

RatioTable slow_variation_ratio_test(const SlowlyVaryingSpec& ell, const std::vector<double>& x_values,
                                     const std::vector<double>& lambda_values, double tolerance = 0.05);

/// x ell'(x) / ell(x) for kinds with an analytic derivative.
double derivative_criterion(const SlowlyVaryingSpec& ell, double x);

struct IndexEstimate {
    double rho_hat = 0.0;
    double residual = 0.0;              ///< spread of log h / log x over the last three points
    std::vector<double> local_indices;  ///< log h(x_k) / log x_k
    bool member = false;                ///< residual <= tolerance
};

IndexEstimate index_estimate(const ScalarFn& h, const std::vector<double>& x_grid, double tolerance = 0.05);

struct IntegralRatio {
    double ratio = 0.0;
    double integral = 0.0;
    double error = 0.0;
    std::size_t segments = 0;
};

/// x L(x) / int_0^x L
IntegralRatio karamata_head_ratio(const ScalarFn& L, double x);
/// x L(x) / int_x^inf L
IntegralRatio karamata_tail_ratio(const ScalarFn& L, double x);

struct AsympIntRatio {
    double ratio = 0.0;
    double F = 0.0;
    double reference = 0.0;
};

/// F(R) / (R^{beta gamma} ell(R)^beta int_a^b tau^{beta gamma} dtau),  F(R) = int_a^b h(R tau)^beta dtau
AsympIntRatio asymp_int_ratio(const CoefficientH& h, double beta, double a, double b, double R);

struct UniformCheck {
    double sup = 0.0;
    double sup_refined = 0.0;  ///< same supremum on a grid twice as dense
    std::size_t samples = 0;
};

/// sup over x in [a, b] of |L(lambda x)/L(lambda) - x^rho|
UniformCheck uniform_convergence_check(const ScalarFn& L, double rho, double a, double b, double lambda,
                                       std::size_t samples = 1024);

}  // namespace mixlab::rvf
