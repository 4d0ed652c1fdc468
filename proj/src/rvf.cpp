#include "mixlab/rvf.hpp"

#include "mixlab/error.hpp"
#include "mixlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>

namespace mixlab::rvf {

namespace {

constexpr double kNodeStep = 0.25;  // spacing of cached nodes in log t
constexpr double kCacheTol = 1e-11;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

double checked(double value, double t, const char* what) {
    if (!std::isfinite(value) || !(value > 0.0)) {
        std::ostringstream msg;
        msg << what << ": value " << value << " at t=" << t << " is not finite and positive";
        throw DomainError(msg.str());
    }
    return value;
}

double tabulated_eval(const kind::Tabulated& tab, double t) {
    const auto& ts = tab.t;
    if (t <= ts.front()) return tab.value.front();
    if (t >= ts.back()) return tab.value.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - ts.begin());
    const double u0 = std::log(ts[j - 1]), u1 = std::log(ts[j]);
    const double w = (std::log(t) - u0) / (u1 - u0);
    return std::exp((1.0 - w) * std::log(tab.value[j - 1]) + w * std::log(tab.value[j]));
}

}  // namespace

// ---------------------------------------------------------------------------
// Representation cache

struct RepresentationCache::State {
    std::mutex mutex;
    std::vector<double> cumulative{0.0};  // integral from log a to log a + k * step
};

RepresentationCache::RepresentationCache(RepresentationSpec spec)
    : spec_(std::move(spec)), log_a_(std::log(spec_.a_lower)), state_(std::make_unique<State>()) {}

double RepresentationCache::log_integral(double log_x) const {
    const auto integrand = [this](double v) { return spec_.eps_fn(std::exp(v)); };
    if (log_x <= log_a_) {
        return -quad::integrate(integrand, log_x, log_a_, kCacheTol).value;
    }
    const auto k = static_cast<std::size_t>(std::floor((log_x - log_a_) / kNodeStep));
    double base = 0.0;
    {
        std::lock_guard lock(state_->mutex);
        auto& cum = state_->cumulative;
        while (cum.size() <= k) {
            const double lo = log_a_ + kNodeStep * static_cast<double>(cum.size() - 1);
            cum.push_back(cum.back() + quad::integrate(integrand, lo, lo + kNodeStep, kCacheTol).value);
        }
        base = cum[k];
    }
    const double node = log_a_ + kNodeStep * static_cast<double>(k);
    return base + quad::integrate(integrand, node, log_x, kCacheTol).value;
}

double RepresentationCache::operator()(double x) const {
    return spec_.c_fn(x) * std::exp(log_integral(std::log(x)));
}

// ---------------------------------------------------------------------------
// SlowlyVaryingSpec

SlowlyVaryingSpec SlowlyVaryingSpec::constant(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) throw ArgumentError("Constant: value must be finite and positive");
    return SlowlyVaryingSpec(kind::Constant{value});
}

SlowlyVaryingSpec SlowlyVaryingSpec::log_power(double alpha) {
    if (!std::isfinite(alpha)) throw ArgumentError("LogPower: exponent must be finite");
    return SlowlyVaryingSpec(kind::LogPower{alpha});
}

SlowlyVaryingSpec SlowlyVaryingSpec::sin_log() { return SlowlyVaryingSpec(kind::SinLog{}); }

SlowlyVaryingSpec SlowlyVaryingSpec::exp_sqrt_log() { return SlowlyVaryingSpec(kind::ExpSqrtLog{}); }

SlowlyVaryingSpec SlowlyVaryingSpec::tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.empty()) throw ArgumentError("Tabulated: no samples");
    kind::Tabulated tab;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto [t, v] = samples[i];
        if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("Tabulated: t must be finite and positive");
        if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("Tabulated: values must be finite and positive");
        if (i > 0 && !(t > samples[i - 1].first)) throw ArgumentError("Tabulated: t must be strictly increasing");
        tab.t.push_back(t);
        tab.value.push_back(v);
    }
    return SlowlyVaryingSpec(std::move(tab));
}

double SlowlyVaryingSpec::operator()(double t) const {
    if (!(t > 0.0) || std::isnan(t)) throw DomainError("slowly varying factor evaluated at non-positive t");
    const double v = std::visit(
        overloaded{
            [](const kind::Constant& c) { return c.value; },
            [t](const kind::LogPower& k) { return std::pow(std::log(std::max(t, M_E)), k.alpha); },
            [t](const kind::SinLog&) { return 2.0 + std::sin(std::log(t)); },
            [t](const kind::ExpSqrtLog&) { return std::exp(std::sqrt(std::fabs(std::log(t)))); },
            [t](const kind::Representation& r) { return (*r.cache)(t); },
            [t](const kind::Tabulated& tab) { return tabulated_eval(tab, t); },
        },
        kind_);
    return checked(v, t, "slowly varying factor");
}

std::string SlowlyVaryingSpec::kind_name() const {
    return std::visit(overloaded{
                          [](const kind::Constant&) { return std::string("constant"); },
                          [](const kind::LogPower&) { return std::string("log_power"); },
                          [](const kind::SinLog&) { return std::string("sin_log"); },
                          [](const kind::ExpSqrtLog&) { return std::string("exp_sqrt_log"); },
                          [](const kind::Representation&) { return std::string("representation"); },
                          [](const kind::Tabulated&) { return std::string("tabulated"); },
                      },
                      kind_);
}

std::string SlowlyVaryingSpec::describe() const {
    return std::visit(overloaded{
                          [](const kind::Constant& c) { return "constant(" + fmt_num(c.value) + ")"; },
                          [](const kind::LogPower& k) { return "log_power(alpha=" + fmt_num(k.alpha) + ")"; },
                          [](const kind::SinLog&) { return std::string("sin_log"); },
                          [](const kind::ExpSqrtLog&) { return std::string("exp_sqrt_log"); },
                          [](const kind::Representation& r) { return "representation(" + r.spec.label + ")"; },
                          [](const kind::Tabulated& t) { return "tabulated(" + std::to_string(t.t.size()) + ")"; },
                      },
                      kind_);
}

SlowlyVaryingSpec make_from_representation(const RepresentationSpec& spec) {
    if (!(spec.a_lower > 0.0) || !std::isfinite(spec.a_lower)) throw ArgumentError("representation: a must be positive");
    if (!spec.c_fn || !spec.eps_fn) throw ArgumentError("representation: c and eps must be callable");
    if (!(spec.c_limit > 0.0) || !std::isfinite(spec.c_limit)) {
        throw ArgumentError("representation: limit of c must be finite and positive");
    }
    kind::Representation r{spec, std::make_shared<RepresentationCache>(spec)};
    return SlowlyVaryingSpec(std::move(r));
}

SlowlyVaryingSpec log1p_slowly_varying() {
    RepresentationSpec spec;
    spec.a_lower = 1.0;
    const double log2 = std::log(2.0);
    spec.c_fn = [log2](double) { return log2; };
    spec.c_limit = log2;
    spec.eps_fn = [](double t) {
        const double l = std::log1p(t);
        return t / ((1.0 + t) * l);
    };
    spec.label = "log1p";
    return make_from_representation(spec);
}

SlowlyVaryingSpec load_tabulated_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open tabulated CSV");
    std::string line;
    if (!std::getline(in, line)) throw DataError("tabulated CSV has no header: " + path);
    std::vector<std::pair<double, double>> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected two columns");
        }
        try {
            samples.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(line_no) + ": not a number");
        }
    }
    try {
        return SlowlyVaryingSpec::tabulated(std::move(samples));
    } catch (const ArgumentError& e) {
        throw DataError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// CoefficientH

double CoefficientH::operator()(double t) const {
    if (!(t > 0.0)) throw DomainError("h evaluated at non-positive t");
    return std::pow(t, gamma) * ell(t);
}

double CoefficientH::integral(double t0, double t1) const {
    if (t0 < 0.0 || t1 < t0) throw DomainError("h integral needs 0 <= t0 <= t1");
    if (t1 == t0) return 0.0;
    if (const auto* c = std::get_if<kind::Constant>(&ell.kind())) {
        if (!(gamma > -1.0)) throw DomainError("h integral: gamma must exceed -1");
        const double g1 = gamma + 1.0;
        return c->value * (std::pow(t1, g1) - std::pow(t0, g1)) / g1;
    }
    const auto f = [this](double t) { return (*this)(t); };
    if (t0 == 0.0) return quad::integrate_head(f, t1).value;
    return quad::integrate(f, t0, t1).value;
}

std::string CoefficientH::describe() const { return "t^" + fmt_num(gamma) + " * " + ell.describe(); }

double eval_h(const CoefficientH& h, double t) { return h(t); }

// ---------------------------------------------------------------------------
// Probes

RatioTable slow_variation_ratio_test(const SlowlyVaryingSpec& ell, const std::vector<double>& x_values,
                                     const std::vector<double>& lambda_values, double tolerance) {
    if (x_values.empty() || lambda_values.empty()) throw ArgumentError("ratio test: empty x or lambda list");
    for (std::size_t i = 0; i < lambda_values.size(); ++i) {
        if (!(lambda_values[i] > 0.0)) throw DomainError("ratio test: lambda must be positive");
        if (i > 0 && !(lambda_values[i] > lambda_values[i - 1])) {
            throw ArgumentError("ratio test: lambda list must be increasing");
        }
    }
    for (double x : x_values) {
        if (!(x > 0.0)) throw DomainError("ratio test: x must be positive");
    }
    RatioTable table;
    table.x = x_values;
    table.lambda = lambda_values;
    for (double lam : lambda_values) {
        const double base = ell(lam);
        std::vector<double> row;
        row.reserve(x_values.size());
        for (double x : x_values) row.push_back(ell(lam * x) / base);
        table.ratio.push_back(std::move(row));
    }
    for (double r : table.ratio.back()) {
        table.max_deviation_at_largest = std::max(table.max_deviation_at_largest, std::fabs(r - 1.0));
    }
    table.pass = table.max_deviation_at_largest <= tolerance;
    return table;
}

double derivative_criterion(const SlowlyVaryingSpec& ell, double x) {
    if (!(x > 0.0)) throw DomainError("derivative criterion: x must be positive");
    return std::visit(overloaded{
                          [](const kind::Constant&) { return 0.0; },
                          [x](const kind::LogPower& k) { return x > M_E ? k.alpha / std::log(x) : 0.0; },
                          [x](const kind::ExpSqrtLog&) {
                              const double l = std::log(x);
                              if (l == 0.0) throw DomainError("exp_sqrt_log is not differentiable at t=1");
                              return std::copysign(0.5 / std::sqrt(std::fabs(l)), l);
                          },
                          [&ell](const auto&) -> double {
                              throw UnsupportedKindError("derivative criterion: kind '" + ell.kind_name() +
                                                         "' has no analytic derivative");
                          },
                      },
                      ell.kind());
}

IndexEstimate index_estimate(const ScalarFn& h, const std::vector<double>& x_grid, double tolerance) {
    if (x_grid.size() < 4) throw ArgumentError("index estimate: need at least four points");
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        if (!(x_grid[i] > 1.0)) throw DomainError("index estimate: points must exceed 1");
        if (i > 0 && !(x_grid[i] > x_grid[i - 1])) throw ArgumentError("index estimate: grid must be increasing");
    }
    IndexEstimate est;
    for (double x : x_grid) {
        const double v = h(x);
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("index estimate: h must be finite and positive");
        est.local_indices.push_back(std::log(v) / std::log(x));
    }
    const auto tail = est.local_indices.end() - 3;
    const auto [lo, hi] = std::minmax_element(tail, est.local_indices.end());
    est.rho_hat = est.local_indices.back();
    est.residual = *hi - *lo;
    est.member = est.residual <= tolerance;
    return est;
}

IntegralRatio karamata_head_ratio(const ScalarFn& L, double x) {
    const auto r = quad::integrate_head(L, x);
    IntegralRatio out;
    out.integral = r.value;
    out.error = r.error;
    out.segments = r.segments;
    out.ratio = x * L(x) / r.value;
    return out;
}

IntegralRatio karamata_tail_ratio(const ScalarFn& L, double x) {
    const auto r = quad::integrate_tail(L, x);
    IntegralRatio out;
    out.integral = r.value;
    out.error = r.error;
    out.segments = r.segments;
    out.ratio = x * L(x) / r.value;
    return out;
}

AsympIntRatio asymp_int_ratio(const CoefficientH& h, double beta, double a, double b, double R) {
    if (!(a > 0.0) || !(b > a) || !std::isfinite(b)) throw DomainError("asymp_int_ratio: need 0 < a < b < inf");
    if (!(R > 0.0)) throw DomainError("asymp_int_ratio: R must be positive");
    const double k = beta * h.gamma;
    AsympIntRatio out;
    out.F = quad::integrate([&](double tau) { return std::pow(h(R * tau), beta); }, a, b).value;
    const double power_integral =
        std::fabs(k + 1.0) < 1e-14 ? std::log(b / a) : (std::pow(b, k + 1.0) - std::pow(a, k + 1.0)) / (k + 1.0);
    out.reference = std::pow(R, k) * std::pow(h.ell(R), beta) * power_integral;
    out.ratio = out.F / out.reference;
    return out;
}

UniformCheck uniform_convergence_check(const ScalarFn& L, double rho, double a, double b, double lambda,
                                       std::size_t samples) {
    if (!(a > 0.0) || !(b > a)) throw DomainError("uniform check: need 0 < a < b");
    if (!(lambda > 0.0)) throw DomainError("uniform check: lambda must be positive");
    if (samples < 512) throw ArgumentError("uniform check: need at least 512 samples");
    const double base = L(lambda);
    const auto sup_on = [&](std::size_t n) {
        double sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
            sup = std::max(sup, std::fabs(L(lambda * x) / base - std::pow(x, rho)));
        }
        return sup;
    };
    UniformCheck out;
    out.samples = samples;
    out.sup = sup_on(samples);
    out.sup_refined = sup_on(2 * samples - 1);
    return out;
}

}  // namespace mixlab::rvf
