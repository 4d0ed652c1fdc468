#include "mixlab/error.hpp"
#include "mixlab/rvf.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

using namespace mixlab::rvf;
using mixlab::DomainError;

namespace {

// Composite Simpson rule, used as an oracle independent of the library quadrature.
template <class F>
double simpson(F f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

std::vector<double> geometric(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return v;
}

}  // namespace

TEST(EvalH, Examples) {
    EXPECT_DOUBLE_EQ(eval_h({0.0, SlowlyVaryingSpec::constant(1.0)}, 7.0), 1.0);
    EXPECT_DOUBLE_EQ(eval_h({2.0, SlowlyVaryingSpec::sin_log()}, 1.0), 2.0);
    EXPECT_NEAR(eval_h({1.0, SlowlyVaryingSpec::log_power(1.0)}, M_E), M_E, 1e-15);
    EXPECT_THROW(eval_h({0.0, {}}, 0.0), DomainError);
    EXPECT_THROW(eval_h({0.0, {}}, -1.0), DomainError);
}

TEST(SlowlyVarying, EvaluationsPositive) {
    const std::vector<SlowlyVaryingSpec> kinds{SlowlyVaryingSpec::constant(3.0), SlowlyVaryingSpec::log_power(-2.0),
                                               SlowlyVaryingSpec::sin_log(), SlowlyVaryingSpec::exp_sqrt_log(),
                                               log1p_slowly_varying()};
    for (const auto& l : kinds) {
        for (double t : geometric(1e-8, 1e12, 41)) {
            const double v = l(t);
            EXPECT_TRUE(std::isfinite(v) && v > 0.0) << l.describe() << " t=" << t;
        }
    }
}

TEST(SlowlyVarying, TabulatedValidation) {
    EXPECT_THROW(SlowlyVaryingSpec::tabulated({{1.0, 1.0}, {1.0, 2.0}}), mixlab::ArgumentError);
    EXPECT_THROW(SlowlyVaryingSpec::tabulated({{1.0, -1.0}}), mixlab::ArgumentError);
    const auto tab = SlowlyVaryingSpec::tabulated({{1.0, 1.0}, {100.0, 4.0}});
    EXPECT_DOUBLE_EQ(tab(0.5), 1.0);
    EXPECT_DOUBLE_EQ(tab(1e6), 4.0);
    EXPECT_NEAR(tab(10.0), 2.0, 1e-14);  // geometric midpoint in log-log
}

TEST(SlowlyVarying, TabulatedCsvRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "mixlab_tab_test.csv";
    {
        std::ofstream out(path);
        out << "t,value\n1,2\n10,3\n100,5\n";
    }
    const auto tab = load_tabulated_csv(path.string());
    EXPECT_DOUBLE_EQ(tab(10.0), 3.0);
    std::filesystem::remove(path);
    EXPECT_THROW(load_tabulated_csv("/nonexistent/dir/x.csv"), mixlab::IoError);
}

TEST(Representation, Log1pMatchesClosedForm) {
    const auto l = log1p_slowly_varying();
    for (double t : geometric(1e-3, 1e15, 37)) EXPECT_NEAR(l(t) / std::log1p(t), 1.0, 1e-9) << t;
}

TEST(Representation, ZeroEpsIsC) {
    RepresentationSpec one{1.0, [](double) { return 1.0; }, 1.0, [](double) { return 0.0; }, "one"};
    const auto l = make_from_representation(one);
    EXPECT_DOUBLE_EQ(l(0.3), 1.0);
    EXPECT_DOUBLE_EQ(l(1e9), 1.0);

    RepresentationSpec c{1.0, [](double x) { return 2.0 + 1.0 / x; }, 2.0, [](double) { return 0.0; }, "c"};
    const auto l2 = make_from_representation(c);
    const auto table = slow_variation_ratio_test(l2, {0.5, 2.0, 10.0}, {1e2, 1e4, 1e8});
    EXPECT_TRUE(table.pass);
    EXPECT_LT(table.max_deviation_at_largest, 1e-8);
}

TEST(Representation, EpsOverLogIsSlowlyVarying) {
    RepresentationSpec spec{1.0, [](double) { return 1.0; }, 1.0,
                            [](double t) { return 1.0 / std::log(M_E + t); }, "eps_log"};
    const auto l = make_from_representation(spec);
    // oracle: Simpson in u = log t of eps(e^u)
    const auto oracle = [](double x) {
        return std::exp(simpson([](double u) { return 1.0 / std::log(M_E + std::exp(u)); }, 0.0, std::log(x), 20000));
    };
    for (double x : {0.5, 3.0, 1e3, 1e8}) EXPECT_NEAR(l(x) / oracle(x), 1.0, 1e-8) << x;
    // ell grows like log x here, so ell(10 lam)/ell(lam) - 1 ~ log 10 / log lam
    const auto table = slow_variation_ratio_test(l, {0.5, 2.0, 10.0}, {1e6, 1e10, 1e30}, 0.05);
    EXPECT_TRUE(table.pass);
    EXPECT_LT(table.ratio[2][2] - 1.0, table.ratio[1][2] - 1.0);
}

TEST(Representation, ConcurrentEvaluationIsConsistent) {
    const auto l = log1p_slowly_varying();
    std::vector<double> results(8);
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) threads.emplace_back([&, i] { results[i] = l(1e12 + i); });
    for (auto& t : threads) t.join();
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(results[i] / std::log1p(1e12 + i), 1.0, 1e-9);
}

TEST(Representation, InvalidSpecsRejected) {
    RepresentationSpec bad{1.0, [](double) { return 1.0; }, 0.0, [](double) { return 0.0; }, "bad"};
    EXPECT_THROW(make_from_representation(bad), mixlab::ArgumentError);
    bad.c_limit = 1.0;
    bad.a_lower = -1.0;
    EXPECT_THROW(make_from_representation(bad), mixlab::ArgumentError);
}

TEST(RatioTest, ConstantExactlyOne) {
    const auto t = slow_variation_ratio_test(SlowlyVaryingSpec::constant(5.0), {0.1, 2.0, 7.0}, {1.0, 1e3, 1e9});
    for (const auto& row : t.ratio)
        for (double r : row) EXPECT_EQ(r, 1.0);
    EXPECT_TRUE(t.pass);
}

TEST(RatioTest, LogPowerValue) {
    const auto t = slow_variation_ratio_test(SlowlyVaryingSpec::log_power(1.0), {2.0}, {1e6});
    EXPECT_NEAR(t.ratio[0][0], std::log(2e6) / std::log(1e6), 1e-14);
    EXPECT_NEAR(t.ratio[0][0], 1.0502, 1e-4);
}

TEST(RatioTest, SinLogDoesNotConverge) {
    // oracle: dense sampling of (2 + sin(log lambda + log 2)) / (2 + sin(log lambda))
    double worst = 0.0;
    for (double u = std::log(1e6); u < std::log(1e12); u += 1e-3)
        worst = std::max(worst, std::fabs((2 + std::sin(u + std::log(2.0))) / (2 + std::sin(u)) - 1.0));
    EXPECT_GT(worst, 0.3);
    // a lambda near the oscillation's worst phase fails the 0.05 tolerance
    const double lam = std::exp(2.0 * M_PI * 3 + M_PI);  // sin(log lam) = 0, descending
    const auto t = slow_variation_ratio_test(SlowlyVaryingSpec::sin_log(), {2.0}, {1e3, lam});
    EXPECT_FALSE(t.pass);
    EXPECT_NEAR(t.ratio[1][0], (2 + std::sin(std::log(lam) + std::log(2.0))) / (2 + std::sin(std::log(lam))), 1e-12);
}

TEST(RatioTest, Errors) {
    EXPECT_THROW(slow_variation_ratio_test(SlowlyVaryingSpec::constant(1.0), {}, {1.0}), mixlab::ArgumentError);
    EXPECT_THROW(slow_variation_ratio_test(SlowlyVaryingSpec::constant(1.0), {1.0}, {}), mixlab::ArgumentError);
    EXPECT_THROW(slow_variation_ratio_test(SlowlyVaryingSpec::constant(1.0), {1.0}, {2.0, 1.0}),
                 mixlab::ArgumentError);
}

TEST(RatioTest, SlowlyVaryingKindsConvergePastE8) {
    // deviations shrink monotonically once lambda passes 1e8; log-type factors reach 1% only
    // when log 10 / log lambda < 0.01, i.e. lambda beyond 1e100
    const std::vector<SlowlyVaryingSpec> kinds{SlowlyVaryingSpec::constant(2.0), SlowlyVaryingSpec::log_power(0.1),
                                               SlowlyVaryingSpec::log_power(-0.1), SlowlyVaryingSpec::log_power(1.0),
                                               log1p_slowly_varying()};
    const std::vector<double> lambdas{1e8, 1e16, 1e50, 1e120};
    for (const auto& l : kinds) {
        const auto t = slow_variation_ratio_test(l, {0.5, 2.0, 10.0}, lambdas, 0.01);
        EXPECT_TRUE(t.pass) << l.describe() << " dev=" << t.max_deviation_at_largest;
        for (std::size_t i = 1; i < lambdas.size(); ++i)
            for (std::size_t j = 0; j < 3; ++j)
                EXPECT_LE(std::fabs(t.ratio[i][j] - 1.0), std::fabs(t.ratio[i - 1][j] - 1.0) + 1e-15);
    }
}

TEST(DerivativeCriterion, Examples) {
    EXPECT_EQ(derivative_criterion(SlowlyVaryingSpec::constant(3.0), 10.0), 0.0);
    EXPECT_NEAR(derivative_criterion(SlowlyVaryingSpec::log_power(1.0), std::exp(4.0)), 0.25, 1e-15);
    const double x = std::exp(16.0);
    const double v = derivative_criterion(SlowlyVaryingSpec::exp_sqrt_log(), x);
    EXPECT_NEAR(v, 0.125, 1e-15);
    // central finite difference in log x of log ell
    const auto l = SlowlyVaryingSpec::exp_sqrt_log();
    const double hstep = 1e-4;
    const double fd = (std::log(l(x * std::exp(hstep))) - std::log(l(x * std::exp(-hstep)))) / (2 * hstep);
    EXPECT_NEAR(v, fd, 1e-7);
}

TEST(DerivativeCriterion, UnsupportedKinds) {
    EXPECT_THROW(derivative_criterion(SlowlyVaryingSpec::sin_log(), 2.0), mixlab::UnsupportedKindError);
    EXPECT_THROW(derivative_criterion(log1p_slowly_varying(), 2.0), mixlab::UnsupportedKindError);
}

TEST(IndexEstimate, PurePowerExact) {
    const auto est = index_estimate([](double t) { return std::pow(t, -0.5); }, geometric(10.0, 1e8, 8));
    for (double r : est.local_indices) EXPECT_NEAR(r, -0.5, 1e-14);
    EXPECT_NEAR(est.residual, 0.0, 1e-14);
    EXPECT_TRUE(est.member);
}

TEST(IndexEstimate, OscillatingFactorInM2) {
    const auto est = index_estimate([](double t) { return t * t * (2 + std::sin(std::log(t))); },
                                    geometric(1e10, 1e100, 10), 0.05);
    EXPECT_NEAR(est.rho_hat, 2.0, 0.01);
    EXPECT_TRUE(est.member);
}

TEST(IndexEstimate, ErrorEqualsAnalyticLogRatio) {
    // rho_hat - rho = log ell(x) / log x, exactly
    for (double alpha : {-1.0, 0.5, 2.0}) {
        const auto l = SlowlyVaryingSpec::log_power(alpha);
        const auto grid = geometric(1e3, 1e30, 6);
        const auto est = index_estimate([&](double t) { return std::pow(t, 1.5) * l(t); }, grid);
        const double x = grid.back();
        EXPECT_NEAR(est.rho_hat - 1.5, alpha * std::log(std::log(x)) / std::log(x), 1e-12);
    }
    const auto grid = geometric(1e3, 1e30, 6);
    const auto est = index_estimate([](double t) { return std::exp(std::sqrt(std::log(t))); }, grid);
    EXPECT_NEAR(est.rho_hat, 1.0 / std::sqrt(std::log(grid.back())), 1e-12);
    // the residual decays only like (log x)^(-1/2)
    EXPECT_GT(est.residual, 0.01);
}

TEST(IndexEstimate, TwoOverLogBoundWhereItHolds) {
    // |log ell / log x| <= 2 / log x  iff  |log ell| <= 2: LogPower(1) up to x = e^{e^2}
    const auto l = SlowlyVaryingSpec::log_power(1.0);
    const auto grid = geometric(10.0, std::exp(std::exp(2.0)) * 0.999, 5);
    const auto est = index_estimate([&](double t) { return t * l(t); }, grid);
    EXPECT_LE(std::fabs(est.rho_hat - 1.0), 2.0 / std::log(grid.back()));
}

TEST(IndexEstimate, Preconditions) {
    auto f = [](double t) { return t; };
    EXPECT_THROW(index_estimate(f, {2, 3, 4}), mixlab::ArgumentError);
    EXPECT_THROW(index_estimate(f, {0.5, 2, 3, 4}), DomainError);
}

TEST(Karamata, HeadPurePowersExact) {
    for (double rho : {-0.5, 0.0, 1.0, 2.0}) {
        for (double x : {0.01, 1.0, 5.0, 100.0, 1e6}) {
            const auto r = karamata_head_ratio([rho](double t) { return std::pow(t, rho); }, x);
            EXPECT_NEAR(r.ratio, rho + 1.0, 1e-10) << rho << " " << x;
        }
    }
}

TEST(Karamata, HeadLogFactorMatchesClosedForms) {
    const double x = 1e6;
    const double l = std::log1p(x);
    const double s = std::sqrt(x);
    struct Case {
        double rho;
        double integral;
    };
    const Case cases[] = {
        {-0.5, 2 * s * l - 4 * s + 4 * std::atan(s)},
        {0.0, (1 + x) * l - x},
        {1.0, (x * x - 1) / 2 * l - x * x / 4 + x / 2},
    };
    for (const auto& c : cases) {
        const auto r = karamata_head_ratio([&](double t) { return std::pow(t, c.rho) * std::log1p(t); }, x);
        const double oracle = x * std::pow(x, c.rho) * l / c.integral;
        EXPECT_NEAR(r.ratio / oracle, 1.0, 1e-8) << c.rho;
        // approaches rho+1 from above, only logarithmically
        EXPECT_GT(r.ratio, c.rho + 1.0);
    }
}

TEST(Karamata, TailPurePowers) {
    EXPECT_NEAR(karamata_tail_ratio([](double t) { return std::pow(t, -3.0); }, 10.0).ratio, 2.0, 1e-6);
    EXPECT_NEAR(karamata_tail_ratio([](double t) { return std::pow(t, -2.0); }, 4.0).ratio, 1.0, 1e-6);
    for (double rho : {-1.5, -2.0, -3.0}) {
        const auto r = karamata_tail_ratio([rho](double t) { return std::pow(t, rho); }, 7.0);
        EXPECT_NEAR(r.ratio, -rho - 1.0, 1e-6) << rho;
    }
}

TEST(Karamata, TailLogFactorMatchesClosedForm) {
    const double x = 1e4;
    const auto r = karamata_tail_ratio([](double t) { return std::log(t) / (t * t * t); }, x);
    const double lx = std::log(x);
    EXPECT_NEAR(r.ratio, lx / (lx / 2 + 0.25), 1e-6);
}

TEST(Karamata, DivergentTailIsDomainError) {
    EXPECT_THROW(karamata_tail_ratio([](double t) { return 1.0 / t; }, 2.0), DomainError);
}

TEST(AsympInt, PurePowerIsExact) {
    for (double gamma : {-0.5, 0.0, 1.0}) {
        for (double beta : {-1.0, 1.0, 2.0}) {
            const auto r = asymp_int_ratio({gamma, SlowlyVaryingSpec::constant(1.0)}, beta, 0.25, 0.8, 1e3);
            EXPECT_NEAR(r.ratio, 1.0, 1e-10) << gamma << " " << beta;
        }
    }
}

TEST(AsympInt, LogFactorAgainstSimpson) {
    const CoefficientH h{1.0, log1p_slowly_varying()};
    const double R = 1e6;
    const auto r = asymp_int_ratio(h, -1.0, 0.25, 0.8, R);
    const double F = simpson([&](double tau) { return 1.0 / (R * tau * std::log1p(R * tau)); }, 0.25, 0.8, 4000);
    EXPECT_NEAR(r.F / F, 1.0, 1e-9);
    const double ref = std::pow(R, -1.0) / std::log1p(R) * std::log(0.8 / 0.25);
    EXPECT_NEAR(r.ratio, F / ref, 1e-9);
    // decreasing toward 1 in R
    const auto r9 = asymp_int_ratio(h, -1.0, 0.25, 0.8, 1e9);
    EXPECT_LT(r9.ratio, r.ratio);
    EXPECT_GT(r9.ratio, 1.0);
}

TEST(AsympInt, SinLogOscillates) {
    const CoefficientH h{1.0, SlowlyVaryingSpec::sin_log()};
    double lo = 1e9, hi = -1e9;
    for (double u = std::log(1e6); u < std::log(1e6) + 2 * M_PI; u += 0.1) {
        const double r = asymp_int_ratio(h, 1.0, 0.25, 0.8, std::exp(u)).ratio;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    EXPECT_GT(hi - lo, 0.1);
}

TEST(UniformConvergence, PurePowerZero) {
    const auto r = uniform_convergence_check([](double x) { return std::pow(x, 1.3); }, 1.3, 0.5, 2.0, 1e5);
    EXPECT_LT(r.sup, 1e-13);
}

TEST(UniformConvergence, XLog1p) {
    const auto L = [](double x) { return x * std::log1p(x); };
    const auto r = uniform_convergence_check(L, 1.0, 0.5, 2.0, 1e6);
    double oracle = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double x = 0.5 + 1.5 * i / 20000.0;
        oracle = std::max(oracle, std::fabs(L(1e6 * x) / L(1e6) - x));
    }
    EXPECT_NEAR(r.sup, oracle, 1e-6);
    EXPECT_LT(r.sup, 0.12);
    EXPECT_NEAR(r.sup, r.sup_refined, 1e-6);
    EXPECT_LT(uniform_convergence_check(L, 1.0, 0.5, 2.0, 1e9).sup, r.sup);
}

TEST(UniformConvergence, SinLogBoundedAway) {
    const auto L = [](double x) { return x * x * (2 + std::sin(std::log(x))); };
    for (double lam : {1e4, 1e8, 1e12, 1e16}) EXPECT_GT(uniform_convergence_check(L, 2.0, 0.5, 2.0, lam).sup, 0.1);
}

TEST(UniformConvergence, TooFewSamples) {
    EXPECT_THROW(uniform_convergence_check([](double x) { return x; }, 1.0, 0.5, 2.0, 10.0, 100),
                 mixlab::ArgumentError);
}

TEST(AsymptoticMonotoneLimit, PowerTimesSlowlyVaryingEventuallySmall) {
    // x^alpha ell(x)^beta for alpha < 0 falls below 1e-6 and stays there on a geometric grid to 1e10
    for (double alpha : {-1.0, -2.0}) {
        for (double beta : {-1.0, 1.0, 2.0}) {
            for (const auto& l : {SlowlyVaryingSpec::log_power(1.0), log1p_slowly_varying()}) {
                const auto grid = geometric(1e3, 1e10, 200);
                bool below = false;
                for (double x : grid) {
                    const double v = std::pow(x, alpha) * std::pow(l(x), beta);
                    if (below) EXPECT_LT(v, 1e-6);
                    below = below || v < 1e-6;
                }
                EXPECT_TRUE(below) << alpha << " " << beta;
            }
        }
    }
}
