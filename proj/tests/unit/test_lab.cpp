#include "mixlab/error.hpp"
#include "mixlab/lab/config.hpp"
#include "mixlab/lab/report.hpp"
#include "mixlab/lab/sweep.hpp"
#include "mixlab/lab/testfn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mixlab;
using namespace mixlab::lab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("mixlab_lab_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// Small, fast configuration: short horizon on a modest grid.
Json quick_config() {
    return resolve_config(Json::parse(R"({
        "grid": {"dim": 1, "half_width": 256, "points": 512},
        "time": {"horizon": 10, "steps": 200},
        "problem": {"p": 3, "u0": {"amplitude": 0.01}}
    })"));
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

}  // namespace

TEST(Config, DefaultsResolveAndEcho) {
    const Json cfg = resolve_config(Json::object());
    EXPECT_EQ(cfg, default_config());
    const auto spec = problem_from(cfg);
    EXPECT_NO_THROW(spec.validate());
    EXPECT_NO_THROW(time_from(cfg).validate());
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(resolve_config(Json::parse(R"({"grid": {"bogus": 1}})")), ConfigError);
    EXPECT_THROW(resolve_config(Json::parse(R"({"nonsense": {}})")), ConfigError);
    EXPECT_THROW(resolve_config(Json::object(), {"problem.nope=3"}), ConfigError);
    EXPECT_THROW(resolve_config(Json::object(), {"problem.p"}), ConfigError);
}

TEST(Config, OverridesParseJsonOrString) {
    const Json cfg = resolve_config(Json::object(), {"problem.p=2.5", "problem.u0.kind=bump", "run.convergence_check=false",
                                                     "sweep.axes={\"p\":[1.5,3]}"});
    EXPECT_EQ(cfg["problem"]["p"].get<double>(), 2.5);
    EXPECT_EQ(cfg["problem"]["u0"]["kind"].get<std::string>(), "bump");
    EXPECT_FALSE(cfg["run"]["convergence_check"].get<bool>());
    EXPECT_EQ(cfg["sweep"]["axes"]["p"].size(), 2u);
}

TEST(Config, ListReplacesRangeObject) {
    const Json cfg = resolve_config(Json::parse(R"({"testfn": {"R": [100, 200]}})"));
    const auto R = number_list(cfg["testfn"]["R"], "testfn.R");
    ASSERT_EQ(R.size(), 2u);
    EXPECT_EQ(R[1], 200.0);
}

TEST(Config, NumberListRanges) {
    const auto lin = number_list(Json::parse(R"({"start": 0, "stop": 1, "count": 5})"), "x");
    ASSERT_EQ(lin.size(), 5u);
    EXPECT_DOUBLE_EQ(lin[2], 0.5);
    const auto geo = number_list(Json::parse(R"({"start": 1, "stop": 1000, "count": 4, "geometric": true})"), "x");
    ASSERT_EQ(geo.size(), 4u);
    EXPECT_NEAR(geo[1], 10.0, 1e-12);
    EXPECT_EQ(geo.back(), 1000.0);
    EXPECT_THROW(number_list(Json("abc"), "x"), ConfigError);
}

TEST(Config, EchoRoundTripsToSameProblem) {
    const Json cfg = quick_config();
    const Json again = resolve_config(Json::parse(cfg.dump()));
    EXPECT_EQ(again, cfg);
    const auto a = sweep_from(cfg);
    const auto b = sweep_from(again);
    EXPECT_EQ(to_json(a.base), to_json(b.base));
    EXPECT_EQ(to_json(a.tgrid), to_json(b.tgrid));
}

TEST(Config, EllKinds) {
    for (const char* kind : {"constant", "log_power", "sin_log", "exp_sqrt_log", "log1p"}) {
        Json ell = default_config()["problem"]["ell"];
        ell["kind"] = kind;
        const auto spec = ell_from(ell);
        EXPECT_GT(spec(10.0), 0.0) << kind;
    }
    Json bad = default_config()["problem"]["ell"];
    bad["kind"] = "wavelet";
    EXPECT_THROW(ell_from(bad), ConfigError);
}

TEST(Sweep, EmptyAxesEqualsDirectEvolve) {
    const Json cfg = quick_config();
    const auto sc = sweep_from(cfg);
    ASSERT_TRUE(sc.axes.empty());
    const auto res = run_sweep(sc);
    ASSERT_EQ(res.rows.size(), 1u);
    ASSERT_FALSE(res.rows[0].skipped);
    const auto direct = duhamel::evolve(problem_from(cfg), time_from(cfg), run_options_from(cfg));
    EXPECT_EQ(res.rows[0].verdict.kind, direct.verdict.kind);
    EXPECT_EQ(res.rows[0].final_sup, direct.trajectory.sup.back());
    EXPECT_EQ(res.rows[0].trajectory.sup, direct.trajectory.sup);
}

TEST(Sweep, CartesianOrderLastAxisFastest) {
    Json cfg = quick_config();
    cfg["sweep"]["axes"] = Json::parse(R"({"amplitude": [0.01, 0.02], "p": [2.5, 3, 3.5]})");
    const auto sc = sweep_from(cfg);
    const auto res = run_sweep(sc);
    ASSERT_EQ(res.rows.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(res.rows[i].index, i);
        EXPECT_EQ(res.rows[i].params[0].second, i < 3 ? 0.01 : 0.02);
        EXPECT_EQ(res.rows[i].params[1].second, 2.5 + 0.5 * static_cast<double>(i % 3));
    }
}

TEST(Sweep, SkipAccounting) {
    Json cfg = quick_config();
    cfg["sweep"]["axes"] = Json::parse(R"({"p": [0.5, 2, 3], "s": [0.5, 1.5]})");
    const auto sc = sweep_from(cfg);
    const auto res = run_sweep(sc);
    EXPECT_EQ(res.tuples, 6u);
    std::size_t rows = 0, skips = 0;
    for (const auto& r : res.rows) {
        (r.skipped ? skips : rows) += 1;
        if (r.skipped) EXPECT_FALSE(r.skip_reason.empty());
    }
    EXPECT_EQ(skips, res.skipped);
    EXPECT_EQ(rows + skips, res.tuples);
    EXPECT_EQ(rows, 2u);  // p in {2, 3} with s = 0.5
}

TEST(Sweep, BoundaryFlagAtFujitaExponent) {
    Json cfg = quick_config();
    cfg["sweep"]["axes"] = Json::parse(R"({"p": [2, 3]})");
    const auto res = run_sweep(sweep_from(cfg));
    ASSERT_EQ(res.rows.size(), 2u);
    EXPECT_EQ(res.rows[0].p_F, 2.0);
    EXPECT_TRUE(res.rows[0].at_p_F);
    EXPECT_FALSE(res.rows[1].at_p_F);
}

TEST(Sweep, CsvDeterministicAcrossWorkerCounts) {
    Json cfg = quick_config();
    cfg["sweep"]["axes"] = Json::parse(R"({"p": [0.5, 2, 2.5, 3, 3.5]})");
    const auto dir = scratch_dir("det");
    std::string first;
    for (unsigned w : {1u, 3u, 5u}) {
        auto sc = sweep_from(cfg);
        sc.workers = w;
        const auto path = dir / ("agg" + std::to_string(w) + ".csv");
        write_sweep_csv(run_sweep(sc), sc, path.string());
        const auto bytes = slurp(path);
        ASSERT_FALSE(bytes.empty());
        EXPECT_EQ(bytes.front(), '#');
        if (first.empty()) first = bytes;
        EXPECT_EQ(bytes, first) << "workers=" << w;
    }
    fs::remove_all(dir);
}

TEST(Sweep, UnknownAxisRejected) {
    Json cfg = quick_config();
    cfg["sweep"]["axes"] = Json::parse(R"({"viscosity": [1, 2]})");
    EXPECT_THROW(sweep_from(cfg), ConfigError);
}

TEST(FujitaScan, DegenerateRefinementSingleStep) {
    Json cfg = resolve_config(Json::parse(R"({"problem": {"u0": {"amplitude": 0.5}}})"));
    const auto sc = sweep_from(cfg);
    const auto scan = fujita_transition_scan(sc.base, sc.tgrid, sc.options, 1.2, 4.0, 10.0);
    ASSERT_TRUE(scan.determined) << scan.status;
    EXPECT_EQ(scan.steps.size(), 3u);  // two endpoints and one bisection
    EXPECT_EQ(scan.steps[0].verdict.kind, duhamel::RunVerdict::Kind::BlowUp);
    EXPECT_EQ(scan.steps[1].verdict.kind, duhamel::RunVerdict::Kind::Global);
    EXPECT_LT(scan.p_lo, scan.p_hi);
    EXPECT_NEAR(scan.p_hi - scan.p_lo, 1.4, 1e-12);
}

TEST(FujitaScan, RejectsBadArguments) {
    const auto sc = sweep_from(quick_config());
    EXPECT_THROW(fujita_transition_scan(sc.base, sc.tgrid, sc.options, 1.0, 3.0, 0.1), ArgumentError);
    EXPECT_THROW(fujita_transition_scan(sc.base, sc.tgrid, sc.options, 2.0, 1.5, 0.1), ArgumentError);
    auto forced = sc.base;
    forced.w = {duhamel::FieldDescriptor::Kind::Bump, 1.0};
    EXPECT_THROW(fujita_transition_scan(forced, sc.tgrid, sc.options, 1.2, 3.0, 0.1), ArgumentError);
}

TEST(FujitaScan, NonBlowUpLowEndpointIsUndetermined) {
    const auto sc = sweep_from(quick_config());
    const auto scan = fujita_transition_scan(sc.base, sc.tgrid, sc.options, 3.0, 4.0, 0.1);
    EXPECT_FALSE(scan.determined);
    EXPECT_EQ(scan.status, "low endpoint is not BlowUp");
}

TEST(Cutoffs, QuinticBridge) {
    EXPECT_EQ(smoothstep5(0.0), 0.0);
    EXPECT_EQ(smoothstep5(1.0), 1.0);
    EXPECT_DOUBLE_EQ(smoothstep5(0.5), 0.5);
    EXPECT_EQ(smoothstep5_d1(0.0), 0.0);
    EXPECT_EQ(smoothstep5_d1(1.0), 0.0);
    const double h = 1e-6;
    for (double z : {0.1, 0.3, 0.7, 0.95}) {
        EXPECT_NEAR(smoothstep5_d1(z), (smoothstep5(z + h) - smoothstep5(z - h)) / (2 * h), 1e-8);
        EXPECT_NEAR(smoothstep5_d2(z), (smoothstep5_d1(z + h) - smoothstep5_d1(z - h)) / (2 * h), 1e-7);
    }
    // C^2 matching at the plateau ends
    EXPECT_NEAR(smoothstep5_d2(1e-9), 0.0, 1e-6);
    EXPECT_NEAR(smoothstep5_d2(1.0 - 1e-9), 0.0, 1e-6);
}

TEST(Cutoffs, PlateausAndSupports) {
    for (double r : {0.0, 0.5, 1.0}) EXPECT_EQ(phi_cutoff(r), 1.0);
    for (double r : {2.0, 2.5, 10.0}) EXPECT_EQ(phi_cutoff(r), 0.0);
    for (double t : {0.5, 0.6, 0.75}) EXPECT_EQ(eta_cutoff(t), 1.0);
    for (double t : {0.0, 0.2, 0.25, 0.8, 0.9, 2.0}) EXPECT_EQ(eta_cutoff(t), 0.0);
    for (double t : {0.3, 0.4, 0.77}) {
        EXPECT_GT(eta_cutoff(t), 0.0);
        EXPECT_LT(eta_cutoff(t), 1.0);
    }
}

namespace {

duhamel::ProblemSpec testfn_spec(double p, double rho, GridSpec grid = {1, 4096.0, 8192}) {
    duhamel::ProblemSpec spec;
    spec.s = 0.5;
    spec.p = p;
    spec.rho = rho;
    spec.w = {duhamel::FieldDescriptor::Kind::Bump, 1.0};
    spec.grid = grid;
    return spec;
}

TestFunctionSpec radii(double lo, double hi, int n) {
    TestFunctionSpec tf;
    for (int i = 0; i < n; ++i) tf.R.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return tf;
}

}  // namespace

TEST(TestFn, SlopesMatchScaling) {
    const auto res = testfn_experiment(testfn_spec(1.4, -0.5), radii(200, 1000, 6));
    EXPECT_NEAR(res.m, 7.0, 1e-12);
    EXPECT_NEAR(res.expected_bound, -1.5, 1e-12);
    EXPECT_NEAR(res.expected_lhs, 0.5, 1e-12);
    EXPECT_NEAR(res.slope_bound, res.expected_bound, 0.05 * std::fabs(res.expected_bound));
    EXPECT_NEAR(res.slope_lhs, res.expected_lhs, 0.05 * std::fabs(res.expected_lhs));
    EXPECT_LT(res.slope_gap, 0.0);
    EXPECT_NEAR(res.slope_generator, -1.0, 0.05);
}

TEST(TestFn, LhsMatchesQuadratureOracle) {
    // rho = 0: phi = 1 on the support of w, so LHS(R) = R^{2s} * int eta^m * int w
    const auto spec = testfn_spec(3.0, 0.0);
    const auto res = testfn_experiment(spec, radii(100, 800, 4));
    const double m = 3.0;
    const double time = simpson([m](double t) { return std::pow(eta_cutoff(t), m); }, 0.25, 0.5, 2000) +
                        simpson([m](double t) { return std::pow(eta_cutoff(t), m); }, 0.5, 0.75, 2000) +
                        simpson([m](double t) { return std::pow(eta_cutoff(t), m); }, 0.75, 0.8, 2000);
    const double wint = duhamel::make_field(spec.w, spec.grid).integral();
    for (const auto& row : res.rows) EXPECT_NEAR(row.LHS, row.R * time * wint, 1e-8 * row.LHS);
    EXPECT_NEAR(res.slope_lhs, 1.0, 1e-9);
}

TEST(TestFn, ForcingCapture) {
    const auto res = testfn_experiment(testfn_spec(1.4, -0.5), radii(4, 64, 5));
    for (const auto& row : res.rows) EXPECT_GE(row.w_capture, 0.5) << "R=" << row.R;
}

TEST(TestFn, StableUnderGridDoubling) {
    const auto a = testfn_experiment(testfn_spec(1.4, -0.5, {1, 4096.0, 8192}), radii(200, 1000, 5));
    const auto b = testfn_experiment(testfn_spec(1.4, -0.5, {1, 4096.0, 16384}), radii(200, 1000, 5));
    EXPECT_LT(std::fabs(a.slope_bound - b.slope_bound), 0.02);
    EXPECT_LT(std::fabs(a.slope_lhs - b.slope_lhs), 0.02);
    EXPECT_LT(std::fabs(a.slope_generator - b.slope_generator), 0.02);
}

TEST(TestFn, Errors) {
    EXPECT_THROW(testfn_experiment(testfn_spec(1.4, -0.5, {1, 256.0, 512}), radii(50, 100, 3)), DomainError);
    auto unforced = testfn_spec(1.4, -0.5);
    unforced.w = {};
    EXPECT_THROW(testfn_experiment(unforced, radii(50, 100, 3)), ArgumentError);
    EXPECT_THROW(testfn_experiment(testfn_spec(1.4, -0.5), radii(50, 50, 1)), ArgumentError);
}

TEST(Report, EmptyRunList) {
    const auto dir = scratch_dir("empty");
    emit_report(dir.string(), "kernel", default_config(), {}, Json::object(), 0.0);
    const Json s = Json::parse(slurp(dir / "summary.json"));
    EXPECT_EQ(s["run_count"], 0);
    EXPECT_TRUE(s["runs"].empty());
    EXPECT_EQ(s["config"], default_config());
    EXPECT_FALSE(s["version"].get<std::string>().empty());
    EXPECT_TRUE(s.contains("wall_clock_seconds"));
    fs::remove_all(dir);
}

TEST(Report, SingleEvolveRun) {
    const Json cfg = quick_config();
    const auto run = duhamel::evolve(problem_from(cfg), time_from(cfg), run_options_from(cfg));
    const auto dir = scratch_dir("single");
    emit_report(dir.string(), "evolve", cfg, {{"run", verdict_json(run, cfg), &run.trajectory}}, verdict_json(run.verdict),
                0.0);
    std::size_t csv = 0, verdicts = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.ends_with(".verdict.json")) ++verdicts;
        else if (name.ends_with(".csv")) ++csv;
    }
    EXPECT_EQ(csv, 1u);
    EXPECT_EQ(verdicts, 1u);
    EXPECT_EQ(slurp(dir / "run.csv").front(), '#');
    const Json v = Json::parse(slurp(dir / "run.verdict.json"));
    EXPECT_EQ(v["kind"], duhamel::verdict_name(run.verdict.kind));
    EXPECT_EQ(v["config"], cfg);
    fs::remove_all(dir);
}

TEST(Report, NineTupleSweepCardinality) {
    Json cfg = quick_config();
    cfg["sweep"]["axes"] = Json::parse(R"({"amplitude": [0.01, 0.02, 0.03], "p": [2.5, 3, 3.5]})");
    const auto sc = sweep_from(cfg);
    const auto res = run_sweep(sc);
    const auto dir = scratch_dir("nine");
    write_sweep_csv(res, sc, (dir / "aggregate.csv").string());
    std::vector<RunArtifact> arts;
    for (const auto& r : res.rows)
        arts.push_back({"row_" + std::to_string(r.index), verdict_json(r.verdict), &r.trajectory});
    emit_report(dir.string(), "sweep", cfg, arts, Json::object(), 0.0);
    std::size_t series = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.starts_with("row_") && name.ends_with(".csv")) ++series;
    }
    EXPECT_EQ(series, 9u);
    EXPECT_TRUE(fs::exists(dir / "aggregate.csv"));
    EXPECT_EQ(Json::parse(slurp(dir / "summary.json"))["run_count"], 9);
    fs::remove_all(dir);
}

TEST(Report, UnwritableDirectoryIsIoError) {
    EXPECT_THROW(emit_report("/proc/mixlab_no_such_dir", "kernel", default_config(), {}, Json::object(), 0.0), IoError);
}
