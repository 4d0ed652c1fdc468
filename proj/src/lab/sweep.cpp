#include "mixlab/lab/sweep.hpp"

#include "mixlab/criteria.hpp"
#include "mixlab/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace mixlab::lab {

SweepConfig sweep_from(const Json& cfg) {
    SweepConfig sc;
    sc.base = problem_from(cfg);
    sc.tgrid = time_from(cfg);
    sc.options = run_options_from(cfg);
    const Json& sweep = cfg.at("sweep");
    const Json& axes = sweep.at("axes");
    if (!axes.is_object()) throw ConfigError("config: sweep.axes must be an object");
    for (auto it = axes.begin(); it != axes.end(); ++it) {
        const auto& names = sweep_parameters();
        if (std::find(names.begin(), names.end(), it.key()) == names.end())
            throw ConfigError("config: sweep axis '" + it.key() + "' is not one of p, s, gamma, b, rho, amplitude");
        sc.axes.emplace_back(it.key(), number_list(it.value(), "sweep.axes." + it.key()));
    }
    try {
        sc.workers = sweep.at("workers").get<unsigned>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: sweep.workers must be a nonnegative integer");
    }
    return sc;
}

void set_parameter(duhamel::ProblemSpec& spec, const std::string& name, double value) {
    if (name == "p") spec.p = value;
    else if (name == "s") spec.s = value;
    else if (name == "gamma") spec.h.gamma = value;
    else if (name == "b") spec.b = value;
    else if (name == "rho") spec.rho = value;
    else if (name == "amplitude") spec.u0.amplitude = value;
    else throw ArgumentError("unknown sweep parameter '" + name + "'");
}

namespace {

bool same(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); }

SweepRow run_tuple(const SweepConfig& cfg, std::size_t index, const std::vector<std::pair<std::string, double>>& params) {
    SweepRow row;
    row.index = index;
    row.params = params;
    duhamel::ProblemSpec spec = cfg.base;
    try {
        for (const auto& [name, v] : params) set_parameter(spec, name, v);
        spec.validate();
        row.p_F = criteria::fujita_exponent(spec.grid.dim, spec.s, spec.h.gamma);
        row.at_p_F = same(spec.p, row.p_F);
        try {
            row.p_star = criteria::forced_exponent(spec.grid.dim, spec.s, spec.b, spec.h.gamma, spec.rho);
            row.at_p_star = same(spec.p, *row.p_star);
        } catch (const DomainError&) {
        }
        auto res = duhamel::evolve(spec, cfg.tgrid, cfg.options);
        row.verdict = res.verdict;
        row.final_sup = res.trajectory.sup.back();
        row.final_l1 = res.trajectory.l1.back();
        row.refined_final_sup = res.refined_final_sup;
        row.max_boundary_fraction = res.max_boundary_fraction;
        row.trajectory = std::move(res.trajectory);
    } catch (const Error& e) {
        row.skipped = true;
        row.skip_reason = e.what();
    }
    return row;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
    std::vector<std::vector<std::pair<std::string, double>>> tuples{{}};
    for (const auto& [name, values] : cfg.axes) {
        std::vector<std::vector<std::pair<std::string, double>>> next;
        for (const auto& t : tuples)
            for (double v : values) {
                auto u = t;
                u.emplace_back(name, v);
                next.push_back(std::move(u));
            }
        tuples = std::move(next);
    }

    SweepResult out;
    out.tuples = tuples.size();
    out.rows.resize(tuples.size());
    unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, tuples.size()));
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < tuples.size(); i = next++) out.rows[i] = run_tuple(cfg, i, tuples[i]);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& r : out.rows) out.skipped += r.skipped ? 1 : 0;
    return out;
}

void write_sweep_csv(const SweepResult& result, const SweepConfig& cfg, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError(path, "cannot open for writing");
    std::fprintf(f, "# mixlab sweep: %zu tuples, %zu rows, %zu skipped\n", result.tuples,
                 result.tuples - result.skipped, result.skipped);
    std::string header = "index";
    for (const auto& [name, values] : cfg.axes) header += "," + name;
    header += ",verdict,time,final_sup,final_l1,decay_slope,p_F,p_star,boundary_p_F,boundary_p_star,refined_final_sup,"
              "max_boundary_fraction,reason";
    std::fprintf(f, "# columns: %s\n%s\n", header.c_str(), header.c_str());
    for (const auto& r : result.rows) {
        if (r.skipped) continue;
        std::fprintf(f, "%zu", r.index);
        for (const auto& [name, v] : r.params) std::fprintf(f, ",%.17g", v);
        std::fprintf(f, ",%s,%.17g,%.17g,%.17g,%.17g,%.17g,", duhamel::verdict_name(r.verdict.kind).c_str(),
                     r.verdict.time, r.final_sup, r.final_l1, r.verdict.decay_slope, r.p_F);
        if (r.p_star) std::fprintf(f, "%.17g", *r.p_star);
        std::fprintf(f, ",%d,%d,", r.at_p_F ? 1 : 0, r.at_p_star ? 1 : 0);
        if (r.refined_final_sup) std::fprintf(f, "%.17g", *r.refined_final_sup);
        std::fprintf(f, ",%.17g,%s\n", r.max_boundary_fraction, r.verdict.reason.c_str());
    }
    if (std::fclose(f) != 0) throw IoError(path, "write failed");
}

double FujitaScan::distance_to_p_F() const {
    if (contains_p_F()) return 0.0;
    return p_F < p_lo ? p_lo - p_F : p_F - p_hi;
}

FujitaScan fujita_transition_scan(const duhamel::ProblemSpec& base, const duhamel::TimeGrid& tgrid,
                                  const duhamel::RunOptions& options, double p_low, double p_high,
                                  double refinement) {
    if (!(p_low > 1.0) || !(p_high > p_low)) throw ArgumentError("fujita scan: need 1 < p_low < p_high");
    if (!(refinement > 0.0)) throw ArgumentError("fujita scan: refinement must be positive");
    if (!base.w.is_zero()) throw ArgumentError("fujita scan: the problem must be unforced");
    FujitaScan scan;
    scan.p_F = criteria::fujita_exponent(base.grid.dim, base.s, base.h.gamma);
    const auto eval = [&](double p) {
        ScanStep st;
        st.p = p;
        duhamel::ProblemSpec spec = base;
        spec.p = p;
        try {
            st.verdict = duhamel::evolve(spec, tgrid, options).verdict;
        } catch (const ResolutionError& e) {
            st.verdict.kind = duhamel::RunVerdict::Kind::Undetermined;
            st.verdict.reason = "step halving failed";
            st.note = e.what();
        }
        scan.steps.push_back(st);
        return st.verdict.kind;
    };
    using K = duhamel::RunVerdict::Kind;
    scan.p_lo = p_low;
    scan.p_hi = p_high;
    if (eval(p_low) != K::BlowUp) {
        scan.status = "low endpoint is not BlowUp";
        return scan;
    }
    if (eval(p_high) != K::Global) {
        scan.status = "high endpoint is not Global";
        return scan;
    }
    do {
        const double mid = 0.5 * (scan.p_lo + scan.p_hi);
        const K k = eval(mid);
        if (k == K::BlowUp) {
            scan.p_lo = mid;
        } else if (k == K::Global) {
            scan.p_hi = mid;
        } else {
            scan.status = "undetermined verdict at p=" + std::to_string(mid) + ": " + scan.steps.back().verdict.reason;
            return scan;
        }
    } while (scan.p_hi - scan.p_lo > refinement);
    scan.determined = true;
    scan.status = "bracketed";
    return scan;
}

Json to_json(const FujitaScan& scan) {
    Json steps = Json::array();
    for (const auto& s : scan.steps)
        steps.push_back({{"p", s.p},
                         {"verdict", duhamel::verdict_name(s.verdict.kind)},
                         {"time", s.verdict.time},
                         {"reason", s.verdict.reason},
                         {"note", s.note}});
    return {{"p_F", scan.p_F},
            {"p_lo", scan.p_lo},
            {"p_hi", scan.p_hi},
            {"determined", scan.determined},
            {"status", scan.status},
            {"contains_p_F", scan.contains_p_F()},
            {"distance_to_p_F", scan.distance_to_p_F()},
            {"steps", steps}};
}

}  // namespace mixlab::lab
