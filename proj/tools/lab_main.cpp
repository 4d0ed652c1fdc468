#include "mixlab/criteria.hpp"
#include "mixlab/duhamel.hpp"
#include "mixlab/error.hpp"
#include "mixlab/kernels.hpp"
#include "mixlab/lab/config.hpp"
#include "mixlab/lab/report.hpp"
#include "mixlab/lab/sweep.hpp"
#include "mixlab/lab/testfn.hpp"
#include "mixlab/rvf.hpp"
#include "mixlab/spectral.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace mixlab;
using lab::Json;

namespace {

std::string path_in(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir, "cannot create output directory: " + ec.message());
}

Json cmd_kernel(const Json& cfg, const std::string& out) {
    const Json& k = cfg.at("kernel");
    const auto mode = k.at("mode").get<std::string>();
    const double s = k.at("s").get<double>();
    const int dim = k.at("dim").get<int>();
    Json res = {{"mode", mode}};
    if (mode == "profile") {
        const auto radii = lab::number_list(k.at("radii"), "kernel.radii");
        const auto table = (s == 1.0) ? kernels::closed_form_table(s, dim, radii) : kernels::fractional_profile(s, dim, radii);
        kernels::write_profile_table(table, path_in(out, "profile.csv"));
        res["profile"] = "profile.csv";
        if (!radii.empty() && *std::max_element(radii.begin(), radii.end()) >= 20.0) {
            const auto b = kernels::verify_profile_bounds(table);
            res["bounds"] = {{"min_ratio", b.min_ratio}, {"max_ratio", b.max_ratio},   {"all_positive", b.all_positive},
                             {"bound_applies", b.bound_applies}, {"pass", b.pass}, {"note", b.note}};
        }
    } else if (mode == "mixed") {
        const auto radii = lab::number_list(k.at("radii"), "kernel.radii");
        const kernels::KernelParams kp{s, dim, k.at("t").get<double>()};
        const auto sym = spectral::parse_symbol(k.at("symbol").get<std::string>());
        const auto panels = k.at("panels").get<std::size_t>();
        const auto file = path_in(out, "mixed_kernel.csv");
        std::FILE* f = std::fopen(file.c_str(), "w");
        if (!f) throw IoError(file, "cannot open for writing");
        std::fprintf(f, "# mixlab mixed kernel s=%.17g dim=%d t=%.17g\n# columns: radius,value\nradius,value\n", s, dim, kp.t);
        for (double r : radii) std::fprintf(f, "%.17g,%.17g\n", r, kernels::mixed_kernel(kp, r, panels, sym));
        if (std::fclose(f) != 0) throw IoError(file, "write failed");
        res["series"] = "mixed_kernel.csv";
    } else if (mode == "field") {
        const auto grid = lab::grid_from(cfg);
        const auto sym = spectral::parse_symbol(k.at("symbol").get<std::string>());
        const auto field = kernels::mixed_kernel_field(grid, s, k.at("t").get<double>(), sym);
        spectral::write_field_csv(field, path_in(out, "kernel_field.csv"));
        res["field"] = "kernel_field.csv";
        res["mass"] = field.integral();
        res["sup"] = spectral::sup_norm(field);
    } else {
        throw ConfigError("config: kernel.mode must be profile, mixed or field");
    }
    return res;
}

Json cmd_criteria(const Json& cfg) {
    const Json& c = cfg.at("criteria");
    const auto rep = criteria::exponent_report(c.at("N").get<int>(), c.at("s").get<double>(), c.at("b").get<double>(),
                                               c.at("gamma").get<double>(), c.at("rho").get<double>(),
                                               c.at("p").get<double>());
    Json res = {{"exponents", criteria::to_json(rep)}};
    const bool blow = c.at("blowup").at("enabled").get<bool>();
    const bool glob = c.at("global").at("enabled").get<bool>();
    if (blow || glob) {
        const auto spec = lab::problem_from(cfg);
        const Field u0 = duhamel::make_field(spec.u0, spec.grid);
        if (blow) {
            const auto t0s = lab::number_list(c.at("blowup").at("t0"), "criteria.blowup.t0");
            res["blowup_certificate"] = criteria::to_json(criteria::blowup_certificate_scan(u0, spec.s, spec.h, spec.p, t0s));
        }
        if (glob) {
            criteria::GlobalCertificateOptions o;
            o.safety = c.at("global").at("safety").get<double>();
            res["global_certificate"] = criteria::to_json(
                criteria::global_certificate(u0, spec.s, spec.h, spec.p, c.at("global").at("t_split").get<double>(), o));
        }
    }
    return res;
}

Json cmd_rvf(const Json& cfg) {
    const Json& r = cfg.at("rvf");
    const auto ell = lab::ell_from(r.at("ell"));
    const auto xs = lab::number_list(r.at("x"), "rvf.x");
    const auto lambdas = lab::number_list(r.at("lambda"), "rvf.lambda");
    const double rho = r.at("rho").get<double>();
    Json res;
    res["ell"] = ell.describe();
    const auto ratio = rvf::slow_variation_ratio_test(ell, xs, lambdas);
    res["ratio_test"] = {{"x", ratio.x}, {"lambda", ratio.lambda}, {"ratio", ratio.ratio},
                         {"max_deviation_at_largest", ratio.max_deviation_at_largest}, {"pass", ratio.pass}};
    const rvf::CoefficientH h{rho, ell};
    const auto L = [h](double t) { return h(t); };
    const auto idx = rvf::index_estimate(L, lab::number_list(r.at("index_grid"), "rvf.index_grid"));
    res["index_estimate"] = {{"rho_hat", idx.rho_hat}, {"residual", idx.residual}, {"member", idx.member},
                             {"local_indices", idx.local_indices}};
    try {
        res["derivative_criterion"] = rvf::derivative_criterion(ell, r.at("head_x").get<double>());
    } catch (const UnsupportedKindError& e) {
        res["derivative_criterion"] = nullptr;
        res["derivative_note"] = e.what();
    }
    const auto head = rvf::karamata_head_ratio(L, r.at("head_x").get<double>());
    res["head_ratio"] = {{"ratio", head.ratio}, {"expected", rho + 1.0}, {"integral", head.integral}, {"error", head.error}};
    const double trho = r.at("tail_rho").get<double>();
    const rvf::CoefficientH ht{trho, ell};
    const auto tail = rvf::karamata_tail_ratio([ht](double t) { return ht(t); }, r.at("tail_x").get<double>());
    res["tail_ratio"] = {{"ratio", tail.ratio}, {"expected", -trho - 1.0}, {"integral", tail.integral}, {"error", tail.error}};
    const Json& a = r.at("asymp");
    const auto ai = rvf::asymp_int_ratio(h, a.at("beta").get<double>(), a.at("a").get<double>(), a.at("b").get<double>(),
                                         a.at("R").get<double>());
    res["asymp_int"] = {{"ratio", ai.ratio}, {"F", ai.F}, {"reference", ai.reference}};
    return res;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return 1;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ArgumentError*>(&e) ||
        dynamic_cast<const UnsupportedKindError*>(&e) || dynamic_cast<const DataError*>(&e) ||
        dynamic_cast<const nlohmann::json::exception*>(&e))
        return 2;
    if (dynamic_cast<const Error*>(&e)) return 3;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed local-nonlocal reaction-diffusion lab"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--set", overrides, "override key=value (dotted path)");
        sub->add_option("--out", out_dir, "output directory")->required();
    };
    for (const char* name : {"kernel", "evolve", "sweep", "criteria", "rvf", "testfn"}) {
        add_common(app.add_subcommand(name, std::string("run the ") + name + " command"));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    try {
        const Json cfg = lab::load_config(config_path, overrides);
        ensure_dir(out_dir);
        if (cmd == "kernel") {
            const Json res = cmd_kernel(cfg, out_dir);
            lab::emit_report(out_dir, cmd, cfg, {}, res, elapsed());
        } else if (cmd == "evolve") {
            const auto spec = lab::problem_from(cfg);
            const auto run = spec.w.is_zero()
                                 ? duhamel::evolve(spec, lab::time_from(cfg), lab::run_options_from(cfg))
                                 : duhamel::forced_evolve(spec, lab::time_from(cfg), lab::run_options_from(cfg));
            lab::emit_report(out_dir, cmd, cfg, {{"run", lab::verdict_json(run, cfg), &run.trajectory}},
                             lab::verdict_json(run.verdict), elapsed());
        } else if (cmd == "sweep") {
            const auto mode = cfg.at("sweep").at("mode").get<std::string>();
            const auto sc = lab::sweep_from(cfg);
            if (mode == "grid") {
                const auto result = lab::run_sweep(sc);
                lab::write_sweep_csv(result, sc, path_in(out_dir, "aggregate.csv"));
                std::vector<lab::RunArtifact> arts;
                Json skips = Json::array();
                const bool series = cfg.at("sweep").at("write_series").get<bool>();
                for (const auto& row : result.rows) {
                    char name[32];
                    std::snprintf(name, sizeof name, "row_%04zu", row.index);
                    Json params = Json::object();
                    for (const auto& [k, v] : row.params) params[k] = v;
                    if (row.skipped) {
                        skips.push_back({{"index", row.index}, {"params", params}, {"reason", row.skip_reason}});
                        continue;
                    }
                    Json v = lab::verdict_json(row.verdict);
                    v["params"] = params;
                    arts.push_back({name, v, series ? &row.trajectory : nullptr});
                }
                lab::emit_report(out_dir, cmd, cfg, arts,
                                 {{"aggregate", "aggregate.csv"}, {"tuples", result.tuples},
                                  {"rows", result.tuples - result.skipped}, {"skipped", skips}},
                                 elapsed());
            } else if (mode == "fujita_scan") {
                const Json& sc_cfg = cfg.at("sweep").at("scan");
                const auto scan = lab::fujita_transition_scan(sc.base, sc.tgrid, sc.options, sc_cfg.at("p_low").get<double>(),
                                                              sc_cfg.at("p_high").get<double>(),
                                                              sc_cfg.at("refinement").get<double>());
                lab::emit_report(out_dir, cmd, cfg, {}, lab::to_json(scan), elapsed());
            } else {
                throw ConfigError("config: sweep.mode must be 'grid' or 'fujita_scan'");
            }
        } else if (cmd == "criteria") {
            lab::emit_report(out_dir, cmd, cfg, {}, cmd_criteria(cfg), elapsed());
        } else if (cmd == "rvf") {
            lab::emit_report(out_dir, cmd, cfg, {}, cmd_rvf(cfg), elapsed());
        } else if (cmd == "testfn") {
            const auto res = lab::testfn_experiment(lab::problem_from(cfg), lab::testfn_from(cfg));
            lab::write_testfn_csv(res, path_in(out_dir, "testfn.csv"));
            lab::emit_report(out_dir, cmd, cfg, {}, lab::to_json(res), elapsed());
        }
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        if (const auto* io = dynamic_cast<const IoError*>(&e)) {
            std::cerr << "lab: I/O error at " << io->path() << ": " << e.what() << "\n";
        } else {
            std::cerr << "lab: " << e.what() << "\n";
        }
        return code;
    }
    return 0;
}
