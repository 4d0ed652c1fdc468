#include "mixlab/lab/config.hpp"

#include "mixlab/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mixlab::lab {

namespace {

// Objects whose keys are free-form (not checked against the defaults).
bool free_form(const std::string& path) { return path == "sweep.axes"; }

Json ell_default() { return {{"kind", "constant"}, {"value", 1.0}, {"alpha", 1.0}, {"path", ""}}; }

Json field_default(const std::string& kind, double amplitude) {
    return {{"kind", kind}, {"amplitude", amplitude}, {"width", 1.0}, {"separation", 4.0}};
}

void merge(Json& base, const Json& user, const std::string& path) {
    if (!user.is_object()) throw ConfigError("config: '" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) throw ConfigError("config: unknown key '" + key + "'");
        Json& slot = base[it.key()];
        if (slot.is_object() && it.value().is_object() && !free_form(key)) {
            merge(slot, it.value(), key);
        } else {
            slot = it.value();
        }
    }
}

template <class T>
T get(const Json& node, const char* key, const std::string& where) {
    try {
        return node.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: '" + where + "." + key + "' is missing or has the wrong type");
    }
}

}  // namespace

Json default_config() {
    Json c;
    c["grid"] = {{"dim", 1}, {"half_width", 4096.0}, {"points", 8192}};
    c["problem"] = {{"s", 0.5},
                    {"p", 3.0},
                    {"b", 0.0},
                    {"gamma", 0.0},
                    {"ell", ell_default()},
                    {"nonlinear", true},
                    {"rho", 0.0},
                    {"symbol", "mixed"},
                    {"delta", nullptr},
                    {"u0", field_default("gaussian", 1e-2)},
                    {"w", field_default("zero", 0.0)}};
    c["time"] = {{"horizon", 200.0}, {"steps", 4000}, {"spacing", "uniform"}, {"power", 2.0}};
    c["run"] = {{"threshold", nullptr}, {"wrap_guard", 1e-4}, {"convergence_check", true}, {"convergence_tolerance", 0.2}};
    c["sweep"] = {{"mode", "grid"},
                  {"axes", Json::object()},
                  {"workers", 0},
                  {"write_series", true},
                  {"scan", {{"p_low", 1.2}, {"p_high", 4.0}, {"refinement", 0.1}}}};
    c["kernel"] = {{"mode", "profile"},
                   {"s", 0.75},
                   {"dim", 1},
                   {"t", 1.0},
                   {"radii", {{"start", 0.0}, {"stop", 50.0}, {"count", 51}}},
                   {"panels", 2048},
                   {"symbol", "mixed"}};
    c["criteria"] = {{"N", 2},
                     {"s", 0.5},
                     {"b", 0.0},
                     {"gamma", 0.0},
                     {"rho", -0.5},
                     {"p", 3.0},
                     {"blowup", {{"enabled", false}, {"t0", Json::array({1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0})}}},
                     {"global", {{"enabled", false}, {"t_split", 10.0}, {"safety", 2.0}}}};
    c["rvf"] = {{"ell", ell_default()},
                {"x", Json::array({0.5, 2.0, 10.0})},
                {"lambda", Json::array({1e2, 1e4, 1e8, 1e16})},
                {"index_grid", {{"start", 10.0}, {"stop", 1e12}, {"count", 12}, {"geometric", true}}},
                {"rho", 0.0},
                {"head_x", 1e6},
                {"tail_rho", -2.0},
                {"tail_x", 1e6},
                {"asymp", {{"beta", 1.0}, {"a", 0.25}, {"b", 0.8}, {"R", 1e6}}}};
    c["testfn"] = {{"R", {{"start", 200.0}, {"stop", 1000.0}, {"count", 6}, {"geometric", true}}},
                   {"time_scaling", "R_to_2s"},
                   {"T", 1.0}};
    return c;
}

Json resolve_config(const Json& user, const std::vector<std::string>& overrides) {
    Json cfg = default_config();
    if (!user.is_null()) merge(cfg, user, "");
    for (const auto& o : overrides) apply_override(cfg, o);
    return cfg;
}

Json load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open config");
    Json user;
    try {
        user = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
    }
    return resolve_config(user, overrides);
}

void apply_override(Json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        value = text;
    }
    Json* node = &cfg;
    std::string path;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].empty()) throw ConfigError("--set: empty path component in '" + key + "'");
        const bool in_free = free_form(path);
        path = path.empty() ? parts[i] : path + "." + parts[i];
        if (!node->is_object()) throw ConfigError("--set: '" + path + "' is not inside an object");
        if (!in_free && !node->contains(parts[i])) throw ConfigError("--set: unknown key '" + path + "'");
        node = &(*node)[parts[i]];
    }
    *node = value;
}

std::vector<double> number_list(const Json& node, const std::string& what) {
    try {
        if (node.is_array()) return node.get<std::vector<double>>();
        if (node.is_number()) return {node.get<double>()};
        const double a = node.at("start").get<double>();
        const double b = node.at("stop").get<double>();
        const int n = node.at("count").get<int>();
        const bool geo = node.value("geometric", false);
        if (n < 1) throw ConfigError("config: '" + what + ".count' must be >= 1");
        if (geo && !(a > 0.0 && b > 0.0)) throw ConfigError("config: geometric '" + what + "' needs positive limits");
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) {
            const double q = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            v[i] = geo ? a * std::pow(b / a, q) : a + (b - a) * q;
        }
        return v;
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: '" + what + "' must be a list or {start, stop, count}");
    }
}

GridSpec grid_from(const Json& cfg) {
    const Json& g = cfg.at("grid");
    GridSpec out{get<int>(g, "dim", "grid"), get<double>(g, "half_width", "grid"), get<std::size_t>(g, "points", "grid")};
    try {
        out.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return out;
}

rvf::SlowlyVaryingSpec ell_from(const Json& ell) {
    const auto kind = get<std::string>(ell, "kind", "ell");
    if (kind == "constant") return rvf::SlowlyVaryingSpec::constant(get<double>(ell, "value", "ell"));
    if (kind == "log_power") return rvf::SlowlyVaryingSpec::log_power(get<double>(ell, "alpha", "ell"));
    if (kind == "sin_log") return rvf::SlowlyVaryingSpec::sin_log();
    if (kind == "exp_sqrt_log") return rvf::SlowlyVaryingSpec::exp_sqrt_log();
    if (kind == "log1p") return rvf::log1p_slowly_varying();
    if (kind == "tabulated") return rvf::load_tabulated_csv(get<std::string>(ell, "path", "ell"));
    throw ConfigError("config: unknown ell kind '" + kind + "'");
}

duhamel::FieldDescriptor field_from(const Json& f) {
    duhamel::FieldDescriptor d;
    try {
        d.kind = duhamel::parse_field_kind(get<std::string>(f, "kind", "field"));
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    d.amplitude = get<double>(f, "amplitude", "field");
    d.width = get<double>(f, "width", "field");
    d.separation = get<double>(f, "separation", "field");
    return d;
}

duhamel::ProblemSpec problem_from(const Json& cfg) {
    const Json& p = cfg.at("problem");
    duhamel::ProblemSpec spec;
    spec.grid = grid_from(cfg);
    spec.s = get<double>(p, "s", "problem");
    spec.p = get<double>(p, "p", "problem");
    spec.b = get<double>(p, "b", "problem");
    spec.h = {get<double>(p, "gamma", "problem"), ell_from(p.at("ell"))};
    spec.nonlinear = get<bool>(p, "nonlinear", "problem");
    spec.rho = get<double>(p, "rho", "problem");
    try {
        spec.symbol = spectral::parse_symbol(get<std::string>(p, "symbol", "problem"));
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!p.at("delta").is_null()) spec.delta = get<double>(p, "delta", "problem");
    spec.u0 = field_from(p.at("u0"));
    spec.w = field_from(p.at("w"));
    return spec;
}

duhamel::TimeGrid time_from(const Json& cfg) {
    const Json& t = cfg.at("time");
    duhamel::TimeGrid tg;
    tg.horizon = get<double>(t, "horizon", "time");
    tg.steps = get<std::size_t>(t, "steps", "time");
    const auto spacing = get<std::string>(t, "spacing", "time");
    if (spacing == "uniform") {
        tg.spacing = duhamel::TimeGrid::Spacing::Uniform;
    } else if (spacing == "graded") {
        tg.spacing = duhamel::TimeGrid::Spacing::Graded;
    } else {
        throw ConfigError("config: time.spacing must be 'uniform' or 'graded'");
    }
    tg.power = get<double>(t, "power", "time");
    try {
        tg.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return tg;
}

duhamel::RunOptions run_options_from(const Json& cfg) {
    const Json& r = cfg.at("run");
    duhamel::RunOptions o;
    if (!r.at("threshold").is_null()) o.threshold = get<double>(r, "threshold", "run");
    o.wrap_guard = get<double>(r, "wrap_guard", "run");
    o.convergence_check = get<bool>(r, "convergence_check", "run");
    o.convergence_tolerance = get<double>(r, "convergence_tolerance", "run");
    return o;
}

Json to_json(const GridSpec& g) { return {{"dim", g.dim}, {"half_width", g.half_width}, {"points", g.points}}; }

Json to_json(const duhamel::TimeGrid& tg) {
    return {{"horizon", tg.horizon},
            {"steps", tg.steps},
            {"spacing", tg.spacing == duhamel::TimeGrid::Spacing::Uniform ? "uniform" : "graded"},
            {"power", tg.power}};
}

Json to_json(const duhamel::ProblemSpec& spec) {
    const auto field = [](const duhamel::FieldDescriptor& d) {
        return Json{{"kind", duhamel::field_kind_name(d.kind)},
                    {"amplitude", d.amplitude},
                    {"width", d.width},
                    {"separation", d.separation}};
    };
    return {{"s", spec.s},
            {"p", spec.p},
            {"b", spec.b},
            {"gamma", spec.h.gamma},
            {"ell", spec.h.ell.describe()},
            {"nonlinear", spec.nonlinear},
            {"rho", spec.rho},
            {"symbol", spectral::symbol_name(spec.symbol)},
            {"delta", spec.resolved_delta()},
            {"u0", field(spec.u0)},
            {"w", field(spec.w)},
            {"grid", to_json(spec.grid)}};
}

}  // namespace mixlab::lab
