#include "mixlab/spectral.hpp"

#include "mixlab/error.hpp"
#include "mixlab/simd.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace mixlab::spectral {

Symbol parse_symbol(const std::string& name) {
    if (name == "mixed") return Symbol::Mixed;
    if (name == "heat") return Symbol::PureHeat;
    if (name == "fractional") return Symbol::PureFractional;
    throw ArgumentError("unknown symbol '" + name + "' (expected mixed, heat or fractional)");
}

std::string symbol_name(Symbol sym) {
    switch (sym) {
        case Symbol::Mixed: return "mixed";
        case Symbol::PureHeat: return "heat";
        case Symbol::PureFractional: return "fractional";
    }
    return "mixed";
}

double symbol_value(Symbol sym, double s, double xi) {
    const double local = xi * xi;
    switch (sym) {
        case Symbol::PureHeat: return local;
        case Symbol::PureFractional: return std::pow(xi, 2.0 * s);
        case Symbol::Mixed: break;
    }
    return local + std::pow(xi, 2.0 * s);
}

// ---------------------------------------------------------------------------

Workspace::Workspace(const GridSpec& grid) : grid_(grid), fft_((grid.validate(), grid.dim), grid.points) {
    const std::size_t m = grid.points;
    const double k0 = grid.frequency_step();
    const auto signed_index = [m](std::size_t i) {
        return i < m / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(m);
    };
    xi_.resize(fft_.complex_count());
    if (grid.dim == 1) {
        for (std::size_t k = 0; k < xi_.size(); ++k) xi_[k] = k0 * static_cast<double>(k);
    } else {
        const std::size_t half = m / 2 + 1;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = k0 * signed_index(i);
            for (std::size_t j = 0; j < half; ++j) {
                const double b = k0 * static_cast<double>(j);
                xi_[i * half + j] = std::sqrt(a * a + b * b);
            }
        }
    }
}

std::vector<double> Workspace::multiplier(const std::function<double(double)>& m) const {
    std::vector<double> out(xi_.size());
    std::transform(xi_.begin(), xi_.end(), out.begin(), m);
    return out;
}

std::vector<double> Workspace::semigroup_multiplier(double s, double t, Symbol sym) const {
    if (t < 0.0) throw DomainError("semigroup: t must be nonnegative");
    return multiplier([=](double xi) { return std::exp(-t * symbol_value(sym, s, xi)); });
}

void Workspace::apply(std::span<const double> in, std::span<double> out, std::span<const double> multiplier) {
    if (in.size() != fft_.real_count() || out.size() != fft_.real_count() || multiplier.size() != xi_.size()) {
        throw ArgumentError("spectral apply: buffer size does not match grid");
    }
    auto real = fft_.real();
    std::copy(in.begin(), in.end(), real.begin());
    fft_.forward();
    simd::scale_complex(fft_.spectrum(), multiplier);
    fft_.inverse();
    std::copy(real.begin(), real.end(), out.begin());
    simd::scale(out, 1.0 / static_cast<double>(fft_.real_count()));
}

// ---------------------------------------------------------------------------

void check_same_grid(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw ArgumentError("grid mismatch: " + a.grid.describe() + " vs " + b.grid.describe());
}

Field apply_multiplier(const Field& f, const std::function<double(double)>& m) {
    Workspace ws(f.grid);
    Field out(f.grid);
    ws.apply(f.values, out.values, ws.multiplier(m));
    return out;
}

Field apply_semigroup(const Field& f, double s, double t, Symbol sym) {
    if (t < 0.0) throw DomainError("semigroup: t must be nonnegative");
    if (t == 0.0) return f;
    Workspace ws(f.grid);
    Field out(f.grid);
    ws.apply(f.values, out.values, ws.semigroup_multiplier(s, t, sym));
    return out;
}

Field apply_fractional_laplacian(const Field& f, double s) {
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("fractional Laplacian: s must lie in (0, 1]");
    return apply_multiplier(f, [s](double xi) { return std::pow(xi, 2.0 * s); });
}

Field apply_generator(const Field& f, double s) {
    return apply_multiplier(f, [s](double xi) { return -symbol_value(Symbol::Mixed, s, xi); });
}

double sup_norm(const Field& f) {
    if (f.diverged) return std::numeric_limits<double>::infinity();
    return simd::max_abs(f.values);
}

double lp_norm(const Field& f, double r) {
    if (!(r >= 1.0)) throw ArgumentError("lp_norm: exponent must be >= 1");
    if (std::isinf(r)) return sup_norm(f);
    const double dv = f.grid.cell_volume();
    if (r == 1.0) return simd::sum_abs(f.values) * dv;
    if (r == 2.0) return std::sqrt(simd::sum_sq(f.values) * dv);
    return std::pow(simd::sum_abs_pow(f.values, r) * dv, 1.0 / r);
}

namespace {

bool in_boundary_band(const GridSpec& g, std::size_t i) {
    const std::size_t m = g.points;
    const auto near = [m](std::size_t k) { return k < 2 || k + 2 >= m; };
    if (g.dim == 1) return near(i);
    return near(i / m) || near(i % m);
}

}  // namespace

double boundary_mass_fraction(const Field& f) {
    double band = 0.0, total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::fabs(f.values[i]);
        total += a;
        if (in_boundary_band(f.grid, i)) band += a;
    }
    return total > 0.0 ? band / total : 0.0;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("loglog_slope: need two or more paired points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: values must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw ArgumentError("loglog_slope: x values are all equal");
    return (n * sxy - sx * sy) / denom;
}

double bump(double r, double radius) {
    const double z = std::fabs(r) / radius;
    if (z >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - z * z));
}

SmoothingProbe smoothing_estimate_probe(const GridSpec& grid, double s, double r, double q,
                                        const std::vector<double>& t_values, double guard) {
    if (!(r >= 1.0) || !(q >= r)) throw ArgumentError("smoothing probe: need 1 <= r <= q");
    if (t_values.size() < 2) throw ArgumentError("smoothing probe: need two or more times");
    Workspace ws(grid);
    const Field phi = Field::radial(grid, [](double rad) { return bump(rad); });
    SmoothingProbe probe;
    probe.expected_slope = -(grid.dim / (2.0 * s)) * (1.0 / r - (std::isinf(q) ? 0.0 : 1.0 / q));
    Field u(grid);
    for (double t : t_values) {
        ws.apply(phi.values, u.values, ws.semigroup_multiplier(s, t));
        const double frac = boundary_mass_fraction(u);
        probe.max_boundary_fraction = std::max(probe.max_boundary_fraction, frac);
        if (frac > guard) {
            std::ostringstream msg;
            msg << "domain too small: boundary mass fraction " << frac << " at t=" << t << " exceeds " << guard
                << " (" << grid.describe() << ")";
            throw DomainError(msg.str());
        }
        probe.t.push_back(t);
        probe.norm.push_back(lp_norm(u, q));
    }
    const std::size_t start = probe.t.size() / 2;
    probe.slope = loglog_slope(std::span(probe.t).subspan(start), std::span(probe.norm).subspan(start));
    return probe;
}

DecayProbe decay_bounds_probe(const Field& u0, double s, const std::vector<double>& t_values, double guard) {
    if (t_values.size() < 2) throw ArgumentError("decay probe: need two or more times");
    const auto [mn, mx] = std::minmax_element(u0.values.begin(), u0.values.end());
    if (*mn < 0.0) throw ArgumentError("decay probe: initial data must be nonnegative");
    if (!(*mx > 0.0)) throw ArgumentError("decay probe: initial data must not vanish identically");
    Workspace ws(u0.grid);
    Field u(u0.grid);
    DecayProbe probe;
    const double power = u0.grid.dim / (2.0 * s);
    for (double t : t_values) {
        if (!(t > 0.0)) throw DomainError("decay probe: times must be positive");
        ws.apply(u0.values, u.values, ws.semigroup_multiplier(s, t));
        const double frac = boundary_mass_fraction(u);
        probe.max_boundary_fraction = std::max(probe.max_boundary_fraction, frac);
        if (frac > guard) {
            std::ostringstream msg;
            msg << "domain too small: boundary mass fraction " << frac << " at t=" << t << " exceeds " << guard;
            throw DomainError(msg.str());
        }
        probe.t.push_back(t);
        probe.sup.push_back(sup_norm(u));
        probe.normalized.push_back(std::pow(t, power) * probe.sup.back());
    }
    const auto [lo, hi] = std::minmax_element(probe.normalized.begin(), probe.normalized.end());
    probe.c1 = *lo;
    probe.c2 = *hi;
    probe.band_ratio = probe.c2 / probe.c1;
    probe.slope = loglog_slope(probe.t, probe.sup);
    return probe;
}

// ---------------------------------------------------------------------------

double ConvexFunction::value(double x) const {
    switch (kind) {
        case Kind::Linear: return x;
        case Kind::Square: return x * x;
        case Kind::Power: return std::pow(std::fabs(x), m);
        case Kind::Exponential: return std::exp(x);
    }
    return x;
}

double ConvexFunction::derivative(double x) const {
    switch (kind) {
        case Kind::Linear: return 1.0;
        case Kind::Square: return 2.0 * x;
        case Kind::Power: return x == 0.0 ? 0.0 : std::copysign(m * std::pow(std::fabs(x), m - 1.0), x);
        case Kind::Exponential: return std::exp(x);
    }
    return 1.0;
}

std::string ConvexFunction::describe() const {
    switch (kind) {
        case Kind::Linear: return "linear";
        case Kind::Square: return "square";
        case Kind::Power: {
            std::ostringstream os;
            os << "power(m=" << m << ")";
            return os.str();
        }
        case Kind::Exponential: return "exponential";
    }
    return "?";
}

ConvexityReport convexity_inequality_check(const Field& phi, double s, const ConvexFunction& G, double tolerance) {
    const double peak = sup_norm(phi);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (in_boundary_band(phi.grid, i) && std::fabs(phi.values[i]) > 1e-12 * peak) {
            throw DomainError("convexity check: phi touches the periodic boundary");
        }
    }
    if (G.kind == ConvexFunction::Kind::Power && !(G.m >= 1.0)) throw ArgumentError("convexity check: need m >= 1");
    Field g_phi(phi.grid), g_prime(phi.grid);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        g_phi.values[i] = G.value(phi.values[i]);
        g_prime.values[i] = G.derivative(phi.values[i]);
    }
    const Field lhs = apply_fractional_laplacian(g_phi, s);
    const Field lap_phi = apply_fractional_laplacian(phi, s);
    ConvexityReport rep;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    double sup_l = 0.0, sup_r = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double rhs = g_prime.values[i] * lap_phi.values[i];
        rep.max_violation = std::max(rep.max_violation, lhs.values[i] - rhs);
        sup_l = std::max(sup_l, std::fabs(lhs.values[i]));
        sup_r = std::max(sup_r, std::fabs(rhs));
    }
    rep.scale = std::max(sup_l, sup_r);
    rep.relative = rep.scale > 0.0 ? std::max(rep.max_violation, 0.0) / rep.scale : 0.0;
    rep.holds = rep.max_violation <= tolerance * rep.scale;
    return rep;
}

// ---------------------------------------------------------------------------
// I/O

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot write field CSV");
    out << "# mixlab field\n";
    out << "# dim=" << f.grid.dim << " half_width=" << fmt17(f.grid.half_width) << " points=" << f.grid.points
        << "\n";
    if (f.grid.dim == 1) {
        out << "# columns: i,x,value\n";
        for (std::size_t i = 0; i < f.size(); ++i) {
            out << i << ',' << fmt17(f.grid.coord(i)) << ',' << fmt17(f.values[i]) << '\n';
        }
    } else {
        out << "# columns: i,j,x,y,value\n";
        const std::size_t m = f.grid.points;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                out << i << ',' << j << ',' << fmt17(f.grid.coord(i)) << ',' << fmt17(f.grid.coord(j)) << ','
                    << fmt17(f.values[i * m + j]) << '\n';
    }
    if (!out) throw IoError(path, "write failed");
}

Field read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open field CSV");
    std::string line;
    GridSpec g;
    bool have_grid = false;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("dim=") != std::string::npos) {
                if (std::sscanf(line.c_str(), "# dim=%d half_width=%lf points=%zu", &g.dim, &g.half_width,
                                &g.points) != 3) {
                    throw DataError(path + ": malformed grid header");
                }
                have_grid = true;
            }
            continue;
        }
        const auto comma = line.rfind(',');
        try {
            values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DataError(path + ": bad value in line '" + line + "'");
        }
    }
    if (!have_grid) throw DataError(path + ": missing grid header");
    g.validate();
    if (values.size() != g.size()) throw DataError(path + ": value count does not match grid");
    return Field(g, std::move(values));
}

void write_field_binary(const Field& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot write field binary");
    for (double v : f.values) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!out) throw IoError(path, "write failed");
    nlohmann::json header = {{"dim", f.grid.dim},        {"half_width", f.grid.half_width},
                             {"points", f.grid.points},  {"byte_order", "little"},
                             {"dtype", "float64"},       {"length", f.size()}};
    std::ofstream h(path + ".json");
    if (!h) throw IoError(path + ".json", "cannot write field header");
    h << header.dump(2) << '\n';
}

Field read_field_binary(const std::string& path) {
    std::ifstream h(path + ".json");
    if (!h) throw IoError(path + ".json", "cannot open field header");
    nlohmann::json header;
    try {
        h >> header;
    } catch (const std::exception& e) {
        throw DataError(path + ".json: " + e.what());
    }
    GridSpec g;
    g.dim = header.at("dim").get<int>();
    g.half_width = header.at("half_width").get<double>();
    g.points = header.at("points").get<std::size_t>();
    g.validate();
    if (header.value("byte_order", "little") != "little") throw DataError(path + ": unsupported byte order");
    const auto length = header.at("length").get<std::size_t>();
    if (length != g.size()) throw DataError(path + ": length does not match grid");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open field binary");
    std::vector<double> values(length);
    for (auto& v : values) {
        std::uint64_t bits = 0;
        in.read(reinterpret_cast<char*>(&bits), sizeof bits);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        v = std::bit_cast<double>(bits);
    }
    if (!in) throw DataError(path + ": truncated binary");
    return Field(g, std::move(values));
}

}  // namespace mixlab::spectral
