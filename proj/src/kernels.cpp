#include "mixlab/kernels.hpp"

#include "mixlab/error.hpp"
#include "mixlab/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace mixlab::kernels {

namespace {

constexpr double kCutoffExponent = 36.84;  // e^{-36.84} ~ 1e-16
constexpr double kDoublingRelTol = 1e-9;
constexpr double kDoublingAbsTol = 1e-12;  // relative to the L1 of the integrand
constexpr int kMaxRefinements = 4;

void check_dim(int dim) {
    if (dim != 1 && dim != 2) throw ArgumentError("kernel: dimension must be 1 or 2");
}

double radial_integrand(int dim, double r, double m, double xi) {
    if (dim == 1) return std::cos(r * xi) * m / M_PI;
    return std::cyl_bessel_j(0.0, r * xi) * m * xi / (2.0 * M_PI);
}

struct Inversion {
    double value = 0.0;
    double l1 = 0.0;
};

// (2 pi)^{-N} int e^{i x.xi} m(|xi|) dxi reduced to a radial integral over
// [0, xi_max]; the first panel is adaptive (m may have a cusp at 0), the rest
// are single Gauss-Kronrod panels of width `width`.
Inversion radial_inverse(int dim, const std::function<double(double)>& m, double r, double xi_max, double width) {
    const auto f = [&](double xi) { return radial_integrand(dim, r, m(xi), xi); };
    Inversion out;
    const double head_end = std::min(width, xi_max);
    const auto head = quad::integrate(f, 0.0, head_end, 1e-12, 20);
    out.value = head.value;
    out.l1 = head.l1;
    for (double a = head_end; a < xi_max; a += width) {
        const double b = std::min(a + width, xi_max);
        const auto p = quad::panel(f, a, b);
        out.value += p.value;
        out.l1 += p.l1;
    }
    return out;
}

bool agrees(const Inversion& coarse, const Inversion& fine) {
    const double diff = std::fabs(coarse.value - fine.value);
    return diff <= kDoublingRelTol * std::fabs(fine.value) + kDoublingAbsTol * fine.l1;
}

}  // namespace

void KernelParams::validate() const {
    check_dim(dim);
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("kernel: s must lie in (0, 1]");
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("kernel: t must be positive");
}

double gaussian_profile(int dim, double r) { return heat_kernel_at_time(dim, r, 1.0); }

double heat_kernel_at_time(int dim, double r, double t) {
    check_dim(dim);
    if (!(t > 0.0)) throw DomainError("heat kernel: t must be positive");
    return std::pow(4.0 * M_PI * t, -0.5 * dim) * std::exp(-r * r / (4.0 * t));
}

double poisson_profile(int dim, double r) { return poisson_kernel_at_time(dim, r, 1.0); }

double poisson_kernel_at_time(int dim, double r, double t) {
    check_dim(dim);
    if (!(t > 0.0)) throw DomainError("poisson kernel: t must be positive");
    const double a = 0.5 * (dim + 1);
    return std::tgamma(a) * t / (std::pow(M_PI, a) * std::pow(t * t + r * r, a));
}

std::optional<double> closed_form_profile(double s, int dim, double r) {
    if (s == 0.5) return poisson_profile(dim, r);
    if (s == 1.0) return gaussian_profile(dim, r);
    return std::nullopt;
}

double profile_cutoff(double s) {
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("profile: s must lie in (0, 1]");
    return std::pow(kCutoffExponent, 1.0 / (2.0 * s));
}

ProfileTable fractional_profile(double s, int dim, const std::vector<double>& radii) {
    check_dim(dim);
    if (!(s > 0.0 && s < 1.0)) throw DomainError("fractional profile: s must lie in (0, 1)");
    ProfileTable table;
    table.s = s;
    table.dim = dim;
    table.method = "panel_quadrature";
    table.xi_max = profile_cutoff(s);
    table.radii = radii;
    table.values.reserve(radii.size());
    const auto m = [s](double xi) { return std::exp(-std::pow(xi, 2.0 * s)); };
    for (double r : radii) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw ArgumentError("fractional profile: radii must be finite and >= 0");
        double width = r > 0.0 ? std::min(0.5, M_PI / (2.0 * r)) : 0.5;
        Inversion coarse = radial_inverse(dim, m, r, table.xi_max, width);
        bool ok = false;
        for (int k = 0; k < kMaxRefinements && !ok; ++k) {
            width *= 0.5;
            const Inversion fine = radial_inverse(dim, m, r, table.xi_max, width);
            ok = agrees(coarse, fine);
            coarse = fine;
        }
        if (!ok) throw ResolutionError("fractional profile: doubling check failed at r=" + std::to_string(r));
        table.panels = std::max(table.panels, static_cast<std::size_t>(std::ceil(table.xi_max / width)));
        table.values.push_back(coarse.value);
    }
    double peak = 0.0;
    for (double v : table.values) peak = std::max(peak, std::fabs(v));
    for (double v : table.values) table.nonnegative.push_back(v >= -1e-8 * peak);
    return table;
}

ProfileTable closed_form_table(double s, int dim, const std::vector<double>& radii) {
    check_dim(dim);
    if (!closed_form_profile(s, dim, 0.0)) throw UnsupportedKindError("closed form exists only for s = 1/2 and s = 1");
    ProfileTable table;
    table.s = s;
    table.dim = dim;
    table.method = "closed_form";
    table.radii = radii;
    for (double r : radii) {
        const double v = *closed_form_profile(s, dim, r);
        table.values.push_back(v);
        table.nonnegative.push_back(v >= 0.0);
    }
    return table;
}

void write_profile_table(const ProfileTable& table, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError(path, "cannot open for writing");
    std::fprintf(f, "# mixlab profile\n# s=%.17g dim=%d method=%s\nradius,value\n", table.s, table.dim,
                 table.method.c_str());
    for (std::size_t i = 0; i < table.radii.size(); ++i)
        std::fprintf(f, "%.17g,%.17g\n", table.radii[i], table.values[i]);
    if (std::fclose(f) != 0) throw IoError(path, "write failed");

    nlohmann::json j;
    j["s"] = table.s;
    j["dim"] = table.dim;
    j["method"] = table.method;
    j["xi_max"] = table.xi_max;
    j["panels"] = table.panels;
    j["count"] = table.radii.size();
    std::ofstream js(path + ".json");
    if (!js) throw IoError(path + ".json", "cannot open for writing");
    js << j.dump(2) << "\n";
    if (!js) throw IoError(path + ".json", "write failed");
}

BoundReport verify_profile_bounds(const ProfileTable& table) {
    if (table.radii.size() != table.values.size() || table.radii.empty())
        throw ArgumentError("profile bounds: table is empty or inconsistent");
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        if (!std::isfinite(table.values[i]) || !std::isfinite(table.radii[i]))
            throw DataError("profile bounds: non-finite entry at index " + std::to_string(i));
    }
    const double rmax = *std::max_element(table.radii.begin(), table.radii.end());
    if (rmax < 20.0) throw ArgumentError("profile bounds: radii must extend to at least 20");

    BoundReport rep;
    double peak = 0.0;
    for (double v : table.values) peak = std::max(peak, std::fabs(v));
    rep.all_positive = true;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        const double v = table.values[i];
        if (v < -1e-8 * peak) rep.all_positive = false;
        const double ratio = std::max(v, 0.0) * std::pow(1.0 + table.radii[i], table.dim + 2.0 * table.s);
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    rep.bound_applies = table.s > 0.0 && table.s < 1.0;
    if (rep.bound_applies) {
        rep.pass = rep.all_positive && rep.min_ratio > 0.0 && std::isfinite(rep.max_ratio);
        rep.note = rep.pass ? "two-sided power bound holds on the sampled radii" : "two-sided power bound violated";
    } else {
        rep.pass = rep.all_positive;
        rep.note = "power bound is stated for s in (0,1) only; positivity checked";
    }
    return rep;
}

double mixed_kernel(const KernelParams& params, double r, std::size_t panels, spectral::Symbol sym) {
    params.validate();
    if (!(r >= 0.0) || !std::isfinite(r)) throw ArgumentError("mixed kernel: radius must be finite and >= 0");
    if (panels < 2) throw ArgumentError("mixed kernel: need at least 2 panels");
    const double s = params.s;
    const double t = params.t;
    const double xi_max = sym == spectral::Symbol::PureFractional ? std::pow(kCutoffExponent / t, 1.0 / (2.0 * s))
                                                                  : std::sqrt(kCutoffExponent / t);
    const auto m = [=](double xi) { return std::exp(-t * spectral::symbol_value(sym, s, xi)); };
    const double width = xi_max / static_cast<double>(panels);
    const Inversion coarse = radial_inverse(params.dim, m, r, xi_max, width);
    const Inversion fine = radial_inverse(params.dim, m, r, xi_max, 0.5 * width);
    if (!agrees(coarse, fine))
        throw ResolutionError("mixed kernel: " + std::to_string(panels) +
                              " panels too few (doubling check failed at r=" + std::to_string(r) + ")");
    return fine.value;
}

Field mixed_kernel_field(const GridSpec& grid, double s, double t, spectral::Symbol sym) {
    grid.validate();
    KernelParams{s, grid.dim, t}.validate();
    // Discrete delta at the origin node (index M/2 on every axis).
    Field delta(grid);
    const std::size_t c = grid.points / 2;
    const std::size_t idx = grid.dim == 1 ? c : c * grid.points + c;
    delta.values[idx] = 1.0 / grid.cell_volume();
    return spectral::apply_semigroup(delta, s, t, sym);
}

}  // namespace mixlab::kernels
