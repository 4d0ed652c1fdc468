#include "mixlab/lab/testfn.hpp"

#include "mixlab/error.hpp"
#include "mixlab/quadrature.hpp"
#include "mixlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mixlab::lab {

namespace {

constexpr double kPsiFloor = 1e-12;

}  // namespace

double smoothstep5(double z) {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return 1.0;
    return z * z * z * (10.0 + z * (-15.0 + 6.0 * z));
}

double smoothstep5_d1(double z) {
    if (z <= 0.0 || z >= 1.0) return 0.0;
    const double q = z * (1.0 - z);
    return 30.0 * q * q;
}

double smoothstep5_d2(double z) {
    if (z <= 0.0 || z >= 1.0) return 0.0;
    return 60.0 * z * (1.0 - z) * (1.0 - 2.0 * z);
}

double phi_cutoff(double r) { return smoothstep5(2.0 - r); }
double phi_cutoff_d1(double r) { return -smoothstep5_d1(2.0 - r); }
double phi_cutoff_d2(double r) { return smoothstep5_d2(2.0 - r); }

double eta_cutoff(double tau) {
    if (tau <= 0.5) return smoothstep5((tau - 0.25) / 0.25);
    if (tau <= 0.75) return 1.0;
    return smoothstep5((0.8 - tau) / 0.05);
}

double eta_cutoff_d1(double tau) {
    if (tau <= 0.5) return smoothstep5_d1((tau - 0.25) / 0.25) / 0.25;
    if (tau <= 0.75) return 0.0;
    return -smoothstep5_d1((0.8 - tau) / 0.05) / 0.05;
}

namespace {

double piecewise(const quad::Integrand& f) {
    // kinks of eta at 1/4, 1/2, 3/4, 4/5
    return quad::integrate(f, 0.25, 0.5, 1e-10).value + quad::integrate(f, 0.5, 0.75, 1e-10).value +
           quad::integrate(f, 0.75, 0.8, 1e-10).value;
}

}  // namespace

TestFnResult testfn_experiment(const duhamel::ProblemSpec& spec, const TestFunctionSpec& tf) {
    spec.validate();
    if (tf.R.size() < 2) throw ArgumentError("testfn: need at least two radii");
    if (spec.w.is_zero()) throw ArgumentError("testfn: the forcing w must be nonzero");
    const GridSpec& g = spec.grid;
    const int N = g.dim;
    const double s = spec.s, p = spec.p, b = spec.b, rho = spec.rho, gamma = spec.h.gamma;
    const double pp = p / (p - 1.0);  // conjugate exponent
    const double m = 2.0 * p / (p - 1.0);
    const double inv = 1.0 / (p - 1.0);

    TestFnResult out;
    out.m = m;
    const bool coupled = tf.time_scaling == TestFunctionSpec::TimeScaling::RTo2s;
    out.expected_bound = coupled ? N + (b - 2.0 * s * (1.0 + gamma)) / (p - 1.0) : N + b / (p - 1.0);
    out.expected_lhs = coupled ? 2.0 * s * (rho + 1.0) : 0.0;
    out.expected_generator = -2.0 * s;

    const Field w = duhamel::make_field(spec.w, g);
    const double w_total = w.integral();
    const double dv = g.cell_volume();

    for (double R : tf.R) {
        if (!(R >= 1.0)) throw DomainError("testfn: R must be >= 1");
        if (2.0 * R > 0.5 * g.half_width)
            throw DomainError("testfn: R = " + std::to_string(R) + " too large for the grid (need R <= L/4)");
        const double T = coupled ? std::pow(R, 2.0 * s) : tf.T;
        const auto h = [&](double t) { return spec.h(t); };

        const double i1_time = std::pow(T, 1.0 - pp) * piecewise([&](double tau) {
            const double e = eta_cutoff(tau);
            if (std::pow(e, m) <= kPsiFloor) return 0.0;
            const double dpsi = m * std::pow(e, m - 1.0) * std::fabs(eta_cutoff_d1(tau));
            return std::pow(h(T * tau), -inv) * std::pow(e, -m * inv) * std::pow(dpsi, pp);
        });
        const double j1_time = T * piecewise([&](double tau) {
            const double e = eta_cutoff(tau);
            if (std::pow(e, m) <= kPsiFloor) return 0.0;
            return std::pow(h(T * tau), -inv) * std::pow(e, m);
        });
        const double lhs_time = std::pow(T, rho + 1.0) * piecewise([&](double tau) {
            return std::pow(tau, rho) * std::pow(eta_cutoff(tau), m);
        });

        const Field phi = Field::radial(g, [R](double r) { return phi_cutoff(r / R); });
        const Field frac = spectral::apply_fractional_laplacian(phi, s);
        Field phim = phi;
        for (double& v : phim.values) v = std::pow(v, m);
        const Field gen = spectral::apply_generator(phim, s);

        double i1_space = 0.0, j1_space = 0.0, lhs_space = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double r = phi.radius(i);
            const double f = phi[i];
            const double fm = phim[i];
            lhs_space += w[i] * fm;
            if (fm <= kPsiFloor) continue;
            const double weight = b == 0.0 ? 1.0 : std::pow(r, b * inv);
            i1_space += weight * fm;
            const double d1 = phi_cutoff_d1(r / R) / R;
            const double d2 = phi_cutoff_d2(r / R) / (R * R);
            const double lap = N == 1 || r == 0.0 ? d2 : d2 + d1 / r;
            const double major =
                m * std::pow(f, m - 1.0) * (std::fabs(lap) + std::fabs(frac[i])) + m * (m - 1.0) * std::pow(f, m - 2.0) * d1 * d1;
            j1_space += weight * std::pow(f, -m * inv) * std::pow(major, pp);
        }
        TestFnRow row;
        row.R = R;
        row.I1 = i1_time * i1_space * dv;
        row.J1 = j1_time * j1_space * dv;
        row.LHS = lhs_time * lhs_space * dv;
        row.bound = row.I1 + row.J1;
        row.generator_sup = spectral::sup_norm(gen);
        row.w_capture = lhs_space * dv / w_total;
        out.rows.push_back(row);
    }

    std::vector<double> Rs, B, Lh, G;
    for (const auto& r : out.rows) {
        Rs.push_back(r.R);
        B.push_back(r.bound);
        Lh.push_back(r.LHS);
        G.push_back(r.generator_sup);
    }
    out.slope_bound = spectral::loglog_slope(Rs, B);
    out.slope_lhs = spectral::loglog_slope(Rs, Lh);
    out.slope_generator = spectral::loglog_slope(Rs, G);
    out.slope_gap = out.slope_bound - out.slope_lhs;
    return out;
}

TestFunctionSpec testfn_from(const Json& cfg) {
    const Json& t = cfg.at("testfn");
    TestFunctionSpec tf;
    tf.R = number_list(t.at("R"), "testfn.R");
    const auto scaling = t.at("time_scaling").get<std::string>();
    if (scaling == "R_to_2s") {
        tf.time_scaling = TestFunctionSpec::TimeScaling::RTo2s;
    } else if (scaling == "independent_T") {
        tf.time_scaling = TestFunctionSpec::TimeScaling::IndependentT;
    } else {
        throw ConfigError("config: testfn.time_scaling must be 'R_to_2s' or 'independent_T'");
    }
    tf.T = t.at("T").get<double>();
    return tf;
}

Json to_json(const TestFnResult& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"R", row.R},
                        {"I1", row.I1},
                        {"J1", row.J1},
                        {"LHS", row.LHS},
                        {"bound", row.bound},
                        {"generator_sup", row.generator_sup},
                        {"w_capture", row.w_capture}});
    return {{"m", r.m},
            {"rows", rows},
            {"slope_bound", r.slope_bound},
            {"slope_lhs", r.slope_lhs},
            {"slope_generator", r.slope_generator},
            {"expected_bound", r.expected_bound},
            {"expected_lhs", r.expected_lhs},
            {"expected_generator", r.expected_generator},
            {"slope_gap", r.slope_gap}};
}

void write_testfn_csv(const TestFnResult& r, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError(path, "cannot open for writing");
    std::fprintf(f, "# mixlab testfn m=%.17g slope_bound=%.17g slope_lhs=%.17g\n", r.m, r.slope_bound, r.slope_lhs);
    std::fprintf(f, "# columns: R,I1,J1,LHS,bound,generator_sup,w_capture\nR,I1,J1,LHS,bound,generator_sup,w_capture\n");
    for (const auto& row : r.rows)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.R, row.I1, row.J1, row.LHS, row.bound,
                     row.generator_sup, row.w_capture);
    if (std::fclose(f) != 0) throw IoError(path, "write failed");
}

}  // namespace mixlab::lab
