#include "mixlab/duhamel.hpp"

#include "mixlab/error.hpp"
#include "mixlab/simd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mixlab::duhamel {

FieldDescriptor::Kind parse_field_kind(const std::string& name) {
    using K = FieldDescriptor::Kind;
    if (name == "zero") return K::Zero;
    if (name == "constant") return K::Constant;
    if (name == "gaussian") return K::Gaussian;
    if (name == "bump") return K::Bump;
    if (name == "two_bumps") return K::TwoBumps;
    throw ArgumentError("unknown field kind '" + name + "' (expected zero, constant, gaussian, bump or two_bumps)");
}

std::string field_kind_name(FieldDescriptor::Kind kind) {
    using K = FieldDescriptor::Kind;
    switch (kind) {
        case K::Zero: return "zero";
        case K::Constant: return "constant";
        case K::Gaussian: return "gaussian";
        case K::Bump: return "bump";
        case K::TwoBumps: return "two_bumps";
    }
    return "zero";
}

std::string FieldDescriptor::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << field_kind_name(kind) << " amplitude=" << amplitude << " width=" << width;
    if (kind == Kind::TwoBumps) os << " separation=" << separation;
    return os.str();
}

Field make_field(const FieldDescriptor& d, const GridSpec& grid) {
    grid.validate();
    using K = FieldDescriptor::Kind;
    if (d.kind != K::Zero && d.kind != K::Constant && !(d.width > 0.0))
        throw ArgumentError("field: width must be positive");
    const double a = d.amplitude;
    switch (d.kind) {
        case K::Zero: return Field(grid);
        case K::Constant: return Field::constant(grid, a);
        case K::Gaussian:
            return Field::radial(grid, [&](double r) { return a * std::exp(-r * r / (d.width * d.width)); });
        case K::Bump: return Field::radial(grid, [&](double r) { return a * spectral::bump(r, d.width); });
        case K::TwoBumps: {
            const double c = 0.5 * d.separation;
            return Field::from_function(grid, [&](double x, double y) {
                return a * (spectral::bump(std::hypot(x - c, y), d.width) + spectral::bump(std::hypot(x + c, y), d.width));
            });
        }
    }
    return Field(grid);
}

void ProblemSpec::validate() const {
    grid.validate();
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("problem: s must lie in (0, 1]");
    if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("problem: p must exceed 1");
    if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("problem: b must be >= 0");
    if (!(rho > -1.0) || !std::isfinite(rho)) throw DomainError("problem: rho must exceed -1");
    if (!(h.gamma > -1.0) || !std::isfinite(h.gamma)) throw DomainError("problem: gamma must exceed -1");
    if (delta && !(*delta > 0.0)) throw ArgumentError("problem: delta must be positive");
}

void TimeGrid::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ArgumentError("time grid: horizon must be positive");
    if (steps < 1) throw ArgumentError("time grid: need at least one step");
    if (spacing == Spacing::Graded && !(power >= 1.0)) throw ArgumentError("time grid: grading power must be >= 1");
}

std::vector<double> TimeGrid::nodes() const {
    validate();
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double q = static_cast<double>(k) / static_cast<double>(steps);
        t[k] = spacing == Spacing::Uniform ? horizon * q : horizon * std::pow(q, power);
    }
    t.back() = horizon;
    return t;
}

TimeGrid TimeGrid::refined() const {
    TimeGrid g = *this;
    g.steps *= 2;
    return g;
}

Field singular_weight_field(const GridSpec& grid, double b, double delta) {
    grid.validate();
    if (!(delta > 0.0)) throw ArgumentError("singular weight: delta must be positive");
    if (!(b >= 0.0)) throw DomainError("singular weight: b must be >= 0");
    if (b == 0.0) return Field::constant(grid, 1.0);
    return Field::radial(grid, [=](double r) { return std::pow(r * r + delta * delta, -0.5 * b); });
}

namespace {

double forcing_weight(double rho, double t0, double t1) {
    const double e = rho + 1.0;
    return (std::pow(t1, e) - std::pow(t0, e)) / e;
}

// Holds the FFT workspace, the weight field and the last multiplier so a
// uniform grid pays for exp() once.
class Stepper {
public:
    explicit Stepper(const ProblemSpec& spec)
        : spec_(spec),
          ws_(spec.grid),
          weight_(singular_weight_field(spec.grid, spec.b, spec.resolved_delta())),
          forcing_(make_field(spec.w, spec.grid)),
          buffer_(spec.grid.size()) {}

    void step(const Field& in, Field& out, double t0, double t1) {
        if (!in.all_finite()) throw DivergedStateError("duhamel step: state is not finite");
        const double dt = t1 - t0;
        if (dt != last_dt_) {
            mult_ = ws_.semigroup_multiplier(spec_.s, dt, spec_.symbol);
            last_dt_ = dt;
        }
        const double hw = spec_.nonlinear ? spec_.h.integral(t0, t1) : 0.0;
        const bool forced = !spec_.w.is_zero();
        const double fw = forced ? forcing_weight(spec_.rho, t0, t1) : 0.0;
        simd::active_kernels().duhamel_source(buffer_.data(), in.values.data(), spec_.b == 0.0 ? nullptr : weight_.values.data(),
                                              hw, spec_.p, forced ? forcing_.values.data() : nullptr, fw,
                                              buffer_.size());
        out.grid = in.grid;
        out.values.resize(buffer_.size());
        ws_.apply(buffer_, out.values, mult_);
    }

    const Field& forcing() const { return forcing_; }

private:
    const ProblemSpec& spec_;
    spectral::Workspace ws_;
    Field weight_;
    Field forcing_;
    std::vector<double> buffer_;
    std::vector<double> mult_;
    double last_dt_ = -1.0;
};

void record(Trajectory& tr, double t, const Field& u) {
    tr.t.push_back(t);
    tr.sup.push_back(spectral::sup_norm(u));
    tr.l1.push_back(spectral::lp_norm(u, 1.0));
    tr.l2.push_back(spectral::lp_norm(u, 2.0));
    tr.mean.push_back(u.mean());
}

RunResult run_once(const ProblemSpec& spec, const TimeGrid& tgrid, const RunOptions& opt) {
    spec.validate();
    const auto nodes = tgrid.nodes();
    Stepper stepper(spec);
    RunResult res;
    Field u = make_field(spec.u0, spec.grid);
    const double sup0 = spectral::sup_norm(u);
    res.threshold = opt.threshold.value_or(1e8 * std::max(1.0, sup0));
    res.forced = !spec.w.is_zero();
    res.forcing_integral = stepper.forcing().integral();
    res.forcing_positive = res.forcing_integral > 0.0;
    const double base_fraction = spectral::boundary_mass_fraction(u);
    record(res.trajectory, nodes[0], u);

    Field next(spec.grid);
    bool wrapped = false;
    for (std::size_t n = 0; n + 1 < nodes.size(); ++n) {
        stepper.step(u, next, nodes[n], nodes[n + 1]);
        std::swap(u, next);
        const double sup = spectral::sup_norm(u);
        if (!std::isfinite(sup) || sup > res.threshold) {
            res.verdict.kind = RunVerdict::Kind::BlowUp;
            res.verdict.time = 0.5 * (nodes[n] + nodes[n + 1]);
            res.verdict.sup = sup;
            res.trajectory.t.push_back(nodes[n + 1]);
            res.trajectory.sup.push_back(sup);
            res.trajectory.l1.push_back(std::isfinite(sup) ? spectral::lp_norm(u, 1.0) : sup);
            res.trajectory.l2.push_back(std::isfinite(sup) ? spectral::lp_norm(u, 2.0) : sup);
            res.trajectory.mean.push_back(std::isfinite(sup) ? u.mean() : sup);
            if (wrapped) {
                res.verdict.kind = RunVerdict::Kind::Undetermined;
                res.verdict.reason = "wrap-around guard tripped";
            }
            res.final_state = std::move(u);
            return res;
        }
        const double frac = spectral::boundary_mass_fraction(u);
        res.max_boundary_fraction = std::max(res.max_boundary_fraction, frac);
        if (frac - base_fraction > opt.wrap_guard) wrapped = true;
        record(res.trajectory, nodes[n + 1], u);
    }

    const auto& tr = res.trajectory;
    const double final_sup = tr.sup.back();
    const std::size_t half =
        std::lower_bound(tr.t.begin(), tr.t.end(), 0.5 * tgrid.horizon) - tr.t.begin();
    res.verdict.time = tgrid.horizon;
    res.verdict.sup = final_sup;
    if (wrapped) {
        res.verdict.reason = "wrap-around guard tripped";
    } else if (!(final_sup <= tr.sup[half])) {
        res.verdict.reason = "grew but finite";
    } else {
        bool monotone = true;
        for (std::size_t k = half + 1; k < tr.sup.size(); ++k)
            if (tr.sup[k] > tr.sup[k - 1] * (1.0 + 1e-9)) monotone = false;
        if (!monotone) {
            res.verdict.reason = "non-monotone tail";
        } else {
            res.verdict.kind = RunVerdict::Kind::Global;
            if (final_sup > 0.0 && tr.sup[half] > 0.0 && tr.t[half] > 0.0 && tr.t.size() - half >= 2) {
                std::vector<double> ts(tr.t.begin() + half, tr.t.end()), ss(tr.sup.begin() + half, tr.sup.end());
                res.verdict.decay_slope = spectral::loglog_slope(ts, ss);
            }
        }
    }
    res.final_state = std::move(u);
    return res;
}

}  // namespace

Field duhamel_step(const Field& state, double t_n, double t_next, const ProblemSpec& spec) {
    spec.validate();
    if (!(state.grid == spec.grid)) throw ArgumentError("duhamel step: state grid differs from the problem grid");
    if (!(t_n >= 0.0) || !(t_next > t_n)) throw ArgumentError("duhamel step: need t_next > t_n >= 0");
    Stepper stepper(spec);
    Field out(spec.grid);
    stepper.step(state, out, t_n, t_next);
    return out;
}

std::string verdict_name(RunVerdict::Kind kind) {
    switch (kind) {
        case RunVerdict::Kind::BlowUp: return "BlowUp";
        case RunVerdict::Kind::Global: return "Global";
        case RunVerdict::Kind::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

RunResult evolve(const ProblemSpec& spec, const TimeGrid& tgrid, const RunOptions& options) {
    RunResult res = run_once(spec, tgrid, options);
    if (options.convergence_check && res.verdict.kind == RunVerdict::Kind::Global) {
        RunOptions inner = options;
        inner.threshold = res.threshold;
        const RunResult fine = run_once(spec, tgrid.refined(), inner);
        const double a = res.verdict.sup;
        const double b = fine.trajectory.sup.back();
        res.refined_final_sup = b;
        if (!(std::fabs(a - b) <= options.convergence_tolerance * std::max(std::fabs(a), std::fabs(b)))) {
            std::ostringstream msg;
            msg.precision(6);
            msg << "step halving moved the final sup norm from " << a << " to " << b << " (" << tgrid.steps
                << " steps)";
            throw ResolutionError(msg.str());
        }
    }
    return res;
}

RunResult forced_evolve(const ProblemSpec& spec, const TimeGrid& tgrid, const RunOptions& options) {
    if (spec.w.is_zero()) throw ArgumentError("forced run: forcing w must be nonzero");
    return evolve(spec, tgrid, options);
}

void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError(path, "cannot open for writing");
    std::fprintf(f, "# mixlab trajectory\n# columns: t,sup_norm,l1_norm,l2_norm,mean\nt,sup_norm,l1_norm,l2_norm,mean\n");
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", tr.t[i], tr.sup[i], tr.l1[i], tr.l2[i], tr.mean[i]);
    if (std::fclose(f) != 0) throw IoError(path, "write failed");
}

}  // namespace mixlab::duhamel
