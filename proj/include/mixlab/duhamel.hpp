#pragma once

#include "mixlab/grid.hpp"
#include "mixlab/rvf.hpp"
#include "mixlab/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

// Exponential-Euler integration of
//   u_t = (Delta - (-Delta)^s) u + h(t) |x|^{-b} |u|^p + t^rho w(x)
// in mild form on the periodic grid, with blow-up / global classification.

namespace mixlab::duhamel {

/// Initial data or forcing profile: amplitude * shape(x).
struct FieldDescriptor {
    enum class Kind { Zero, Constant, Gaussian, Bump, TwoBumps };
    Kind kind = Kind::Zero;
    double amplitude = 1.0;
    double width = 1.0;       ///< Gaussian e^{-|x|^2/width^2}; bump radius
    double separation = 4.0;  ///< TwoBumps: centres at +-separation/2 on the first axis

    bool is_zero() const noexcept { return kind == Kind::Zero || amplitude == 0.0; }
    std::string describe() const;
};

FieldDescriptor::Kind parse_field_kind(const std::string& name);
std::string field_kind_name(FieldDescriptor::Kind kind);
Field make_field(const FieldDescriptor& desc, const GridSpec& grid);

struct ProblemSpec {
    double s = 0.5;
    double p = 2.0;
    double b = 0.0;
    rvf::CoefficientH h{0.0, rvf::SlowlyVaryingSpec::constant(1.0)};
    bool nonlinear = true;  ///< false switches the h-term off (diagnostic h = 0)
    double rho = 0.0;
    FieldDescriptor u0{FieldDescriptor::Kind::Gaussian, 1.0};
    FieldDescriptor w{};
    GridSpec grid{};
    spectral::Symbol symbol = spectral::Symbol::Mixed;
    std::optional<double> delta;  ///< weight regularization, default dx/2

    /// p > 1, b >= 0, rho > -1, gamma > -1, s in (0,1], valid grid.
    void validate() const;
    double resolved_delta() const { return delta.value_or(0.5 * grid.dx()); }
};

struct TimeGrid {
    enum class Spacing { Uniform, Graded };
    double horizon = 200.0;
    std::size_t steps = 4000;
    Spacing spacing = Spacing::Uniform;
    double power = 2.0;  ///< Graded: t_k = T (k/n)^power, clustering nodes at 0

    void validate() const;
    std::vector<double> nodes() const;
    TimeGrid refined() const;  ///< same rule, twice the steps
};

/// (|x|^2 + delta^2)^{-b/2}
Field singular_weight_field(const GridSpec& grid, double b, double delta);

/// u_{n+1} = e^{dt L}[u_n + H_n V |u_n|^p + P_n w] with exact step weights
/// H_n = int h, P_n = int t^rho.  Throws DivergedStateError on a non-finite state.
Field duhamel_step(const Field& state, double t_n, double t_next, const ProblemSpec& spec);

struct RunVerdict {
    enum class Kind { BlowUp, Global, Undetermined };
    Kind kind = Kind::Undetermined;
    double time = 0.0;        ///< BlowUp: detection time; otherwise the horizon
    double sup = 0.0;         ///< sup norm at detection or at the horizon
    double decay_slope = 0.0; ///< Global: log-log slope of the sup norm over the second half
    std::string reason;       ///< Undetermined: "grew but finite", "non-monotone tail", "wrap-around guard tripped"
};

std::string verdict_name(RunVerdict::Kind kind);

struct Trajectory {
    std::vector<double> t;
    std::vector<double> sup;
    std::vector<double> l1;
    std::vector<double> l2;
    std::vector<double> mean;
};

struct RunOptions {
    std::optional<double> threshold;     ///< default 1e8 max(1, ||u0||_inf)
    double wrap_guard = 1e-4;            ///< boundary mass fraction that invalidates the run
    bool convergence_check = true;       ///< rerun Global verdicts with dt/2
    double convergence_tolerance = 0.2;  ///< relative change of the final sup norm
};

struct RunResult {
    Trajectory trajectory;
    RunVerdict verdict;
    double threshold = 0.0;
    double max_boundary_fraction = 0.0;
    bool forced = false;
    double forcing_integral = 0.0;  ///< int w dx
    bool forcing_positive = false;
    std::optional<double> refined_final_sup;  ///< set when the step-halving check ran
    Field final_state;
};

/// Throws ResolutionError when a Global verdict moves by more than the
/// convergence tolerance under step halving.
RunResult evolve(const ProblemSpec& spec, const TimeGrid& tgrid, const RunOptions& options = {});

/// evolve with a nonzero forcing; ArgumentError if w is zero.
RunResult forced_evolve(const ProblemSpec& spec, const TimeGrid& tgrid, const RunOptions& options = {});

/// Columns t,sup_norm,l1_norm,l2_norm,mean with '#' header lines.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace mixlab::duhamel
