#pragma once

#include "mixlab/duhamel.hpp"
#include "mixlab/lab/config.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mixlab::lab {

/// Parameters a sweep axis may vary.
inline const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names{"p", "s", "gamma", "b", "rho", "amplitude"};
    return names;
}

struct SweepConfig {
    duhamel::ProblemSpec base;
    duhamel::TimeGrid tgrid;
    duhamel::RunOptions options;
    /// Ordered axes; the Cartesian product varies the last axis fastest.
    std::vector<std::pair<std::string, std::vector<double>>> axes;
    unsigned workers = 0;  ///< 0 = hardware concurrency
};

SweepConfig sweep_from(const Json& cfg);

/// Sets one named parameter on a spec; ArgumentError for unknown names.
void set_parameter(duhamel::ProblemSpec& spec, const std::string& name, double value);

struct SweepRow {
    std::size_t index = 0;
    std::vector<std::pair<std::string, double>> params;
    bool skipped = false;
    std::string skip_reason;
    duhamel::RunVerdict verdict;
    double final_sup = 0.0;
    double final_l1 = 0.0;
    double p_F = 0.0;
    std::optional<double> p_star;
    bool at_p_F = false;
    bool at_p_star = false;
    std::optional<double> refined_final_sup;
    double max_boundary_fraction = 0.0;
    duhamel::Trajectory trajectory;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::size_t tuples = 0;
    std::size_t skipped = 0;
};

/// One evolve per tuple on a worker pool; rows come back in tuple order.
/// Invalid tuples and numeric failures become skipped rows with a reason.
SweepResult run_sweep(const SweepConfig& config);

/// '#' header, one row per tuple, %.17g numbers.
void write_sweep_csv(const SweepResult& result, const SweepConfig& config, const std::string& path);

struct ScanStep {
    double p = 0.0;
    duhamel::RunVerdict verdict;
    std::string note;
};

struct FujitaScan {
    double p_F = 0.0;
    double p_lo = 0.0;  ///< BlowUp
    double p_hi = 0.0;  ///< Global
    bool determined = false;
    std::string status;  ///< "bracketed" or the reason the scan stopped
    std::vector<ScanStep> steps;  ///< every evaluated p in evaluation order
    bool contains_p_F() const { return p_lo <= p_F && p_F <= p_hi; }
    /// distance from p_F to the bracket (0 when inside)
    double distance_to_p_F() const;
};

/// Bisection on p with verdicts as the predicate.  `base` fixes everything but
/// p; the endpoints must classify BlowUp (low) and Global (high), otherwise the
/// scan is reported as undetermined.
FujitaScan fujita_transition_scan(const duhamel::ProblemSpec& base, const duhamel::TimeGrid& tgrid,
                                  const duhamel::RunOptions& options, double p_low, double p_high,
                                  double refinement);

Json to_json(const FujitaScan& scan);

}  // namespace mixlab::lab
