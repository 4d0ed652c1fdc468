#pragma once

#include <cstddef>
#include <functional>

namespace mixlab::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;        ///< accumulated Gauss-Kronrod error estimate
    double l1 = 0.0;           ///< integral of |f|, the scale for cancellation
    std::size_t segments = 0;  ///< top-level pieces (geometric or doubling)
    bool extrapolated = false; ///< head remainder closed by a geometric series
};

using Integrand = std::function<double(double)>;

constexpr double kDefaultRelTol = 1e-8;

/// Adaptive 15-point Gauss-Kronrod on [a, b] (at most 2^max_depth panels).
/// Throws NumericError when the error estimate stays above the tolerance.
Result integrate(const Integrand& f, double a, double b, double rel_tol = kDefaultRelTol,
                 unsigned max_depth = 15);

/// Single non-adaptive 15-point Gauss-Kronrod panel.
Result panel(const Integrand& f, double a, double b);

/// Integral over (0, x] of a function with an integrable power-type
/// singularity (or zero) at the origin.
///
/// The interval is split geometrically, [x/2, x], [x/4, x/2], ...  Once the
/// ratio of consecutive piece integrals has settled, the remaining (0, x/2^k]
/// part is summed as a geometric series, which is exact for pure powers.
/// Throws DomainError if the pieces do not shrink (non-integrable at 0).
Result integrate_head(const Integrand& f, double x, double rel_tol = kDefaultRelTol);

/// Integral over [x, inf): doubling upper limits until the last increment is
/// below rel_tol of the running total.  Limits are capped at 2^60 x; hitting
/// the cap throws DomainError (tail not Cauchy).
Result integrate_tail(const Integrand& f, double x, double rel_tol = kDefaultRelTol);

}  // namespace mixlab::quad
