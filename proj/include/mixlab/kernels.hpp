#pragma once

#include "mixlab/grid.hpp"
#include "mixlab/spectral.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

// Heat, Poisson and fractional heat profiles, and the mixed kernel E_s with
// Fourier multiplier e^{-t(|xi|^2 + |xi|^{2s})}.  Radial profiles are
// functions of r = |x|; the Fourier convention is
// K(x) = (2 pi)^{-N} int e^{i x.xi} m(xi) dxi.

namespace mixlab::kernels {

struct KernelParams {
    double s = 0.5;
    int dim = 1;
    double t = 1.0;
    void validate() const;
};

/// (4 pi)^{-N/2} e^{-r^2/4}
double gaussian_profile(int dim, double r);
/// (4 pi t)^{-N/2} e^{-r^2/(4t)}
double heat_kernel_at_time(int dim, double r, double t);
/// Gamma((N+1)/2) / (pi^{(N+1)/2} (1 + r^2)^{(N+1)/2})
double poisson_profile(int dim, double r);
/// Gamma((N+1)/2) t / (pi^{(N+1)/2} (t^2 + r^2)^{(N+1)/2})
double poisson_kernel_at_time(int dim, double r, double t);

/// Closed forms: s = 1/2 (Poisson) and s = 1 (Gauss); nullopt otherwise.
std::optional<double> closed_form_profile(double s, int dim, double r);

/// Frequency cut-off where e^{-xi^{2s}} drops below 1e-16.
double profile_cutoff(double s);

struct ProfileTable {
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<bool> nonnegative;  ///< value >= -1e-8 * peak
    double s = 0.5;
    int dim = 1;
    std::string method;             ///< "panel_quadrature" or "closed_form"
    double xi_max = 0.0;            ///< frequency truncation
    std::size_t panels = 0;         ///< largest panel count used by the doubling check
};

/// Numerical inversion of e^{-|xi|^{2s}}, s in (0,1): cosine transform (N=1) or
/// Hankel transform (N=2) by Gauss-Kronrod panels with a doubling check.
ProfileTable fractional_profile(double s, int dim, const std::vector<double>& radii);
/// Table filled from closed_form_profile (s in {1/2, 1}).
ProfileTable closed_form_table(double s, int dim, const std::vector<double>& radii);

/// CSV (radius,value) plus `path + ".json"` with s, N and resolution.
void write_profile_table(const ProfileTable& table, const std::string& path);

struct BoundReport {
    double min_ratio = 0.0;  ///< min of K(r) (1+r)^{N+2s}, negatives clamped to 0
    double max_ratio = 0.0;
    bool all_positive = false;
    bool bound_applies = true;  ///< the two-sided bound is stated for s in (0,1) only
    bool pass = false;
    std::string note;
};

/// Needs radii up to >= 20; DataError on non-finite entries.
BoundReport verify_profile_bounds(const ProfileTable& table);

/// E_s(x, t) at radius r by radial Fourier inversion with `panels` uniform
/// panels up to the cut-off.  The result is compared with a run on twice as
/// many panels; a disagreement above tolerance raises ResolutionError.
double mixed_kernel(const KernelParams& params, double r, std::size_t panels = 2048,
                    spectral::Symbol sym = spectral::Symbol::Mixed);

/// The periodized kernel on a grid (inverse DFT of the sampled multiplier,
/// centred at the origin).  Its trapezoid integral is exactly the
/// zero-frequency multiplier value, 1.
Field mixed_kernel_field(const GridSpec& grid, double s, double t, spectral::Symbol sym = spectral::Symbol::Mixed);

}  // namespace mixlab::kernels
