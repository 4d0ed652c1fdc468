#pragma once

#include "mixlab/fft.hpp"
#include "mixlab/grid.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

// Fourier multipliers on the periodic grid: e^{tL}, (-Delta)^s and
// L = Delta - (-Delta)^s, with L having the symbol -(|xi|^2 + |xi|^{2s}).

namespace mixlab::spectral {

/// Which part of the symbol sigma(xi) = |xi|^2 + |xi|^{2s} is active.
/// PureHeat and PureFractional are diagnostic modes.
enum class Symbol { Mixed, PureHeat, PureFractional };

Symbol parse_symbol(const std::string& name);
std::string symbol_name(Symbol sym);

double symbol_value(Symbol sym, double s, double xi_abs);

/// FFT plan plus the |xi| table of the half spectrum, for repeated
/// multiplier application on one grid.  Not shared between threads.
class Workspace {
public:
    explicit Workspace(const GridSpec& grid);

    const GridSpec& grid() const noexcept { return grid_; }
    /// |xi| for every half-spectrum entry, in FFTW r2c layout
    std::span<const double> wavenumbers() const noexcept { return xi_; }

    /// Tabulate m(|xi|) over the half spectrum.
    std::vector<double> multiplier(const std::function<double(double)>& m) const;
    std::vector<double> semigroup_multiplier(double s, double t, Symbol sym = Symbol::Mixed) const;

    /// out = F^{-1}[ multiplier * F[in] ]; in and out may alias.
    void apply(std::span<const double> in, std::span<double> out, std::span<const double> multiplier);

private:
    GridSpec grid_;
    fft::RealFft fft_;
    std::vector<double> xi_;
};

void check_same_grid(const Field& a, const Field& b);

Field apply_multiplier(const Field& f, const std::function<double(double)>& m);
/// t >= 0; multiplier e^{-t sigma(xi)}
Field apply_semigroup(const Field& f, double s, double t, Symbol sym = Symbol::Mixed);
/// multiplier |xi|^{2s}, s in (0, 1]
Field apply_fractional_laplacian(const Field& f, double s);
/// multiplier -(|xi|^2 + |xi|^{2s})
Field apply_generator(const Field& f, double s);

double sup_norm(const Field& f);
/// (sum |v|^r dx^N)^{1/r}, r >= 1
double lp_norm(const Field& f, double r);

/// Share of the L1 mass held by cells within 2 dx of the periodic boundary.
double boundary_mass_fraction(const Field& f);

struct SmoothingProbe {
    std::vector<double> t;
    std::vector<double> norm;       ///< ||e^{tL} phi||_q
    double slope = 0.0;             ///< log-log slope over the larger half of t
    double expected_slope = 0.0;    ///< -(N/2s)(1/r - 1/q)
    double max_boundary_fraction = 0.0;
};

/// q = +inf selects the sup norm.  phi is a fixed C-infinity bump of radius 1.
SmoothingProbe smoothing_estimate_probe(const GridSpec& grid, double s, double r, double q,
                                        const std::vector<double>& t_values, double guard = 1e-8);

struct DecayProbe {
    std::vector<double> t;
    std::vector<double> sup;         ///< ||e^{tL} u0||_inf
    std::vector<double> normalized;  ///< t^{N/2s} ||e^{tL} u0||_inf
    double c1 = 0.0;
    double c2 = 0.0;
    double band_ratio = 0.0;  ///< c2 / c1
    double slope = 0.0;       ///< log-log slope of sup over all t
    double max_boundary_fraction = 0.0;
};

DecayProbe decay_bounds_probe(const Field& u0, double s, const std::vector<double>& t_values, double guard = 1e-8);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct ConvexFunction {
    enum class Kind { Linear, Square, Power, Exponential };
    Kind kind = Kind::Square;
    double m = 2.0;  ///< exponent for Power (even or used on nonnegative data)

    double value(double x) const;
    double derivative(double x) const;
    std::string describe() const;
};

struct ConvexityReport {
    double max_violation = 0.0;  ///< max over grid of (-Delta)^s G(phi) - G'(phi)(-Delta)^s phi
    double scale = 0.0;          ///< max(sup |(-Delta)^s G(phi)|, sup |G'(phi) (-Delta)^s phi|)
    double relative = 0.0;       ///< max(max_violation, 0) / scale
    bool holds = false;          ///< max_violation <= tolerance * scale
};

ConvexityReport convexity_inequality_check(const Field& phi, double s, const ConvexFunction& G,
                                           double tolerance = 1e-6);

/// Smooth bump exp(1 - 1/(1 - (r/radius)^2)) for r < radius, height 1.
double bump(double r, double radius = 1.0);

// Field I/O ------------------------------------------------------------------

/// '#'-prefixed header, then "i,x,value" (1D) or "i,j,x,y,value" (2D), %.17g.
void write_field_csv(const Field& f, const std::string& path);
Field read_field_csv(const std::string& path);

/// Raw little-endian float64 at `path`, JSON header at `path + ".json"`.
void write_field_binary(const Field& f, const std::string& path);
Field read_field_binary(const std::string& path);

}  // namespace mixlab::spectral
