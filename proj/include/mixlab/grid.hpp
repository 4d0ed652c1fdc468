#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace mixlab {

/// Periodic uniform grid on [-L, L)^N, N in {1, 2}, M points per axis.
struct GridSpec {
    int dim = 1;
    double half_width = 40.0;
    std::size_t points = 512;

    /// Throws ArgumentError unless N in {1,2}, L > 0 and M is a power of two >= 64.
    void validate() const;

    double dx() const noexcept { return 2.0 * half_width / static_cast<double>(points); }
    std::size_t size() const noexcept { return dim == 1 ? points : points * points; }
    double cell_volume() const noexcept { return dim == 1 ? dx() : dx() * dx(); }
    double coord(std::size_t i) const noexcept { return -half_width + static_cast<double>(i) * dx(); }
    /// pi / L, the spacing of the frequency lattice
    double frequency_step() const noexcept { return M_PI / half_width; }

    bool operator==(const GridSpec& o) const noexcept {
        return dim == o.dim && half_width == o.half_width && points == o.points;
    }
    std::string describe() const;
};

/// Real samples on a GridSpec, lexicographic (row-major) in 2D.
struct Field {
    GridSpec grid;
    std::vector<double> values;
    bool diverged = false;

    Field() = default;
    explicit Field(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}
    Field(const GridSpec& g, std::vector<double> v);

    /// f(|x|) sampled at every node (radial profile)
    static Field radial(const GridSpec& g, const std::function<double(double)>& f);
    /// f(x) in 1D, f(x, y) in 2D
    static Field from_function(const GridSpec& g, const std::function<double(double, double)>& f);
    static Field constant(const GridSpec& g, double c);

    std::size_t size() const noexcept { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    /// Euclidean |x| of node i
    double radius(std::size_t i) const;
    /// sum(values) * dx^N
    double integral() const;
    double mean() const;
    bool all_finite() const;
};

}  // namespace mixlab
