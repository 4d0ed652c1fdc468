#include "mixlab/grid.hpp"

#include "mixlab/error.hpp"
#include "mixlab/simd.hpp"

#include <algorithm>
#include <sstream>

namespace mixlab {

void GridSpec::validate() const {
    if (dim != 1 && dim != 2) throw ArgumentError("grid: dimension must be 1 or 2");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ArgumentError("grid: half width must be positive");
    if (points < 64 || (points & (points - 1)) != 0) {
        throw ArgumentError("grid: points per axis must be a power of two >= 64, got " + std::to_string(points));
    }
}

std::string GridSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "N=" << dim << " L=" << half_width << " M=" << points;
    return os.str();
}

Field::Field(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) throw ArgumentError("field: value count does not match grid");
}

Field Field::radial(const GridSpec& g, const std::function<double(double)>& f) {
    Field out(g);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = f(out.radius(i));
    return out;
}

Field Field::from_function(const GridSpec& g, const std::function<double(double, double)>& f) {
    Field out(g);
    if (g.dim == 1) {
        for (std::size_t i = 0; i < g.points; ++i) out.values[i] = f(g.coord(i), 0.0);
    } else {
        for (std::size_t i = 0; i < g.points; ++i)
            for (std::size_t j = 0; j < g.points; ++j) out.values[i * g.points + j] = f(g.coord(i), g.coord(j));
    }
    return out;
}

Field Field::constant(const GridSpec& g, double c) {
    Field out(g);
    std::fill(out.values.begin(), out.values.end(), c);
    return out;
}

double Field::radius(std::size_t i) const {
    if (grid.dim == 1) return std::fabs(grid.coord(i));
    const double x = grid.coord(i / grid.points);
    const double y = grid.coord(i % grid.points);
    return std::hypot(x, y);
}

double Field::integral() const { return simd::sum(values) * grid.cell_volume(); }

double Field::mean() const { return simd::sum(values) / static_cast<double>(values.size()); }

bool Field::all_finite() const { return std::isfinite(simd::max_abs(values)); }

}  // namespace mixlab
