#include "kernels_impl.hpp"

#include <cmath>
#include <limits>

namespace mixlab::simd::detail {

namespace {

void scale_complex(double* spectrum, const double* multiplier, std::size_t n_complex) {
    for (std::size_t k = 0; k < n_complex; ++k) {
        spectrum[2 * k] *= multiplier[k];
        spectrum[2 * k + 1] *= multiplier[k];
    }
}

void scale(double* x, double factor, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= factor;
}

void abs_pow(double* out, const double* x, double p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(std::fabs(x[i]), p);
}

void duhamel_source(double* out, const double* u, const double* weight, double h_weight, double p,
                    const double* forcing, double f_weight, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double src = h_weight * std::pow(std::fabs(u[i]), p);
        if (weight != nullptr) src *= weight[i];
        double v = u[i] + src;
        if (forcing != nullptr) v += f_weight * forcing[i];
        out[i] = v;
    }
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (!std::isfinite(a)) return std::numeric_limits<double>::infinity();
        if (a > m) m = a;
    }
    return m;
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double sum_abs(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
    return s;
}

double sum_sq(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double sum_abs_pow(const double* x, double r, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::pow(std::fabs(x[i]), r);
    return s;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar", &scale_complex, &scale, &abs_pow, &duhamel_source, &max_abs,
        &sum,     &sum_abs,       &sum_sq, &sum_abs_pow,
    };
    return table;
}

}  // namespace mixlab::simd::detail
