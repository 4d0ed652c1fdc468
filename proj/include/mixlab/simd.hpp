#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops used by the spectral and time-stepping layers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant.  The variant is picked once at runtime from CPUID; the environment
// variable MIXLAB_SIMD=scalar|avx2|auto overrides the choice.  Reductions in
// the AVX2 variant sum in four interleaved lanes, so they agree with the
// scalar reference to rounding, not bit-for-bit.  Within one process the
// selection is fixed, which keeps repeated runs byte-identical.

namespace mixlab::simd {

struct KernelTable {
    const char* name;

    /// interleaved complex spectrum (re, im, re, im, ...) times a real multiplier
    void (*scale_complex)(double* spectrum, const double* multiplier, std::size_t n_complex);
    void (*scale)(double* x, double factor, std::size_t n);
    /// out[i] = |x[i]|^p, p > 0
    void (*abs_pow)(double* out, const double* x, double p, std::size_t n);
    /// out = u + h_weight * weight * |u|^p + f_weight * forcing; weight/forcing may be null
    void (*duhamel_source)(double* out, const double* u, const double* weight, double h_weight,
                           double p, const double* forcing, double f_weight, std::size_t n);
    /// +inf when any entry is non-finite
    double (*max_abs)(const double* x, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*sum_abs)(const double* x, std::size_t n);
    double (*sum_sq)(const double* x, std::size_t n);
    double (*sum_abs_pow)(const double* x, double r, std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when the build has no AVX2 variant or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

const KernelTable& active_kernels();

/// "scalar", "avx2" or "auto"; unknown or unavailable names fall back to scalar.
void select_kernels(std::string_view name);

// Span front ends over the active table.

inline void scale_complex(std::span<double> spectrum, std::span<const double> multiplier) {
    active_kernels().scale_complex(spectrum.data(), multiplier.data(), multiplier.size());
}
inline void scale(std::span<double> x, double factor) {
    active_kernels().scale(x.data(), factor, x.size());
}
inline double max_abs(std::span<const double> x) { return active_kernels().max_abs(x.data(), x.size()); }
inline double sum(std::span<const double> x) { return active_kernels().sum(x.data(), x.size()); }
inline double sum_abs(std::span<const double> x) { return active_kernels().sum_abs(x.data(), x.size()); }
inline double sum_sq(std::span<const double> x) { return active_kernels().sum_sq(x.data(), x.size()); }
inline double sum_abs_pow(std::span<const double> x, double r) {
    return active_kernels().sum_abs_pow(x.data(), r, x.size());
}

}  // namespace mixlab::simd
