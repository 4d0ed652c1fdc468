// AVX2/FMA variants of the kernels in kernels_scalar.cpp.  Compiled with
// -mavx2 -mfma; only reachable after the dispatcher has checked CPUID.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

namespace mixlab::simd::detail {

namespace {

constexpr std::size_t kLanes = 4;

inline __m256d abs_pd(__m256d v) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign, v);
}

inline double hsum(__m256d v) {
    alignas(32) double lane[kLanes];
    _mm256_store_pd(lane, v);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

// Natural log for positive normal doubles.  After reducing x = m 2^e with
// m in [sqrt(1/2), sqrt(2)), log m = 2 atanh(f), f = (m-1)/(m+1), |f| < 0.172,
// summed as an odd series in f up to f^23.
inline __m256d log_pd(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
    const __m256i half_exp = _mm256_set1_epi64x(0x3FE0000000000000LL);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_exp));

    // biased exponent -> double via the 2^52 trick
    const __m256i exp_field = _mm256_srli_epi64(bits, 52);
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_field, magic)),
                              _mm256_set1_pd(4503599627370496.0));
    e = _mm256_sub_pd(e, _mm256_set1_pd(1022.0));

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d below = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
    e = _mm256_sub_pd(e, _mm256_and_pd(below, one));
    m = _mm256_add_pd(m, _mm256_and_pd(below, m));

    const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d f2 = _mm256_mul_pd(f, f);
    __m256d s = _mm256_set1_pd(1.0 / 23.0);
    for (int k = 10; k >= 0; --k) s = _mm256_fmadd_pd(s, f2, _mm256_set1_pd(1.0 / (2 * k + 1)));
    const __m256d logm = _mm256_mul_pd(_mm256_add_pd(f, f), s);

    // e * ln2 with ln2 split so that e * hi is exact
    __m256d r = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), logm);
    return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
}

// exp for arguments already clamped to the normal range.
inline __m256d exp_pd(__m256d x) {
    const __m256d n = _mm256_floor_pd(
        _mm256_fmadd_pd(x, _mm256_set1_pd(1.4426950408889634073599), _mm256_set1_pd(0.5)));
    x = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125E-1), x);
    x = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212E-6), x);
    const __m256d xx = _mm256_mul_pd(x, x);

    __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
    p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(3.02994407707441961300E-2));
    p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910E-1));
    p = _mm256_mul_pd(p, x);

    __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
    q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.52448340349684104192E-3));
    q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766E-1));
    q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009E0));

    __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

    const __m128i n32 = _mm256_cvtpd_epi32(n);
    const __m256i shift = _mm256_slli_epi64(_mm256_cvtepi32_epi64(n32), 52);
    return _mm256_castsi256_pd(_mm256_add_epi64(_mm256_castpd_si256(r), shift));
}

// |x|^p for p > 0.  Subnormal inputs map to 0, overflow to +inf, NaN stays NaN.
inline __m256d abs_pow_pd(__m256d x, __m256d p) {
    const __m256d a = abs_pd(x);
    const __m256d tiny = _mm256_cmp_pd(a, _mm256_set1_pd(std::numeric_limits<double>::min()), _CMP_LT_OQ);
    const __m256d safe = _mm256_blendv_pd(a, _mm256_set1_pd(1.0), tiny);
    const __m256d is_inf = _mm256_cmp_pd(a, _mm256_set1_pd(std::numeric_limits<double>::infinity()), _CMP_EQ_OQ);
    const __m256d nan = _mm256_cmp_pd(a, a, _CMP_UNORD_Q);

    const __m256d y = _mm256_mul_pd(p, log_pd(_mm256_blendv_pd(safe, _mm256_set1_pd(1.0), _mm256_or_pd(is_inf, nan))));
    const __m256d hi = _mm256_cmp_pd(y, _mm256_set1_pd(709.78), _CMP_GT_OQ);
    const __m256d lo = _mm256_cmp_pd(y, _mm256_set1_pd(-708.39), _CMP_LT_OQ);
    const __m256d clamped = _mm256_min_pd(_mm256_max_pd(y, _mm256_set1_pd(-708.39)), _mm256_set1_pd(709.78));
    __m256d r = exp_pd(clamped);

    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    r = _mm256_blendv_pd(r, inf, _mm256_or_pd(hi, is_inf));
    r = _mm256_blendv_pd(r, _mm256_setzero_pd(), _mm256_or_pd(lo, tiny));
    r = _mm256_blendv_pd(r, a, nan);
    return r;
}

void scale_complex(double* spectrum, const double* multiplier, std::size_t n_complex) {
    std::size_t k = 0;
    for (; k + 2 <= n_complex; k += 2) {
        // (m0, m0, m1, m1) against (re0, im0, re1, im1)
        const __m128d m = _mm_loadu_pd(multiplier + k);
        const __m256d mm = _mm256_permute4x64_pd(_mm256_castpd128_pd256(m), 0b01010000);
        const __m256d s = _mm256_loadu_pd(spectrum + 2 * k);
        _mm256_storeu_pd(spectrum + 2 * k, _mm256_mul_pd(s, mm));
    }
    for (; k < n_complex; ++k) {
        spectrum[2 * k] *= multiplier[k];
        spectrum[2 * k + 1] *= multiplier[k];
    }
}

void scale(double* x, double factor, std::size_t n) {
    const __m256d f = _mm256_set1_pd(factor);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
    for (; i < n; ++i) x[i] *= factor;
}

void abs_pow(double* out, const double* x, double p, std::size_t n) {
    const __m256d pv = _mm256_set1_pd(p);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, abs_pow_pd(_mm256_loadu_pd(x + i), pv));
    for (; i < n; ++i) out[i] = std::pow(std::fabs(x[i]), p);
}

void duhamel_source(double* out, const double* u, const double* weight, double h_weight, double p,
                    const double* forcing, double f_weight, std::size_t n) {
    const __m256d pv = _mm256_set1_pd(p);
    const __m256d hw = _mm256_set1_pd(h_weight);
    const __m256d fw = _mm256_set1_pd(f_weight);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d ui = _mm256_loadu_pd(u + i);
        __m256d src = _mm256_mul_pd(hw, abs_pow_pd(ui, pv));
        if (weight != nullptr) src = _mm256_mul_pd(src, _mm256_loadu_pd(weight + i));
        __m256d v = _mm256_add_pd(ui, src);
        if (forcing != nullptr) v = _mm256_fmadd_pd(fw, _mm256_loadu_pd(forcing + i), v);
        _mm256_storeu_pd(out + i, v);
    }
    for (; i < n; ++i) {
        double src = h_weight * std::pow(std::fabs(u[i]), p);
        if (weight != nullptr) src *= weight[i];
        double v = u[i] + src;
        if (forcing != nullptr) v += f_weight * forcing[i];
        out[i] = v;
    }
}

double max_abs(const double* x, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    __m256d bad = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d v = _mm256_loadu_pd(x + i);
        bad = _mm256_or_pd(bad, _mm256_cmp_pd(v, v, _CMP_UNORD_Q));
        m = _mm256_max_pd(m, abs_pd(v));
    }
    const double inf = std::numeric_limits<double>::infinity();
    if (_mm256_movemask_pd(bad) != 0) return inf;
    alignas(32) double lane[kLanes];
    _mm256_store_pd(lane, m);
    double r = std::fmax(std::fmax(lane[0], lane[1]), std::fmax(lane[2], lane[3]));
    for (; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (!std::isfinite(a)) return inf;
        if (a > r) r = a;
    }
    return std::isfinite(r) ? r : inf;
}

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double sum_abs(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(x + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(x[i]);
    return s;
}

double sum_sq(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

double sum_abs_pow(const double* x, double r, std::size_t n) {
    const __m256d rv = _mm256_set1_pd(r);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) acc = _mm256_add_pd(acc, abs_pow_pd(_mm256_loadu_pd(x + i), rv));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::pow(std::fabs(x[i]), r);
    return s;
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{
        "avx2", &scale_complex, &scale, &abs_pow, &duhamel_source, &max_abs,
        &sum,   &sum_abs,       &sum_sq, &sum_abs_pow,
    };
    return table;
}

}  // namespace mixlab::simd::detail
