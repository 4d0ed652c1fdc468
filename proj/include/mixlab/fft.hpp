#pragma once

#include <cstddef>
#include <span>

namespace mixlab::fft {

/// Real-to-complex transform pair on a periodic M (N=1) or M x M (N=2) array.
///
/// The object owns SIMD-aligned work buffers and the FFTW plans bound to them.
/// Plans are created with FFTW_ESTIMATE, so results do not depend on timing.
/// Instances are not shared between threads; planner calls are serialized
/// internally, so independent instances may be created concurrently.
class RealFft {
public:
    RealFft(int dim, std::size_t points_per_dim);
    ~RealFft();
    RealFft(RealFft&& other) noexcept;
    RealFft& operator=(RealFft&& other) noexcept;
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    int dim() const noexcept { return dim_; }
    std::size_t points_per_dim() const noexcept { return points_; }
    std::size_t real_count() const noexcept { return real_count_; }
    /// Half-spectrum length: M/2+1 (N=1) or M*(M/2+1) (N=2), last axis halved.
    std::size_t complex_count() const noexcept { return complex_count_; }

    std::span<double> real() noexcept { return {real_, real_count_}; }
    /// Interleaved (re, im) pairs, length 2 * complex_count().
    std::span<double> spectrum() noexcept { return {spectrum_, 2 * complex_count_}; }

    void forward();
    /// Unnormalized inverse: forward followed by inverse scales by real_count().
    void inverse();

private:
    void release() noexcept;

    int dim_ = 0;
    std::size_t points_ = 0;
    std::size_t real_count_ = 0;
    std::size_t complex_count_ = 0;
    double* real_ = nullptr;
    double* spectrum_ = nullptr;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

}  // namespace mixlab::fft
