#include "mixlab/fft.hpp"

#include "mixlab/error.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <utility>

namespace mixlab::fft {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

RealFft::RealFft(int dim, std::size_t points_per_dim) : dim_(dim), points_(points_per_dim) {
    if (dim != 1 && dim != 2) throw ArgumentError("RealFft: dimension must be 1 or 2");
    if (points_per_dim < 2) throw ArgumentError("RealFft: need at least two points per axis");
    real_count_ = dim == 1 ? points_ : points_ * points_;
    complex_count_ = dim == 1 ? points_ / 2 + 1 : points_ * (points_ / 2 + 1);

    real_ = static_cast<double*>(fftw_malloc(sizeof(double) * real_count_));
    spectrum_ = static_cast<double*>(fftw_malloc(sizeof(fftw_complex) * complex_count_));
    if (real_ == nullptr || spectrum_ == nullptr) {
        release();
        throw std::bad_alloc();
    }

    const int n = static_cast<int>(points_);
    auto* spec = reinterpret_cast<fftw_complex*>(spectrum_);
    std::lock_guard lock(planner_mutex());
    if (dim == 1) {
        forward_plan_ = fftw_plan_dft_r2c_1d(n, real_, spec, FFTW_ESTIMATE);
        inverse_plan_ = fftw_plan_dft_c2r_1d(n, spec, real_, FFTW_ESTIMATE);
    } else {
        forward_plan_ = fftw_plan_dft_r2c_2d(n, n, real_, spec, FFTW_ESTIMATE);
        inverse_plan_ = fftw_plan_dft_c2r_2d(n, n, spec, real_, FFTW_ESTIMATE);
    }
    if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
        release();
        throw NumericError("RealFft: FFTW planner failed");
    }
}

RealFft::~RealFft() { release(); }

RealFft::RealFft(RealFft&& other) noexcept
    : dim_(other.dim_),
      points_(other.points_),
      real_count_(other.real_count_),
      complex_count_(other.complex_count_),
      real_(std::exchange(other.real_, nullptr)),
      spectrum_(std::exchange(other.spectrum_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
    if (this != &other) {
        release();
        dim_ = other.dim_;
        points_ = other.points_;
        real_count_ = other.real_count_;
        complex_count_ = other.complex_count_;
        real_ = std::exchange(other.real_, nullptr);
        spectrum_ = std::exchange(other.spectrum_, nullptr);
        forward_plan_ = std::exchange(other.forward_plan_, nullptr);
        inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
    }
    return *this;
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }

void RealFft::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

void RealFft::release() noexcept {
    if (forward_plan_ != nullptr || inverse_plan_ != nullptr) {
        std::lock_guard lock(planner_mutex());
        if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
        if (inverse_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
    }
    forward_plan_ = inverse_plan_ = nullptr;
    if (real_ != nullptr) fftw_free(real_);
    if (spectrum_ != nullptr) fftw_free(spectrum_);
    real_ = spectrum_ = nullptr;
}

}  // namespace mixlab::fft
