#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace mixlab::simd {

namespace {

bool cpu_has_avx2() {
#if defined(MIXLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* resolve(std::string_view name) {
    if (name == "scalar") return &scalar_kernels();
    const KernelTable* fast = avx2_kernels();
    if ((name == "avx2" || name == "auto") && fast != nullptr) return fast;
    return &scalar_kernels();
}

const KernelTable* initial_selection() {
    const char* env = std::getenv("MIXLAB_SIMD");
    return resolve(env != nullptr ? std::string_view(env) : std::string_view("auto"));
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_selection()};
    return table;
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::scalar_table(); }

const KernelTable* avx2_kernels() {
#if defined(MIXLAB_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    return supported ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_kernels() { return *current().load(std::memory_order_acquire); }

void select_kernels(std::string_view name) { current().store(resolve(name), std::memory_order_release); }

}  // namespace mixlab::simd
