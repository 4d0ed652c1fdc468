#pragma once

#include "mixlab/simd.hpp"

namespace mixlab::simd::detail {

const KernelTable& scalar_table();

#if defined(MIXLAB_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace mixlab::simd::detail
