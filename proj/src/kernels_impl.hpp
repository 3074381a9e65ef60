#pragma once

#include "nsbench/kernels.hpp"

namespace nsbench::simd::detail {

extern const KernelTable kScalarTable;

#if defined(NSBENCH_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

#if defined(NSBENCH_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace nsbench::simd::detail
