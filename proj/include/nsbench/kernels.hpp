#pragma once

// Data-parallel inner loops shared by feature extraction, probe fitting and
// geometry metrics. Each kernel has a scalar reference implementation and,
// where the build and CPU allow, an AVX2/FMA (x86-64) or NEON (AArch64)
// variant. The variant is chosen once at startup; NSBENCH_KERNELS=scalar
// forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace nsbench::simd {

// Sums of powers of deviations from a supplied center.
struct CentralSums {
  double s2 = 0.0;
  double s3 = 0.0;
  double s4 = 0.0;
};

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*sum_abs)(const double* x, std::size_t n);
  double (*sum_sqrt_abs)(const double* x, std::size_t n);
  CentralSums (*central_sums)(const double* x, std::size_t n, double center);
};

const KernelTable& scalar_kernels() noexcept;
// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

// Kernel table used by every caller in the process.
const KernelTable& active_kernels() noexcept;

// Overrides active_kernels() on the current thread for the scope's lifetime.
// Used by equivalence tests to run whole pipelines on one variant.
class ScopedKernelOverride {
 public:
  explicit ScopedKernelOverride(const KernelTable& table) noexcept;
  ~ScopedKernelOverride();
  ScopedKernelOverride(const ScopedKernelOverride&) = delete;
  ScopedKernelOverride& operator=(const ScopedKernelOverride&) = delete;

 private:
  const KernelTable* previous_;
};

// Span conveniences over the active table. Lengths must match.
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
CentralSums central_sums(std::span<const double> x, double center);

}  // namespace nsbench::simd
