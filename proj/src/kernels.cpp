#include "kernels_impl.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace nsbench::simd {
namespace {

thread_local const KernelTable* tls_override = nullptr;

bool cpu_has_avx2() noexcept {
#if defined(NSBENCH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select_kernels() noexcept {
  const char* env = std::getenv("NSBENCH_KERNELS");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return scalar_kernels();
  if (const auto* t = avx2_kernels()) return *t;
  if (const auto* t = neon_kernels()) return *t;
  return scalar_kernels();
}

void check_same(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}

}  // namespace

const KernelTable& scalar_kernels() noexcept { return detail::kScalarTable; }

const KernelTable* avx2_kernels() noexcept {
#if defined(NSBENCH_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() noexcept {
#if defined(NSBENCH_HAVE_NEON)
  return &detail::kNeonTable;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() noexcept {
  if (tls_override != nullptr) return *tls_override;
  static const KernelTable& selected = select_kernels();
  return selected;
}

ScopedKernelOverride::ScopedKernelOverride(const KernelTable& table) noexcept
    : previous_(tls_override) {
  tls_override = &table;
}

ScopedKernelOverride::~ScopedKernelOverride() { tls_override = previous_; }

double dot(std::span<const double> a, std::span<const double> b) {
  check_same(a.size(), b.size());
  return active_kernels().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size());
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) { return active_kernels().sum(x.data(), x.size()); }

CentralSums central_sums(std::span<const double> x, double center) {
  return active_kernels().central_sums(x.data(), x.size(), center);
}

}  // namespace nsbench::simd
