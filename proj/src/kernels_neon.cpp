#include "kernels_impl.hpp"

#include <arm_neon.h>

#include <cmath>

namespace nsbench::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) total += x[i];
  return total;
}

double sum_abs_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabsq_f64(vld1q_f64(x + i)));
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) total += std::fabs(x[i]);
  return total;
}

double sum_sqrt_abs_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vsqrtq_f64(vabsq_f64(vld1q_f64(x + i))));
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) total += std::sqrt(std::fabs(x[i]));
  return total;
}

CentralSums central_sums_neon(const double* x, std::size_t n, double center) {
  const float64x2_t c = vdupq_n_f64(center);
  float64x2_t a2 = vdupq_n_f64(0.0);
  float64x2_t a3 = vdupq_n_f64(0.0);
  float64x2_t a4 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), c);
    const float64x2_t d2 = vmulq_f64(d, d);
    a2 = vaddq_f64(a2, d2);
    a3 = vfmaq_f64(a3, d2, d);
    a4 = vfmaq_f64(a4, d2, d2);
  }
  CentralSums out{vaddvq_f64(a2), vaddvq_f64(a3), vaddvq_f64(a4)};
  for (; i < n; ++i) {
    const double d = x[i] - center;
    const double d2 = d * d;
    out.s2 += d2;
    out.s3 += d2 * d;
    out.s4 += d2 * d2;
  }
  return out;
}

}  // namespace

const KernelTable kNeonTable{
    "neon",       dot_neon,          axpy_neon,         sum_neon,
    sum_abs_neon, sum_sqrt_abs_neon, central_sums_neon,
};

}  // namespace nsbench::simd::detail
