#include "kernels_impl.hpp"

#include <cmath>

namespace nsbench::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sum_abs_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

double sum_sqrt_abs_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::sqrt(std::fabs(x[i]));
  return acc;
}

CentralSums central_sums_scalar(const double* x, std::size_t n, double center) {
  CentralSums out;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - center;
    const double d2 = d * d;
    out.s2 += d2;
    out.s3 += d2 * d;
    out.s4 += d2 * d2;
  }
  return out;
}

}  // namespace

const KernelTable kScalarTable{
    "scalar",        dot_scalar,          axpy_scalar,        sum_scalar,
    sum_abs_scalar,  sum_sqrt_abs_scalar, central_sums_scalar,
};

}  // namespace nsbench::simd::detail
