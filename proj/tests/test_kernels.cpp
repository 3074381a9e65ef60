#include <doctest.h>

#include <cmath>
#include <vector>

#include "nsbench/features.hpp"
#include "nsbench/kernels.hpp"
#include "nsbench/probes.hpp"
#include "nsbench/rng.hpp"
#include "nsbench/synthgen.hpp"

using namespace nsbench;
namespace simd = nsbench::simd;

namespace {

std::vector<const simd::KernelTable*> variants() {
  std::vector<const simd::KernelTable*> v;
  if (const auto* t = simd::avx2_kernels()) v.push_back(t);
  if (const auto* t = simd::neon_kernels()) v.push_back(t);
  return v;
}

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(0.3, 2.0);
  return v;
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(a)); }

}  // namespace

TEST_CASE("kernels: scalar reference against plain loops") {
  const auto& k = simd::scalar_kernels();
  Rng rng(5);
  const auto a = random_vec(rng, 37), b = random_vec(rng, 37);
  long double dot = 0, s = 0, sa = 0, sq = 0, c2 = 0, c3 = 0, c4 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    s += a[i];
    sa += std::fabs(a[i]);
    sq += std::sqrt(std::fabs(a[i]));
    const long double d = a[i] - 0.25;
    c2 += d * d;
    c3 += d * d * d;
    c4 += d * d * d * d;
  }
  CHECK(close(k.dot(a.data(), b.data(), a.size()), dot, 1e-13));
  CHECK(close(k.sum(a.data(), a.size()), s, 1e-13));
  CHECK(close(k.sum_abs(a.data(), a.size()), sa, 1e-13));
  CHECK(close(k.sum_sqrt_abs(a.data(), a.size()), sq, 1e-13));
  const auto cs = k.central_sums(a.data(), a.size(), 0.25);
  CHECK(close(cs.s2, c2, 1e-13));
  CHECK(close(cs.s3, c3, 1e-13));
  CHECK(close(cs.s4, c4, 1e-13));
}

TEST_CASE("kernels: SIMD variants match scalar for every tail length") {
  const auto vs = variants();
  if (vs.empty()) {
    MESSAGE("no SIMD variant available on this host; scalar only");
    return;
  }
  const auto& ref = simd::scalar_kernels();
  Rng rng(11);
  for (const auto* v : vs) {
    CAPTURE(v->name);
    for (std::size_t n = 0; n <= 37; ++n) {
      CAPTURE(n);
      const auto a = random_vec(rng, n), b = random_vec(rng, n);
      CHECK(close(v->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), 1e-12));
      CHECK(close(v->sum(a.data(), n), ref.sum(a.data(), n), 1e-12));
      CHECK(close(v->sum_abs(a.data(), n), ref.sum_abs(a.data(), n), 1e-12));
      CHECK(close(v->sum_sqrt_abs(a.data(), n), ref.sum_sqrt_abs(a.data(), n), 1e-12));
      const auto cv = v->central_sums(a.data(), n, 0.1);
      const auto cr = ref.central_sums(a.data(), n, 0.1);
      CHECK(close(cv.s2, cr.s2, 1e-12));
      CHECK(close(cv.s3, cr.s3, 1e-12));
      CHECK(close(cv.s4, cr.s4, 1e-12));
      auto y1 = b, y2 = b;
      v->axpy(-1.7, a.data(), y1.data(), n);
      ref.axpy(-1.7, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 1e-14));
    }
  }
}

TEST_CASE("kernels: span wrappers reject mismatched lengths") {
  std::vector<double> a(3), b(4);
  CHECK_THROWS_AS(simd::dot(a, b), std::invalid_argument);
  CHECK_THROWS_AS(simd::axpy(1.0, a, b), std::invalid_argument);
}

TEST_CASE("kernels: override scope restores the previous table") {
  const auto* before = &simd::active_kernels();
  {
    simd::ScopedKernelOverride o(simd::scalar_kernels());
    CHECK(&simd::active_kernels() == &simd::scalar_kernels());
  }
  CHECK(&simd::active_kernels() == before);
}

TEST_CASE("kernels: end-to-end features and probe agree across variants") {
  const auto vs = variants();
  if (vs.empty()) return;
  ShiftDatasetConfig cfg;
  cfg.n_per_class = 100;
  cfg.master_seed = 9;
  const Dataset ds = gen_dataset(cfg);
  SplitSpec split{0.7, true, 1};

  Matrix f_ref;
  TrialResult t_ref;
  {
    simd::ScopedKernelOverride o(simd::scalar_kernels());
    f_ref = featurize_dataset(ds.windows, FeatureSetKind::StatsDynamics);
    t_ref = run_probe_trial(f_ref, ds.manifest, ProbeTask::ShiftClass, split, ProbeConfig{});
  }
  for (const auto* v : vs) {
    simd::ScopedKernelOverride o(*v);
    const Matrix f = featurize_dataset(ds.windows, FeatureSetKind::StatsDynamics);
    REQUIRE(f.rows() == f_ref.rows());
    double worst = 0;
    for (std::size_t i = 0; i < f.data().size(); ++i) {
      worst = std::max(worst, std::fabs(f.data()[i] - f_ref.data()[i]) / std::max(1.0, std::fabs(f_ref.data()[i])));
    }
    CHECK(worst < 1e-10);
    const TrialResult t = run_probe_trial(f, ds.manifest, ProbeTask::ShiftClass, split, ProbeConfig{});
    CHECK(t.macro_f1 == doctest::Approx(t_ref.macro_f1).epsilon(0.01));
    CHECK(t.fit.objective == doctest::Approx(t_ref.fit.objective).epsilon(1e-6));
  }
}
