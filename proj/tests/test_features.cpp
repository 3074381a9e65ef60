#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nsbench/error.hpp"
#include "nsbench/features.hpp"
#include "nsbench/synthgen.hpp"
#include "oracles.hpp"

using namespace nsbench;

namespace {

double feature(const FeatureVector& f, std::string_view name) {
  for (std::size_t i = 0; i < f.names.size(); ++i) {
    if (f.names[i] == name) return f.values[i];
  }
  FAIL("no feature " << name);
  return 0;
}

// Type 7 quantile by sorting.
double quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double h = (x.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - lo) * (x[hi] - x[lo]);
}

double biased_acf(const std::vector<double>& x, std::size_t k) {
  const long double m = oracle::mean(x);
  long double num = 0, den = 0;
  for (std::size_t t = 0; t < x.size(); ++t) den += (x[t] - m) * (x[t] - m);
  for (std::size_t t = k; t < x.size(); ++t) num += (x[t] - m) * (x[t - k] - m);
  return static_cast<double>(num / den);
}

}  // namespace

TEST_CASE("features: names and counts") {
  CHECK(feature_names(FeatureSetKind::Stats).size() == kStatsFeatureCount);
  CHECK(feature_names(FeatureSetKind::StatsDynamics).size() == kStatsFeatureCount + kDynamicsFeatureCount);
  CHECK(feature_set_from_string("stats") == FeatureSetKind::Stats);
  CHECK(feature_set_from_string("statsdyn") == FeatureSetKind::StatsDynamics);
  CHECK_THROWS_AS(feature_set_from_string("xyz"), ValidationError);
}

TEST_CASE("features: constant window conventions") {
  const std::vector<double> x(16, 0.5);
  const auto f = stats_features(x);
  CHECK(feature(f, "mean") == doctest::Approx(0.5));
  CHECK(feature(f, "std") == 0.0);
  CHECK(feature(f, "min") == 0.5);
  CHECK(feature(f, "max") == 0.5);
  CHECK(feature(f, "range") == 0.0);
  CHECK(feature(f, "iqr") == 0.0);
  CHECK(feature(f, "rms") == doctest::Approx(0.5));
  CHECK(feature(f, "skewness") == 0.0);
  CHECK(feature(f, "kurtosis") == 0.0);
  const auto d = dynamics_features(x);
  CHECK(feature(d, "slope") == 0.0);
  CHECK(feature(d, "acf1") == 0.0);
  CHECK(feature(d, "acf2") == 0.0);
  CHECK(feature(d, "acf3") == 0.0);
}

TEST_CASE("features: symmetric window") {
  std::vector<double> x;
  for (int i = 0; i < 20; ++i) x.push_back(i % 2 ? 1.0 : -1.0);
  const auto f = stats_features(x);
  CHECK(feature(f, "skewness") == doctest::Approx(0.0));
  CHECK(feature(f, "mean") == doctest::Approx(0.0));
  CHECK(feature(f, "rms") == doctest::Approx(1.0));
  CHECK(feature(f, "kurtosis") == doctest::Approx(-2.0));
}

TEST_CASE("features: stats against direct computation") {
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(5 + rep * 7);
    for (auto& v : x) v = rng.normal(0.2, 1.5);
    const auto f = stats_features(x);
    const long double m = oracle::mean(x);
    long double m2 = 0, m3 = 0, m4 = 0, sa = 0, sq = 0, s2 = 0;
    for (double v : x) {
      m2 += (v - m) * (v - m);
      m3 += (v - m) * (v - m) * (v - m);
      m4 += (v - m) * (v - m) * (v - m) * (v - m);
      sa += std::fabs(v);
      sq += std::sqrt(std::fabs(v));
      s2 += v * v;
    }
    const auto n = static_cast<long double>(x.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
    CHECK(feature(f, "q05") == doctest::Approx(quantile(x, 0.05)));
    CHECK(feature(f, "q10") == doctest::Approx(quantile(x, 0.10)));
    CHECK(feature(f, "q25") == doctest::Approx(quantile(x, 0.25)));
    CHECK(feature(f, "q50") == doctest::Approx(quantile(x, 0.50)));
    CHECK(feature(f, "q75") == doctest::Approx(quantile(x, 0.75)));
    CHECK(feature(f, "q90") == doctest::Approx(quantile(x, 0.90)));
    CHECK(feature(f, "q95") == doctest::Approx(quantile(x, 0.95)));
    CHECK(feature(f, "iqr") == doctest::Approx(quantile(x, 0.75) - quantile(x, 0.25)));
    CHECK(feature(f, "mean") == doctest::Approx(static_cast<double>(m)));
    CHECK(feature(f, "std") == doctest::Approx(static_cast<double>(std::sqrt(m2))));
    CHECK(feature(f, "min") == *std::min_element(x.begin(), x.end()));
    CHECK(feature(f, "max") == *std::max_element(x.begin(), x.end()));
    CHECK(feature(f, "abs_mean") == doctest::Approx(static_cast<double>(sa / n)));
    CHECK(feature(f, "rms") == doctest::Approx(static_cast<double>(std::sqrt(s2 / n))));
    CHECK(feature(f, "sqrt_amp") == doctest::Approx(static_cast<double>((sq / n) * (sq / n))));
    CHECK(feature(f, "skewness") == doctest::Approx(static_cast<double>(m3 / std::pow(m2, 1.5L))));
    CHECK(feature(f, "kurtosis") == doctest::Approx(static_cast<double>(m4 / (m2 * m2) - 3)));

    const auto d = dynamics_features(x);
    for (std::size_t k = 1; k <= 3; ++k) {
      CHECK(d.values[2 + k] == doctest::Approx(biased_acf(x, k)));
    }
  }
}

TEST_CASE("features: exact ramp") {
  const std::size_t n = 50;
  const double alpha = 0.8;
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = alpha * t / (n - 1.0);
  const auto d = dynamics_features(x);
  CHECK(feature(d, "slope") == doctest::Approx(alpha / (n - 1)));
  CHECK(feature(d, "diff_mean") == doctest::Approx(alpha / (n - 1)));
  CHECK(feature(d, "diff_std") == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("features: short windows are rejected") {
  const std::vector<double> x3(3, 1.0), x4{1, 2, 3, 4};
  CHECK_THROWS_AS(stats_features(x3), DomainError);
  CHECK_NOTHROW(stats_features(x4));
  CHECK_THROWS_AS(dynamics_features(x4), DomainError);
}

TEST_CASE("features: translation and scale behaviour") {
  Rng rng(2);
  std::vector<double> x(64), y(64);
  for (auto& v : x) v = rng.normal();
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * x[i] + 10.0;
  const auto fx = window_features(x, FeatureSetKind::StatsDynamics);
  const auto fy = window_features(y, FeatureSetKind::StatsDynamics);
  const auto names = feature_names(FeatureSetKind::StatsDynamics);
  for (std::size_t i = 0; i < names.size(); ++i) {
    CAPTURE(names[i]);
    if (names[i] == "skewness" || names[i] == "kurtosis" || names[i].starts_with("acf")) {
      CHECK(fy[i] == doctest::Approx(fx[i]).epsilon(1e-9));
    }
    if (names[i] == "std" || names[i] == "iqr" || names[i] == "range" || names[i] == "diff_std" ||
        names[i] == "slope") {
      CHECK(fy[i] == doctest::Approx(3.0 * fx[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("features: Gaussian marginals have zero skew and excess kurtosis") {
  Rng rng(31);
  double sk = 0, ku = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto w = gen_window({0.5, 0.06, 0.6, 512}, ShiftSpec::stationary(), rng);
    const auto f = stats_features(w.values);
    sk += feature(f, "skewness");
    ku += feature(f, "kurtosis");
  }
  CHECK(std::fabs(sk / n) < 0.05);
  CHECK(std::fabs(ku / n) < 0.05);
}

TEST_CASE("features: ACF recovers phi^k") {
  Rng rng(17);
  const int n = 10000;
  double acf[3] = {0, 0, 0};
  double wn = 0;
  for (int i = 0; i < n; ++i) {
    const auto w = gen_window({0.5, 0.06, 0.6, 512}, ShiftSpec::stationary(), rng);
    const auto d = dynamics_features(w.values);
    for (int k = 0; k < 3; ++k) acf[k] += d.values[3 + k];
    const auto u = gen_window({0.5, 0.06, 0.0, 512}, ShiftSpec::stationary(), rng);
    wn += dynamics_features(u.values).values[3];
  }
  CHECK(std::fabs(acf[0] / n - 0.6) < 0.02);
  CHECK(std::fabs(acf[1] / n - 0.36) < 0.03);
  CHECK(std::fabs(acf[2] / n - 0.216) < 0.03);
  CHECK(std::fabs(wn / n) < 0.02);
}

TEST_CASE("features: dataset matrix layout and prefix property") {
  ShiftDatasetConfig cfg;
  cfg.n_per_class = 50;
  const auto ds = gen_dataset(cfg);
  const Matrix s = featurize_dataset(ds.windows, FeatureSetKind::Stats);
  const Matrix sd = featurize_dataset(ds.windows, FeatureSetKind::StatsDynamics, 3);
  CHECK(s.rows() == 200);
  CHECK(s.cols() == 18);
  CHECK(sd.cols() == 24);
  CHECK(sd.left_cols(18) == s);
  CHECK(featurize_dataset(ds.windows, FeatureSetKind::Stats) == s);
}

TEST_CASE("features: errors name the window") {
  std::vector<Window> ws(2);
  ws[0].values.assign(16, 1.0);
  ws[1].values.assign(3, 1.0);
  ws[1].id = 4242;
  try {
    featurize_dataset(ws, FeatureSetKind::Stats);
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("4242") != std::string::npos);
  }
}

TEST_CASE("features: mean shift moves the mean feature") {
  ShiftDatasetConfig cfg;
  cfg.n_per_class = 2000;
  const auto ds = gen_dataset(cfg);
  std::vector<double> st, ms;
  for (const auto& w : ds.windows) {
    const double m = feature(stats_features(w.values), "mean");
    if (w.label == ShiftKind::Stationary) st.push_back(m);
    if (w.label == ShiftKind::MeanShift) ms.push_back(m);
  }
  // Shift sign is random, so compare |mean - mu|.
  for (auto* v : {&st, &ms}) {
    for (auto& x : *v) x = std::fabs(x - 0.5);
  }
  auto var = [](const std::vector<double>& v) {
    const double m = static_cast<double>(oracle::mean(v));
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
  };
  const double t = static_cast<double>(oracle::mean(ms) - oracle::mean(st)) /
                   std::sqrt(var(ms) / ms.size() + var(st) / st.size());
  CHECK(t > 10);
}
