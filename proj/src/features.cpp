#include "nsbench/features.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "nsbench/error.hpp"
#include "nsbench/kernels.hpp"
#include "nsbench/parallel.hpp"

namespace nsbench {
namespace {

constexpr std::array<std::string_view, kStatsFeatureCount + kDynamicsFeatureCount> kAllNames{
    "q05",  "q10",     "q25",      "q50",      "q75",       "q90",      "q95",   "mean",
    "std",  "min",     "max",      "range",    "iqr",       "abs_mean", "rms",   "sqrt_amp",
    "skewness", "kurtosis", "diff_mean", "diff_std", "slope", "acf1", "acf2", "acf3",
};

constexpr std::array<double, 7> kQuantileLevels{0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95};

// Linear interpolation between order statistics (sorted input).
double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

bool is_flat(double sd, double mean) { return sd <= 1e-12 * std::max(1.0, std::fabs(mean)); }

}  // namespace

static_assert(kAllNames.size() == 24);

std::string_view to_string(FeatureSetKind kind) noexcept {
  return kind == FeatureSetKind::Stats ? "stats" : "statsdyn";
}

FeatureSetKind feature_set_from_string(std::string_view name) {
  if (name == "stats") return FeatureSetKind::Stats;
  if (name == "statsdyn") return FeatureSetKind::StatsDynamics;
  throw ValidationError(fmt::format("unknown feature set '{}' (expected stats|statsdyn)", name));
}

std::span<const std::string_view> feature_names(FeatureSetKind kind) noexcept {
  const std::span<const std::string_view> all(kAllNames);
  return kind == FeatureSetKind::Stats ? all.first(kStatsFeatureCount) : all;
}

std::span<const std::string_view> dynamics_feature_names() noexcept {
  return std::span<const std::string_view>(kAllNames).subspan(kStatsFeatureCount);
}

FeatureVector stats_features(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) throw DomainError(fmt::format("stats features need >= 4 values, got {}", n));
  const auto& k = simd::active_kernels();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  FeatureVector out;
  out.names = feature_names(FeatureSetKind::Stats);
  out.values.reserve(kStatsFeatureCount);
  for (double q : kQuantileLevels) out.values.push_back(quantile_sorted(sorted, q));

  const double mean = k.sum(x.data(), n) * inv_n;
  const simd::CentralSums cs = k.central_sums(x.data(), n, mean);
  const double var = cs.s2 * inv_n;
  const double sd = std::sqrt(var);
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double abs_mean = k.sum_abs(x.data(), n) * inv_n;
  const double rms = std::sqrt(k.dot(x.data(), x.data(), n) * inv_n);
  const double root_mean = k.sum_sqrt_abs(x.data(), n) * inv_n;
  double skew = 0.0;
  double kurt = 0.0;
  if (!is_flat(sd, mean)) {
    skew = (cs.s3 * inv_n) / (var * sd);
    kurt = (cs.s4 * inv_n) / (var * var) - 3.0;
  }

  out.values.insert(out.values.end(),
                    {mean, sd, lo, hi, hi - lo, out.values[4] - out.values[2], abs_mean, rms,
                     root_mean * root_mean, skew, kurt});
  return out;
}

FeatureVector dynamics_features(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 5) throw DomainError(fmt::format("dynamics features need >= 5 values, got {}", n));
  const auto& k = simd::active_kernels();
  const double nd = static_cast<double>(n);

  std::vector<double> diff(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) diff[t] = x[t + 1] - x[t];
  const double dmean = k.sum(diff.data(), n - 1) / (nd - 1.0);
  const double dsd = std::sqrt(k.central_sums(diff.data(), n - 1, dmean).s2 / (nd - 1.0));

  const double mean = k.sum(x.data(), n) / nd;
  std::vector<double> centered(n);
  for (std::size_t t = 0; t < n; ++t) centered[t] = x[t] - mean;
  const double ss = k.dot(centered.data(), centered.data(), n);
  const bool flat = is_flat(std::sqrt(ss / nd), mean);

  FeatureVector out;
  out.names = dynamics_feature_names();
  out.values = {dmean, dsd, 0.0, 0.0, 0.0, 0.0};
  if (flat) return out;

  // Index centered at (n-1)/2; sum of its squares is n(n^2-1)/12.
  std::vector<double> index(n);
  const double tbar = (nd - 1.0) / 2.0;
  for (std::size_t t = 0; t < n; ++t) index[t] = static_cast<double>(t) - tbar;
  out.values[2] = k.dot(index.data(), centered.data(), n) / (nd * (nd * nd - 1.0) / 12.0);
  for (std::size_t lag = 1; lag <= 3; ++lag) {
    out.values[2 + lag] = k.dot(centered.data(), centered.data() + lag, n - lag) / ss;
  }
  return out;
}

std::vector<double> window_features(std::span<const double> x, FeatureSetKind kind) {
  auto values = stats_features(x).values;
  if (kind == FeatureSetKind::StatsDynamics) {
    const auto dyn = dynamics_features(x).values;
    values.insert(values.end(), dyn.begin(), dyn.end());
  }
  return values;
}

Matrix featurize_dataset(std::span<const Window> windows, FeatureSetKind kind,
                         std::size_t workers) {
  if (windows.empty()) throw DomainError("cannot featurize an empty dataset");
  const std::size_t d = feature_names(kind).size();
  Matrix out(windows.size(), d);
  parallel_for(windows.size(), workers, [&](std::size_t i) {
    try {
      const auto f = window_features(windows[i].values, kind);
      std::copy(f.begin(), f.end(), out.row(i).begin());
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("window {}: {}", windows[i].id, e.what()));
    }
  });
  return out;
}

}  // namespace nsbench
