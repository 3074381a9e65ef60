#pragma once

// Handcrafted window summaries used by the two statistical baselines.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "nsbench/matrix.hpp"
#include "nsbench/synthgen.hpp"

namespace nsbench {

enum class FeatureSetKind { Stats, StatsDynamics };

inline constexpr std::size_t kStatsFeatureCount = 18;
inline constexpr std::size_t kDynamicsFeatureCount = 6;

// "stats" / "statsdyn".
std::string_view to_string(FeatureSetKind kind) noexcept;
FeatureSetKind feature_set_from_string(std::string_view name);

// Column names in emission order. StatsDynamics = Stats followed by dynamics.
std::span<const std::string_view> feature_names(FeatureSetKind kind) noexcept;
std::span<const std::string_view> dynamics_feature_names() noexcept;

struct FeatureVector {
  std::vector<double> values;
  std::span<const std::string_view> names;
};

// Quantiles (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95; linear interpolation), mean, std,
// min, max, range, IQR, mean |x|, RMS, square-root amplitude, skewness,
// excess kurtosis. Moments use population normalization; a flat window has
// skewness and kurtosis 0. Requires at least 4 values.
FeatureVector stats_features(std::span<const double> x);

// mean and std of first differences, OLS slope per step, ACF at lags 1..3
// (mean-centered, divided by the total sum of squares). Flat windows give
// slope 0 and ACF 0. Requires at least 5 values.
FeatureVector dynamics_features(std::span<const double> x);

std::vector<double> window_features(std::span<const double> x, FeatureSetKind kind);

// Row i = features of windows[i]. Errors carry the offending window id.
Matrix featurize_dataset(std::span<const Window> windows, FeatureSetKind kind,
                         std::size_t workers = 1);

}  // namespace nsbench
