#pragma once

// AR(1) window generation under the four shift conditions.
//
// Recursion: x_t = m + phi * (x_{t-1} - m) + e_t, e_t ~ N(0, s^2), where the
// regime (m, s) may switch at index L/2 (integer division). For |phi| < 1 the
// first value is drawn from the stationary law of the first-half regime;
// otherwise it is fixed at the process mean.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsbench/manifest.hpp"
#include "nsbench/matrix.hpp"
#include "nsbench/rng.hpp"
#include "nsbench/synthgen_types.hpp"

namespace nsbench {

inline constexpr double kBaselineSigma = 0.06;

struct GenParams {
  double mu = 0.5;
  double sigma = kBaselineSigma;
  double phi = 0.6;
  std::size_t length = 128;

  void validate() const;
};

// Realized shift parameters. Only the fields of the active kind are set.
struct ShiftSpec {
  ShiftKind kind = ShiftKind::Stationary;
  std::optional<double> delta_mu;
  std::optional<double> sigma1;
  std::optional<double> sigma2;
  std::optional<double> alpha;

  static ShiftSpec stationary() { return {}; }
  static ShiftSpec mean_shift(double delta) { return {ShiftKind::MeanShift, delta, {}, {}, {}}; }
  static ShiftSpec variance_shift(double s1, double s2) {
    return {ShiftKind::VarianceShift, {}, s1, s2, {}};
  }
  static ShiftSpec trend(double a) { return {ShiftKind::Trend, {}, {}, {}, a}; }

  void validate() const;
};

struct Window {
  std::vector<double> values;
  std::uint64_t id = 0;
  ShiftKind label = ShiftKind::Stationary;
  double phi = 0.0;
  double strength = 1.0;
  std::uint64_t seed = 0;
  // Set by zscore_window when the input had (near) zero spread.
  bool degenerate = false;
};

struct PhiMode {
  enum class Kind { Fixed, Random };
  Kind kind = Kind::Fixed;
  double value = 0.6;
  double lo = 0.3;
  double hi = 0.9;

  static PhiMode fixed(double v) { return {Kind::Fixed, v, v, v}; }
  static PhiMode random(double lo, double hi) { return {Kind::Random, 0.0, lo, hi}; }

  // "fixed(0.6)" or "random(0.3,0.9)"; used as a report key.
  std::string label() const;
  nlohmann::json to_json() const;
  static PhiMode from_json(const nlohmann::json& j);

  friend bool operator==(const PhiMode&, const PhiMode&) = default;
};

struct ShiftDatasetConfig {
  std::size_t n_per_class = 2000;
  std::vector<double> strengths{1.0};
  std::size_t length = 128;
  PhiMode phi_mode = PhiMode::fixed(0.6);
  double mu = 0.5;
  double sigma = kBaselineSigma;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
};

struct Dataset {
  std::vector<Window> windows;
  DatasetManifest manifest;
};

// Throws DomainError unless 0 < s <= 1.
ShiftSpec sample_shift_params(ShiftKind kind, double s, Rng& rng);

// Produces values only; the caller fills id/strength/seed provenance.
Window gen_window(const GenParams& params, const ShiftSpec& shift, Rng& rng);

// Windows ordered strength-major, then class, then replicate. Window i is
// generated from its own stream seeded by derive_seed(master_seed, i).
Dataset gen_dataset(const ShiftDatasetConfig& config);

// Stationary-kind windows, n_per_phi per entry of `phis`, in phi order.
Dataset gen_phi_sweep(std::span<const double> phis, std::size_t n_per_phi,
                      const GenParams& params, std::uint64_t master_seed,
                      std::size_t workers = 1);

// Population-std standardization. Flat input (std < 1e-12) yields zeros and
// sets `degenerate`.
Window zscore_window(const Window& w);

// Z-scores every window; the manifest gains "zscore": true and a new id.
Dataset zscore_dataset(const Dataset& ds);

std::vector<ShiftKind> labels_of(const DatasetManifest& manifest);

// Window values as an n x L matrix (the series export layout).
Matrix series_matrix(std::span<const Window> windows);
// Inverse of series_matrix: rebuilds windows with manifest provenance.
// Row count must match the manifest.
std::vector<Window> windows_from_series(const Matrix& series, const DatasetManifest& manifest);

}  // namespace nsbench
