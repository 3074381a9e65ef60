#pragma once

// Linear probes: multinomial logistic regression for shift type and ridge
// regression for persistence.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nsbench/manifest.hpp"
#include "nsbench/matrix.hpp"
#include "nsbench/metrics.hpp"

namespace nsbench {

// Per-column centering and scaling learned from training rows only.
// Population std; constant columns keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& train);
  Matrix apply(const Matrix& x) const;
  void apply_inplace(Matrix& x) const;
};

struct SoftmaxConfig {
  double l2 = 1e-4;
  std::size_t max_iter = 2000;
  double grad_tol = 1e-6;
  // L-BFGS memory.
  std::size_t history = 10;
  // Keep every accepted objective value in FitDiagnostics::objective_trace.
  bool record_trace = false;
};

struct FitDiagnostics {
  std::size_t iterations = 0;
  double grad_inf_norm = 0.0;
  double objective = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;
};

struct SoftmaxClassifier {
  Matrix weights;             // n_classes x d
  std::vector<double> bias;   // n_classes
  std::vector<int> classes;   // output column order
  FitDiagnostics diagnostics;

  std::size_t n_classes() const noexcept { return classes.size(); }
  std::size_t dim() const noexcept { return weights.cols(); }

  Matrix logits(const Matrix& x) const;
  Matrix predict_proba(const Matrix& x) const;
  // Argmax of logits; ties go to the lowest class index.
  std::vector<int> predict(const Matrix& x) const;
};

// Mean cross-entropy plus (l2/2)*||W||^2 at `params` = [W row-major, b].
// `y` holds class indices in [0, n_classes). Writes the gradient when
// `grad` is non-empty.
double softmax_objective(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                         std::span<const double> params, double l2, std::span<double> grad);

// Minimizes softmax_objective from W = 0, b = 0 with L-BFGS and a
// backtracking (Armijo) line search, so the objective never increases.
// Stops when the gradient infinity-norm drops below grad_tol or after
// max_iter iterations.
SoftmaxClassifier fit_softmax(const Matrix& x, std::span<const int> y, const SoftmaxConfig& config);

// Shared arg-max rule used by predict(); exposed for tests.
std::size_t argmax_lowest(std::span<const double> row) noexcept;

struct RidgeRegressor {
  std::vector<double> weights;
  double intercept = 0.0;
  double lambda = 0.0;

  std::vector<double> predict(const Matrix& x) const;
};

// Solves (Xc'Xc + lambda I) w = Xc't on centered data by Cholesky. A
// singular system throws NumericalError.
RidgeRegressor fit_ridge(const Matrix& x, std::span<const double> t, double lambda);

struct SplitSpec {
  double train_fraction = 0.7;
  bool stratify = true;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Stratified: each group is shuffled independently and its first
// round(fraction * size) members go to train.
Split make_split(std::span<const int> groups, const SplitSpec& spec);

enum class ProbeTask { ShiftClass, PhiRegression };
std::string_view to_string(ProbeTask t) noexcept;
ProbeTask probe_task_from_string(std::string_view s);

// Elementwise compression applied before standardization.
enum class InputTransform { None, SignedLog1p };
std::string_view to_string(InputTransform t) noexcept;
InputTransform input_transform_from_string(std::string_view s);
void apply_transform(Matrix& x, InputTransform t) noexcept;

struct ProbeConfig {
  SoftmaxConfig softmax;
  double ridge_lambda = 1e-3;
  InputTransform shift_transform = InputTransform::None;
  InputTransform phi_transform = InputTransform::SignedLog1p;
};

struct TrialResult {
  ProbeTask task = ProbeTask::ShiftClass;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  // ShiftClass
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;
  FitDiagnostics fit;
  // PhiRegression
  double mae = 0.0;
  std::optional<double> pearson_r;
  double r2 = 0.0;
  // Fitted on training rows only.
  Standardizer standardizer;
};

// Splits by label (ShiftClass) or by phi group (PhiRegression), transforms,
// standardizes on the train rows, fits and scores the test rows.
TrialResult run_probe_trial(const Matrix& x, const DatasetManifest& manifest, ProbeTask task,
                            const SplitSpec& split, const ProbeConfig& config);

}  // namespace nsbench
