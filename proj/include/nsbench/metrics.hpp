#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsbench/matrix.hpp"

namespace nsbench {

// Rows are true labels, columns predicted labels, both in `labels` order.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  ConfusionMatrix(std::vector<int> labels, std::vector<std::string> names);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::uint64_t at(std::size_t true_idx, std::size_t pred_idx) const noexcept {
    return counts_[true_idx * size() + pred_idx];
  }
  std::uint64_t& at(std::size_t true_idx, std::size_t pred_idx) noexcept {
    return counts_[true_idx * size() + pred_idx];
  }
  std::uint64_t total() const noexcept;
  std::uint64_t row_sum(std::size_t true_idx) const noexcept;
  std::uint64_t col_sum(std::size_t pred_idx) const noexcept;

  // Adds counts; label lists must agree.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

  // Header row "true\pred,<names...>", then one row per true label.
  std::string to_csv() const;

 private:
  std::vector<int> labels_;
  std::vector<std::string> names_;
  std::vector<std::uint64_t> counts_;
};

// `names` defaults to the decimal label values. Unknown labels throw.
ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::span<const int> labels,
                                 std::vector<std::string> names = {});

// Unweighted mean of per-class F1; a class with no true and no predicted
// members contributes 0.
double macro_f1(const ConfusionMatrix& cm);

double mae(std::span<const double> truth, std::span<const double> pred);
// Empty when either side has zero variance.
std::optional<double> pearson_r(std::span<const double> truth, std::span<const double> pred);
// 1 - SSE/SST. Throws DomainError for constant truth.
double r2(std::span<const double> truth, std::span<const double> pred);

// 1 - cos(u, v), clamped to [0, 2]. Zero vectors throw DomainError.
double cosine_distance(std::span<const double> u, std::span<const double> v);

// Pearson correlation of average ranks. Needs >= 3 points, non-constant.
double spearman_rho(std::span<const double> a, std::span<const double> b);

enum class Normalization { Raw, ZScore };
std::string_view to_string(Normalization n) noexcept;

struct DiscrepancyCurve {
  struct Point {
    double phi;
    double mean;
    double std;
  };
  std::vector<Point> points;  // ascending phi
  double reference_phi = 0.0;
  Normalization normalization = Normalization::Raw;

  std::vector<double> phis() const;
  std::vector<double> means() const;
  // "phi,mean,std" header.
  std::string to_csv() const;
};

// Rows of `embeddings` are grouped by exact value of row_phi. Each point is
// the mean and population std of the cosine distance between the group's
// rows and the centroid of the reference group. Reference defaults to the
// smallest phi present.
DiscrepancyCurve discrepancy_curve(const Matrix& embeddings, std::span<const double> row_phi,
                                   Normalization normalization,
                                   std::optional<double> reference_phi = std::nullopt);

}  // namespace nsbench
