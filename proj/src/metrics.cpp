#include "nsbench/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "nsbench/error.hpp"
#include "nsbench/kernels.hpp"

namespace nsbench {
namespace {

void require_same_nonempty(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DomainError(fmt::format("{}: length mismatch ({} vs {})", what, a, b));
  if (a == 0) throw DomainError(fmt::format("{}: empty input", what));
}

double mean_of(std::span<const double> x) {
  return simd::sum(x) / static_cast<double>(x.size());
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return x[i] < x[j]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<int> labels, std::vector<std::string> names)
    : labels_(std::move(labels)), names_(std::move(names)) {
  if (names_.empty()) {
    for (int l : labels_) names_.push_back(std::to_string(l));
  }
  if (names_.size() != labels_.size()) throw ValidationError("label/name count mismatch");
  counts_.assign(labels_.size() * labels_.size(), 0);
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t t) const noexcept {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < size(); ++p) s += at(t, p);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t p) const noexcept {
  std::uint64_t s = 0;
  for (std::size_t t = 0; t < size(); ++t) s += at(t, p);
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.labels_ != labels_) throw ValidationError("cannot merge confusion matrices with different labels");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

std::string ConfusionMatrix::to_csv() const {
  std::string out = "true\\pred";
  for (const auto& n : names_) out += "," + n;
  out += '\n';
  for (std::size_t t = 0; t < size(); ++t) {
    out += names_[t];
    for (std::size_t p = 0; p < size(); ++p) out += fmt::format(",{}", at(t, p));
    out += '\n';
  }
  return out;
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::span<const int> labels, std::vector<std::string> names) {
  if (y_true.size() != y_pred.size()) {
    throw DomainError(fmt::format("confusion: {} true vs {} predicted labels", y_true.size(),
                                  y_pred.size()));
  }
  ConfusionMatrix cm({labels.begin(), labels.end()}, std::move(names));
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], i).second) throw ValidationError("duplicate label in label list");
  }
  auto lookup = [&](int l) {
    const auto it = index.find(l);
    if (it == index.end()) throw DomainError(fmt::format("unknown label {}", l));
    return it->second;
  };
  for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.at(lookup(y_true[i]), lookup(y_pred[i]));
  return cm;
}

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t c = 0; c < cm.size(); ++c) {
    const double tp = static_cast<double>(cm.at(c, c));
    const double fp = static_cast<double>(cm.col_sum(c)) - tp;
    const double fn = static_cast<double>(cm.row_sum(c)) - tp;
    const double denom = 2.0 * tp + fp + fn;
    total += denom > 0.0 ? 2.0 * tp / denom : 0.0;
  }
  return total / static_cast<double>(cm.size());
}

double mae(std::span<const double> truth, std::span<const double> pred) {
  require_same_nonempty(truth.size(), pred.size(), "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += std::fabs(truth[i] - pred[i]);
  return s / static_cast<double>(truth.size());
}

std::optional<double> pearson_r(std::span<const double> truth, std::span<const double> pred) {
  require_same_nonempty(truth.size(), pred.size(), "pearson_r");
  // Constant input is detected exactly; its summed mean may differ from the
  // constant in the last bit and leave a spurious nonzero variance.
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
  };
  if (constant(truth) || constant(pred)) return std::nullopt;
  const double mt = mean_of(truth);
  const double mp = mean_of(pred);
  double stt = 0.0, spp = 0.0, stp = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double a = truth[i] - mt;
    const double b = pred[i] - mp;
    stt += a * a;
    spp += b * b;
    stp += a * b;
  }
  if (!(stt > 0.0) || !(spp > 0.0)) return std::nullopt;
  return std::clamp(stp / std::sqrt(stt * spp), -1.0, 1.0);
}

double r2(std::span<const double> truth, std::span<const double> pred) {
  require_same_nonempty(truth.size(), pred.size(), "r2");
  const double mt = mean_of(truth);
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    sse += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    sst += (truth[i] - mt) * (truth[i] - mt);
  }
  if (!(sst > 0.0)) throw DomainError("r2: truth has zero variance");
  return 1.0 - sse / sst;
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  require_same_nonempty(u.size(), v.size(), "cosine_distance");
  const double nu = simd::dot(u, u);
  const double nv = simd::dot(v, v);
  if (!(nu > 0.0) || !(nv > 0.0)) throw DomainError("cosine_distance: zero vector");
  const double cos = simd::dot(u, v) / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(1.0 - cos, 0.0, 2.0);
}

double spearman_rho(std::span<const double> a, std::span<const double> b) {
  require_same_nonempty(a.size(), b.size(), "spearman_rho");
  if (a.size() < 3) throw DomainError("spearman_rho needs at least 3 points");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const auto r = pearson_r(ra, rb);
  if (!r) throw DomainError("spearman_rho: constant input");
  return *r;
}

std::string_view to_string(Normalization n) noexcept {
  return n == Normalization::Raw ? "raw" : "zscore";
}

std::vector<double> DiscrepancyCurve::phis() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.phi);
  return out;
}

std::vector<double> DiscrepancyCurve::means() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.mean);
  return out;
}

std::string DiscrepancyCurve::to_csv() const {
  std::string out = "phi,mean,std\n";
  for (const auto& p : points) out += fmt::format("{},{:.10g},{:.10g}\n", p.phi, p.mean, p.std);
  return out;
}

DiscrepancyCurve discrepancy_curve(const Matrix& embeddings, std::span<const double> row_phi,
                                   Normalization normalization,
                                   std::optional<double> reference_phi) {
  if (embeddings.rows() != row_phi.size()) {
    throw ValidationError(fmt::format("discrepancy_curve: {} rows vs {} phi tags",
                                      embeddings.rows(), row_phi.size()));
  }
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < row_phi.size(); ++i) groups[row_phi[i]].push_back(i);
  if (groups.size() < 2) throw DomainError("discrepancy_curve needs at least 2 phi groups");

  const double ref = reference_phi.value_or(groups.begin()->first);
  const auto ref_it = groups.find(ref);
  if (ref_it == groups.end()) {
    throw DomainError(fmt::format("reference phi {} not present in sweep", ref));
  }
  const std::size_t d = embeddings.cols();
  std::vector<double> centroid(d, 0.0);
  for (std::size_t i : ref_it->second) simd::axpy(1.0, embeddings.row(i), centroid);
  for (double& c : centroid) c /= static_cast<double>(ref_it->second.size());

  DiscrepancyCurve curve;
  curve.reference_phi = ref;
  curve.normalization = normalization;
  for (const auto& [phi, rows] : groups) {
    double s = 0.0, ss = 0.0;
    for (std::size_t i : rows) {
      const double dist = cosine_distance(embeddings.row(i), centroid);
      s += dist;
      ss += dist * dist;
    }
    const double n = static_cast<double>(rows.size());
    const double m = s / n;
    curve.points.push_back({phi, m, std::sqrt(std::max(0.0, ss / n - m * m))});
  }
  return curve;
}

}  // namespace nsbench
