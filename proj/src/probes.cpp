#include "nsbench/probes.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "nsbench/error.hpp"
#include "nsbench/kernels.hpp"
#include "nsbench/rng.hpp"
#include "nsbench/synthgen_types.hpp"

namespace nsbench {
namespace {

constexpr std::uint64_t kSplitStream = 0x5b11;

void require_finite(const Matrix& x, const char* what) {
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw DomainError(fmt::format("{}: input contains non-finite values", what));
  }
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::fabs(e));
  return m;
}

// In-place Cholesky of a symmetric positive definite matrix (lower factor).
void cholesky(Matrix& a) {
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::fabs(a(i, i)));
  const double tol = 1e-12 * std::max(1.0, max_diag);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
    if (!(diag > tol)) {
      throw NumericalError(fmt::format("ridge system is singular (pivot {} = {:.3g})", j, diag));
    }
    const double l = std::sqrt(diag);
    a(j, j) = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= a(i, k) * a(j, k);
      a(i, j) = v / l;
    }
  }
}

std::vector<double> cholesky_solve(const Matrix& l, std::vector<double> b) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
    b[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= l(k, i) * b[k];
    b[i] /= l(i, i);
  }
  return b;
}

std::vector<double> column(const DatasetManifest& m, std::span<const std::size_t> idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(m.records[i].phi);
  return out;
}

}  // namespace

Standardizer Standardizer::fit(const Matrix& train) {
  if (train.rows() == 0) throw DomainError("standardizer needs at least one row");
  const std::size_t d = train.cols();
  const double n = static_cast<double>(train.rows());
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (std::size_t r = 0; r < train.rows(); ++r) simd::axpy(1.0, train.row(r), s.mean);
  for (double& m : s.mean) m /= n;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = train(r, c) - s.mean[c];
      s.scale[c] += dv * dv;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(s.scale[c] / n);
    s.scale[c] = sd > 1e-12 * std::max(1.0, std::fabs(s.mean[c])) ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply_inplace(Matrix& x) const {
  if (x.cols() != mean.size()) {
    throw ValidationError(fmt::format("standardizer fitted on {} columns, got {}", mean.size(), x.cols()));
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / scale[c];
  }
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out = x;
  apply_inplace(out);
  return out;
}

std::size_t argmax_lowest(std::span<const double> row) noexcept {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

double softmax_objective(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                         std::span<const double> params, double l2, std::span<double> grad) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t k = n_classes;
  if (params.size() != k * d + k) throw ValidationError("softmax parameter size mismatch");
  const bool want_grad = !grad.empty();
  if (want_grad) {
    if (grad.size() != params.size()) throw ValidationError("gradient buffer size mismatch");
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  const auto& kern = simd::active_kernels();
  const double* w = params.data();
  const double* b = params.data() + k * d;
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> z(k);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i).data();
    double zmax = -INFINITY;
    for (std::size_t c = 0; c < k; ++c) {
      z[c] = kern.dot(w + c * d, xi, d) + b[c];
      zmax = std::max(zmax, z[c]);
    }
    double denom = 0.0;
    for (std::size_t c = 0; c < k; ++c) denom += std::exp(z[c] - zmax);
    const double lse = zmax + std::log(denom);
    const auto yi = static_cast<std::size_t>(y[i]);
    loss += lse - z[yi];
    if (want_grad) {
      for (std::size_t c = 0; c < k; ++c) {
        const double coef = (std::exp(z[c] - lse) - (c == yi ? 1.0 : 0.0)) * inv_n;
        kern.axpy(coef, xi, grad.data() + c * d, d);
        grad[k * d + c] += coef;
      }
    }
  }
  const double wnorm = kern.dot(w, w, k * d);
  if (want_grad) kern.axpy(l2, w, grad.data(), k * d);
  return loss * inv_n + 0.5 * l2 * wnorm;
}

SoftmaxClassifier fit_softmax(const Matrix& x, std::span<const int> y, const SoftmaxConfig& config) {
  if (x.rows() != y.size()) {
    throw DomainError(fmt::format("fit_softmax: {} rows vs {} labels", x.rows(), y.size()));
  }
  require_finite(x, "fit_softmax");
  std::vector<int> classes(y.begin(), y.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw DomainError("fit_softmax needs at least 2 classes");
  if (x.rows() < classes.size()) throw DomainError("fit_softmax needs n >= n_classes");

  std::vector<int> yi(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    yi[i] = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin());
  }
  const std::size_t k = classes.size();
  const std::size_t d = x.cols();
  const std::size_t p = k * d + k;
  const auto& kern = simd::active_kernels();

  std::vector<double> theta(p, 0.0), grad(p), cand(p), cand_grad(p), dir(p), alpha_buf;
  double f = softmax_objective(x, yi, k, theta, config.l2, grad);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> memory;
  FitDiagnostics diag;
  if (config.record_trace) diag.objective_trace.push_back(f);

  for (;;) {
    diag.grad_inf_norm = inf_norm(grad);
    if (diag.grad_inf_norm < config.grad_tol) {
      diag.converged = true;
      break;
    }
    if (diag.iterations >= config.max_iter) break;

    // Two-loop recursion: dir = -H * grad.
    for (std::size_t j = 0; j < p; ++j) dir[j] = -grad[j];
    alpha_buf.assign(memory.size(), 0.0);
    for (std::size_t m = memory.size(); m-- > 0;) {
      alpha_buf[m] = memory[m].rho * kern.dot(memory[m].s.data(), dir.data(), p);
      kern.axpy(-alpha_buf[m], memory[m].y.data(), dir.data(), p);
    }
    if (!memory.empty()) {
      const auto& last = memory.back();
      const double gamma = 1.0 / (last.rho * kern.dot(last.y.data(), last.y.data(), p));
      for (double& v : dir) v *= gamma;
    }
    for (std::size_t m = 0; m < memory.size(); ++m) {
      const double beta = memory[m].rho * kern.dot(memory[m].y.data(), dir.data(), p);
      kern.axpy(alpha_buf[m] - beta, memory[m].s.data(), dir.data(), p);
    }
    double slope = kern.dot(grad.data(), dir.data(), p);
    if (!(slope < 0.0)) {
      memory.clear();
      for (std::size_t j = 0; j < p; ++j) dir[j] = -grad[j];
      slope = -kern.dot(grad.data(), grad.data(), p);
    }

    double step = memory.empty() ? std::min(1.0, 1.0 / std::sqrt(-slope)) : 1.0;
    bool accepted = false;
    double f_new = f;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t j = 0; j < p; ++j) cand[j] = theta[j] + step * dir[j];
      f_new = softmax_objective(x, yi, k, cand, config.l2, cand_grad);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Pair pair{std::vector<double>(p), std::vector<double>(p), 0.0};
    for (std::size_t j = 0; j < p; ++j) {
      pair.s[j] = cand[j] - theta[j];
      pair.y[j] = cand_grad[j] - grad[j];
    }
    const double sy = kern.dot(pair.s.data(), pair.y.data(), p);
    if (sy > 1e-12 * std::sqrt(kern.dot(pair.s.data(), pair.s.data(), p) *
                               kern.dot(pair.y.data(), pair.y.data(), p))) {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (memory.size() > config.history) memory.pop_front();
    }
    theta.swap(cand);
    grad.swap(cand_grad);
    f = f_new;
    ++diag.iterations;
    if (config.record_trace) diag.objective_trace.push_back(f);
  }
  diag.objective = f;

  SoftmaxClassifier clf;
  clf.weights = Matrix(k, d);
  std::copy(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(k * d), clf.weights.data().begin());
  clf.bias.assign(theta.begin() + static_cast<std::ptrdiff_t>(k * d), theta.end());
  clf.classes = std::move(classes);
  clf.diagnostics = std::move(diag);
  return clf;
}

Matrix SoftmaxClassifier::logits(const Matrix& x) const {
  if (x.cols() != dim()) {
    throw ValidationError(fmt::format("classifier expects {} columns, got {}", dim(), x.cols()));
  }
  Matrix z(x.rows(), n_classes());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t c = 0; c < n_classes(); ++c) z(i, c) = simd::dot(weights.row(c), x.row(i)) + bias[c];
  }
  return z;
}

Matrix SoftmaxClassifier::predict_proba(const Matrix& x) const {
  Matrix z = logits(x);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto row = z.row(i);
    const double zmax = *std::max_element(row.begin(), row.end());
    double denom = 0.0;
    for (double& v : row) {
      v = std::exp(v - zmax);
      denom += v;
    }
    for (double& v : row) v /= denom;
  }
  return z;
}

std::vector<int> SoftmaxClassifier::predict(const Matrix& x) const {
  const Matrix z = logits(x);
  std::vector<int> out(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) out[i] = classes[argmax_lowest(z.row(i))];
  return out;
}

std::vector<double> RidgeRegressor::predict(const Matrix& x) const {
  if (x.cols() != weights.size()) {
    throw ValidationError(fmt::format("regressor expects {} columns, got {}", weights.size(), x.cols()));
  }
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = simd::dot(weights, x.row(i)) + intercept;
  return out;
}

RidgeRegressor fit_ridge(const Matrix& x, std::span<const double> t, double lambda) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (t.size() != n) throw DomainError(fmt::format("fit_ridge: {} rows vs {} targets", n, t.size()));
  if (n == 0) throw DomainError("fit_ridge: empty input");
  if (!(lambda >= 0.0)) throw DomainError("ridge lambda must be >= 0");
  require_finite(x, "fit_ridge");

  std::vector<double> xmean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) simd::axpy(1.0, x.row(i), xmean);
  for (double& m : xmean) m /= static_cast<double>(n);
  const double tmean = simd::sum(t) / static_cast<double>(n);

  Matrix gram(d, d);
  std::vector<double> rhs(d, 0.0), xc(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) xc[j] = row[j] - xmean[j];
    const double tc = t[i] - tmean;
    for (std::size_t j = 0; j < d; ++j) simd::axpy(xc[j], xc, gram.row(j));
    simd::axpy(tc, xc, rhs);
  }
  for (std::size_t j = 0; j < d; ++j) gram(j, j) += lambda;
  cholesky(gram);

  RidgeRegressor reg;
  reg.lambda = lambda;
  reg.weights = cholesky_solve(gram, std::move(rhs));
  reg.intercept = tmean - simd::dot(reg.weights, xmean);
  return reg;
}

Split make_split(std::span<const int> groups, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw DomainError(fmt::format("train fraction {} outside (0, 1)", spec.train_fraction));
  }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) members[spec.stratify ? groups[i] : 0].push_back(i);

  Rng rng(derive_seed(spec.seed, kSplitStream));
  Split out;
  for (auto& [g, idx] : members) {
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    const auto n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(idx.size())));
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::string_view to_string(ProbeTask t) noexcept {
  return t == ProbeTask::ShiftClass ? "shift" : "phi";
}

ProbeTask probe_task_from_string(std::string_view s) {
  if (s == "shift") return ProbeTask::ShiftClass;
  if (s == "phi") return ProbeTask::PhiRegression;
  throw ValidationError(fmt::format("unknown probe task '{}' (expected shift|phi)", s));
}

std::string_view to_string(InputTransform t) noexcept {
  return t == InputTransform::None ? "none" : "signed_log1p";
}

InputTransform input_transform_from_string(std::string_view s) {
  if (s == "none") return InputTransform::None;
  if (s == "signed_log1p") return InputTransform::SignedLog1p;
  throw ValidationError(fmt::format("unknown input transform '{}'", s));
}

void apply_transform(Matrix& x, InputTransform t) noexcept {
  if (t == InputTransform::None) return;
  for (double& v : x.data()) v = std::copysign(std::log1p(std::fabs(v)), v);
}

TrialResult run_probe_trial(const Matrix& x, const DatasetManifest& manifest, ProbeTask task,
                            const SplitSpec& split_spec, const ProbeConfig& config) {
  if (x.rows() != manifest.size()) {
    throw ValidationError(fmt::format("probe input has {} rows, manifest '{}' has {} records",
                                      x.rows(), manifest.dataset_id, manifest.size()));
  }
  TrialResult res;
  res.task = task;
  res.seed = split_spec.seed;

  std::vector<int> groups(manifest.size());
  if (task == ProbeTask::ShiftClass) {
    for (std::size_t i = 0; i < groups.size(); ++i) groups[i] = static_cast<int>(manifest.records[i].label);
  } else {
    std::map<double, int> rank;
    for (const auto& r : manifest.records) rank.emplace(r.phi, 0);
    int next = 0;
    for (auto& [phi, g] : rank) g = next++;
    for (std::size_t i = 0; i < groups.size(); ++i) groups[i] = rank.at(manifest.records[i].phi);
  }
  const Split split = make_split(groups, split_spec);
  if (split.train.empty() || split.test.empty()) throw DomainError("split produced an empty partition");
  res.n_train = split.train.size();
  res.n_test = split.test.size();

  Matrix train = x.select_rows(split.train);
  Matrix test = x.select_rows(split.test);
  const InputTransform transform =
      task == ProbeTask::ShiftClass ? config.shift_transform : config.phi_transform;
  apply_transform(train, transform);
  apply_transform(test, transform);
  res.standardizer = Standardizer::fit(train);
  res.standardizer.apply_inplace(train);
  res.standardizer.apply_inplace(test);

  if (task == ProbeTask::ShiftClass) {
    std::vector<int> ytr, yte;
    for (std::size_t i : split.train) ytr.push_back(groups[i]);
    for (std::size_t i : split.test) yte.push_back(groups[i]);
    const SoftmaxClassifier clf = fit_softmax(train, ytr, config.softmax);
    const std::vector<int> pred = clf.predict(test);
    std::vector<int> labels;
    std::vector<std::string> names;
    for (auto k : kShiftKinds) {
      labels.push_back(static_cast<int>(k));
      names.emplace_back(to_string(k));
    }
    res.confusion = confusion_matrix(yte, pred, labels, names);
    res.macro_f1 = macro_f1(res.confusion);
    res.fit = clf.diagnostics;
  } else {
    const std::vector<double> ttr = column(manifest, split.train);
    const std::vector<double> tte = column(manifest, split.test);
    const RidgeRegressor reg = fit_ridge(train, ttr, config.ridge_lambda);
    const std::vector<double> pred = reg.predict(test);
    res.mae = mae(tte, pred);
    res.pearson_r = pearson_r(tte, pred);
    res.r2 = r2(tte, pred);
  }
  return res;
}

}  // namespace nsbench
