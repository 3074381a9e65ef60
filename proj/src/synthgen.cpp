#include "nsbench/synthgen.hpp"

#include <fmt/format.h>

#include <cmath>

#include "nsbench/error.hpp"
#include "nsbench/parallel.hpp"

namespace nsbench {
namespace {

constexpr double kVarLowMin = 0.03;
constexpr double kVarLowMax = 0.06;
constexpr double kVarHighMin = 0.12;
constexpr double kVarHighMax = 0.20;

void check_strength(double s) {
  if (!(s > 0.0 && s <= 1.0)) {
    throw DomainError(fmt::format("shift strength {} outside (0, 1]", s));
  }
}

nlohmann::json rng_snapshot() {
  return {{"rng", Rng::kAlgorithm},
          {"gaussian", Rng::kGaussianMethod},
          {"window_seed", "derive_seed(master_seed, window_index)"},
          {"init", "stationary law if |phi|<1 else mu"},
          {"half_split", "floor(L/2)"}};
}

}  // namespace

void GenParams::validate() const {
  if (length < 2) throw DomainError(fmt::format("window length {} < 2", length));
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw DomainError(fmt::format("innovation std {} must be finite and >= 0", sigma));
  }
  if (!std::isfinite(mu) || !std::isfinite(phi)) throw DomainError("mu and phi must be finite");
}

void ShiftSpec::validate() const {
  const bool has_mu = delta_mu.has_value();
  const bool has_var = sigma1.has_value() || sigma2.has_value();
  const bool has_alpha = alpha.has_value();
  bool ok = false;
  switch (kind) {
    case ShiftKind::Stationary:
      ok = !has_mu && !has_var && !has_alpha;
      break;
    case ShiftKind::MeanShift:
      ok = has_mu && !has_var && !has_alpha && std::isfinite(*delta_mu);
      break;
    case ShiftKind::VarianceShift:
      ok = !has_mu && sigma1 && sigma2 && !has_alpha && *sigma1 > 0.0 && *sigma2 > 0.0 &&
           std::isfinite(*sigma1) && std::isfinite(*sigma2);
      break;
    case ShiftKind::Trend:
      ok = !has_mu && !has_var && has_alpha && std::isfinite(*alpha);
      break;
  }
  if (!ok) throw DomainError(fmt::format("inconsistent {} shift spec", to_string(kind)));
}

std::string PhiMode::label() const {
  if (kind == Kind::Fixed) return fmt::format("fixed({})", value);
  return fmt::format("random({},{})", lo, hi);
}

nlohmann::json PhiMode::to_json() const {
  if (kind == Kind::Fixed) return {{"mode", "fixed"}, {"value", value}};
  return {{"mode", "random"}, {"lo", lo}, {"hi", hi}};
}

PhiMode PhiMode::from_json(const nlohmann::json& j) {
  try {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "fixed") {
      for (const auto& [k, v] : j.items()) {
        if (k != "mode" && k != "value") throw ValidationError("unknown phi_mode key '" + k + "'");
      }
      return fixed(j.value("value", 0.6));
    }
    if (mode == "random") {
      for (const auto& [k, v] : j.items()) {
        if (k != "mode" && k != "lo" && k != "hi") {
          throw ValidationError("unknown phi_mode key '" + k + "'");
        }
      }
      const PhiMode m = random(j.value("lo", 0.3), j.value("hi", 0.9));
      if (!(m.lo <= m.hi)) throw ValidationError("phi_mode random requires lo <= hi");
      return m;
    }
    throw ValidationError("phi_mode.mode must be 'fixed' or 'random'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed phi_mode: {}", e.what()));
  }
}

ShiftSpec sample_shift_params(ShiftKind kind, double s, Rng& rng) {
  check_strength(s);
  switch (kind) {
    case ShiftKind::Stationary:
      return ShiftSpec::stationary();
    case ShiftKind::MeanShift: {
      const double magnitude = rng.uniform(0.2 * s, 0.6 * s);
      return ShiftSpec::mean_shift(magnitude * rng.sign());
    }
    case ShiftKind::VarianceShift: {
      const double low = rng.uniform(kVarLowMin, kVarLowMax);
      const double high = rng.uniform(kVarHighMin, kVarHighMax);
      return ShiftSpec::variance_shift(kBaselineSigma + s * (low - kBaselineSigma),
                                       kBaselineSigma + s * (high - kBaselineSigma));
    }
    case ShiftKind::Trend: {
      const double magnitude = rng.uniform(0.3 * s, 0.6 * s);
      return ShiftSpec::trend(magnitude * rng.sign());
    }
  }
  throw DomainError("unknown shift kind");
}

Window gen_window(const GenParams& params, const ShiftSpec& shift, Rng& rng) {
  params.validate();
  shift.validate();

  const std::size_t n = params.length;
  const std::size_t half = n / 2;
  double mean_first = params.mu;
  double mean_second = params.mu;
  double sd_first = params.sigma;
  double sd_second = params.sigma;
  if (shift.kind == ShiftKind::MeanShift) mean_second += *shift.delta_mu;
  if (shift.kind == ShiftKind::VarianceShift) {
    sd_first = *shift.sigma1;
    sd_second = *shift.sigma2;
  }

  const double phi = params.phi;
  Window w;
  w.label = shift.kind;
  w.phi = phi;
  w.values.resize(n);
  if (std::fabs(phi) < 1.0) {
    w.values[0] = rng.normal(mean_first, sd_first / std::sqrt(1.0 - phi * phi));
  } else {
    w.values[0] = params.mu;
  }
  for (std::size_t t = 1; t < n; ++t) {
    const bool second = t >= half;
    const double m = second ? mean_second : mean_first;
    const double sd = second ? sd_second : sd_first;
    w.values[t] = m + phi * (w.values[t - 1] - m) + sd * rng.normal();
  }
  if (shift.kind == ShiftKind::Trend) {
    const double a = *shift.alpha;
    const double denom = static_cast<double>(n - 1);
    for (std::size_t t = 0; t < n; ++t) w.values[t] += a * (static_cast<double>(t) / denom);
  }
  for (double v : w.values) {
    if (!std::isfinite(v)) {
      throw NumericalError(fmt::format("non-finite value generated (phi={}, L={})", phi, n));
    }
  }
  return w;
}

Dataset gen_dataset(const ShiftDatasetConfig& config) {
  if (config.n_per_class == 0) throw DomainError("n_per_class must be positive");
  if (config.strengths.empty()) throw DomainError("at least one strength level required");
  for (double s : config.strengths) check_strength(s);
  GenParams base{config.mu, config.sigma, config.phi_mode.value, config.length};
  base.validate();

  nlohmann::json snapshot = rng_snapshot();
  snapshot["generator"] = "shift";
  snapshot["mu"] = config.mu;
  snapshot["sigma"] = config.sigma;
  snapshot["length"] = config.length;
  snapshot["n_per_class"] = config.n_per_class;
  snapshot["strengths"] = config.strengths;
  snapshot["phi_mode"] = config.phi_mode.to_json();
  snapshot["master_seed"] = config.master_seed;
  snapshot["zscore"] = false;

  const std::size_t per_strength = kShiftKinds.size() * config.n_per_class;
  const std::size_t total = config.strengths.size() * per_strength;
  Dataset ds;
  ds.windows.resize(total);
  parallel_for(total, config.workers, [&](std::size_t i) {
    const double s = config.strengths[i / per_strength];
    const ShiftKind kind = kShiftKinds[(i % per_strength) / config.n_per_class];
    const std::uint64_t seed = derive_seed(config.master_seed, i);
    Rng rng(seed);
    GenParams p = base;
    if (config.phi_mode.kind == PhiMode::Kind::Random) {
      p.phi = rng.uniform(config.phi_mode.lo, config.phi_mode.hi);
    }
    const ShiftSpec spec = sample_shift_params(kind, s, rng);
    Window w = gen_window(p, spec, rng);
    w.id = i;
    w.strength = s;
    w.seed = seed;
    ds.windows[i] = std::move(w);
  });

  ds.manifest.config = std::move(snapshot);
  ds.manifest.dataset_id = dataset_id_for(ds.manifest.config);
  ds.manifest.records.reserve(total);
  for (const auto& w : ds.windows) {
    ds.manifest.records.push_back({w.id, w.label, w.phi, w.strength, w.seed});
  }
  return ds;
}

Dataset gen_phi_sweep(std::span<const double> phis, std::size_t n_per_phi,
                      const GenParams& params, std::uint64_t master_seed, std::size_t workers) {
  if (phis.empty()) throw DomainError("phi sweep requires at least one phi value");
  if (n_per_phi == 0) throw DomainError("n_per_phi must be positive");
  params.validate();

  nlohmann::json snapshot = rng_snapshot();
  snapshot["generator"] = "phi_sweep";
  snapshot["mu"] = params.mu;
  snapshot["sigma"] = params.sigma;
  snapshot["length"] = params.length;
  snapshot["phis"] = std::vector<double>(phis.begin(), phis.end());
  snapshot["n_per_phi"] = n_per_phi;
  snapshot["master_seed"] = master_seed;
  snapshot["zscore"] = false;

  const std::size_t total = phis.size() * n_per_phi;
  Dataset ds;
  ds.windows.resize(total);
  parallel_for(total, workers, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(master_seed, i);
    Rng rng(seed);
    GenParams p = params;
    p.phi = phis[i / n_per_phi];
    Window w = gen_window(p, ShiftSpec::stationary(), rng);
    w.id = i;
    w.strength = 1.0;
    w.seed = seed;
    ds.windows[i] = std::move(w);
  });

  ds.manifest.config = std::move(snapshot);
  ds.manifest.dataset_id = dataset_id_for(ds.manifest.config);
  for (const auto& w : ds.windows) {
    ds.manifest.records.push_back({w.id, w.label, w.phi, w.strength, w.seed});
  }
  return ds;
}

Window zscore_window(const Window& w) {
  const std::size_t n = w.values.size();
  if (n < 2) throw DomainError("z-score requires at least 2 values");
  double mean = 0.0;
  for (double v : w.values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : w.values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n));

  Window out = w;
  if (sd < 1e-12) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.degenerate = true;
    return out;
  }
  for (double& v : out.values) v = (v - mean) / sd;
  out.degenerate = false;
  return out;
}

Dataset zscore_dataset(const Dataset& ds) {
  Dataset out;
  out.windows.reserve(ds.windows.size());
  for (const auto& w : ds.windows) out.windows.push_back(zscore_window(w));
  out.manifest = ds.manifest;
  out.manifest.config["zscore"] = true;
  out.manifest.dataset_id = dataset_id_for(out.manifest.config);
  return out;
}

std::vector<ShiftKind> labels_of(const DatasetManifest& manifest) {
  std::vector<ShiftKind> out;
  out.reserve(manifest.size());
  for (const auto& r : manifest.records) out.push_back(r.label);
  return out;
}

Matrix series_matrix(std::span<const Window> windows) {
  if (windows.empty()) throw DomainError("no windows to export");
  const std::size_t len = windows.front().values.size();
  Matrix out(windows.size(), len);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].values.size() != len) throw DomainError("windows differ in length");
    std::copy(windows[i].values.begin(), windows[i].values.end(), out.row(i).begin());
  }
  return out;
}

std::vector<Window> windows_from_series(const Matrix& series, const DatasetManifest& manifest) {
  if (series.rows() != manifest.size()) {
    throw ValidationError(fmt::format("series has {} rows, manifest '{}' has {} records", series.rows(),
                                      manifest.dataset_id, manifest.size()));
  }
  std::vector<Window> out(series.rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto row = series.row(i);
    const auto& r = manifest.records[i];
    out[i].values.assign(row.begin(), row.end());
    out[i].id = r.id;
    out[i].label = r.label;
    out[i].phi = r.phi;
    out[i].strength = r.strength;
    out[i].seed = r.seed;
  }
  return out;
}

}  // namespace nsbench
