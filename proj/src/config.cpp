#include "nsbench/experiment_config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>

#include "nsbench/error.hpp"

namespace nsbench {
namespace {

std::vector<double> phi_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<int>(std::llround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) out.push_back(std::round((lo + step * i) * 1000.0) / 1000.0);
  return out;
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const char* where) {
  if (!j.is_object()) throw ValidationError(fmt::format("{} must be a JSON object", where));
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ValidationError(fmt::format("unknown key '{}' in {}", k, where));
  }
}

ProbeConfig probe_from_json(const nlohmann::json& j, ProbeConfig p) {
  reject_unknown(j, {"l2", "max_iter", "grad_tol", "history", "ridge_lambda", "shift_transform",
                     "phi_transform"},
                 "probe config");
  p.softmax.l2 = j.value("l2", p.softmax.l2);
  p.softmax.max_iter = j.value("max_iter", p.softmax.max_iter);
  p.softmax.grad_tol = j.value("grad_tol", p.softmax.grad_tol);
  p.softmax.history = j.value("history", p.softmax.history);
  p.ridge_lambda = j.value("ridge_lambda", p.ridge_lambda);
  if (j.contains("shift_transform")) {
    p.shift_transform = input_transform_from_string(j["shift_transform"].get<std::string>());
  }
  if (j.contains("phi_transform")) {
    p.phi_transform = input_transform_from_string(j["phi_transform"].get<std::string>());
  }
  return p;
}

nlohmann::json probe_to_json(const ProbeConfig& p) {
  return {{"l2", p.softmax.l2},
          {"max_iter", p.softmax.max_iter},
          {"grad_tol", p.softmax.grad_tol},
          {"history", p.softmax.history},
          {"ridge_lambda", p.ridge_lambda},
          {"shift_transform", std::string(to_string(p.shift_transform))},
          {"phi_transform", std::string(to_string(p.phi_transform))}};
}

}  // namespace

std::string_view to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::StrengthSweep:
      return "strength_sweep";
    case ExperimentKind::LengthAblation:
      return "length_ablation";
    case ExperimentKind::PhiRegression:
      return "phi_regression";
    case ExperimentKind::PersistenceSweep:
      return "persistence_sweep";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(std::string_view s) {
  for (auto k : {ExperimentKind::StrengthSweep, ExperimentKind::LengthAblation,
                 ExperimentKind::PhiRegression, ExperimentKind::PersistenceSweep}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError(fmt::format("unknown experiment kind '{}'", s));
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.lengths = {128};
  c.phi_modes = {PhiMode::fixed(0.6), PhiMode::random(0.3, 0.9)};
  switch (kind) {
    case ExperimentKind::StrengthSweep:
      c.strengths = kDefaultStrengths;
      break;
    case ExperimentKind::LengthAblation:
      c.strengths = {1.0, 0.25, 0.12};
      c.lengths = {64, 128, 256, 512};
      break;
    case ExperimentKind::PhiRegression:
      c.phis = phi_grid(0.3, 1.1, 0.05);
      c.phi_modes.clear();
      break;
    case ExperimentKind::PersistenceSweep:
      c.phis = phi_grid(0.3, 1.1, 0.1);
      c.phi_modes.clear();
      break;
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, ExperimentKind fallback) {
  reject_unknown(j,
                 {"kind", "strengths", "lengths", "phi_mode", "phi_modes", "n_per_class", "seeds",
                  "sources", "embeddings", "output_dir", "phis", "n_per_phi", "reference_phi", "mu",
                  "sigma", "train_fraction", "probe", "workers"},
                 "experiment config");
  try {
    const ExperimentKind kind =
        j.contains("kind") ? experiment_kind_from_string(j["kind"].get<std::string>()) : fallback;
    ExperimentConfig c = defaults(kind);
    if (j.contains("strengths")) c.strengths = j["strengths"].get<std::vector<double>>();
    if (j.contains("lengths")) c.lengths = j["lengths"].get<std::vector<std::size_t>>();
    if (j.contains("phi_mode") && j.contains("phi_modes")) {
      throw ValidationError("give either phi_mode or phi_modes, not both");
    }
    if (j.contains("phi_mode")) c.phi_modes = {PhiMode::from_json(j["phi_mode"])};
    if (j.contains("phi_modes")) {
      c.phi_modes.clear();
      for (const auto& m : j["phi_modes"]) c.phi_modes.push_back(PhiMode::from_json(m));
    }
    c.n_per_class = j.value("n_per_class", c.n_per_class);
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("sources")) c.sources = j["sources"].get<std::vector<std::string>>();
    if (j.contains("embeddings")) {
      for (const auto& [name, path] : j["embeddings"].items()) {
        c.embeddings[name] = path.get<std::string>();
      }
    }
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("phis")) c.phis = j["phis"].get<std::vector<double>>();
    c.n_per_phi = j.value("n_per_phi", c.n_per_phi);
    if (j.contains("reference_phi")) c.reference_phi = j["reference_phi"].get<double>();
    c.mu = j.value("mu", c.mu);
    c.sigma = j.value("sigma", c.sigma);
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    if (j.contains("probe")) c.probe = probe_from_json(j["probe"], c.probe);
    c.workers = j.value("workers", c.workers);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed experiment config: {}", e.what()));
  }
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path, ExperimentKind fallback) {
  require_input_file(path);
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config {}", path.string()));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  return from_json(j, fallback);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : phi_modes) modes.push_back(m.to_json());
  nlohmann::json emb = nlohmann::json::object();
  for (const auto& [name, path] : embeddings) emb[name] = path.string();
  nlohmann::json j{{"kind", std::string(to_string(kind))},
                   {"strengths", strengths},
                   {"lengths", lengths},
                   {"phi_modes", modes},
                   {"n_per_class", n_per_class},
                   {"seeds", seeds},
                   {"sources", sources},
                   {"embeddings", emb},
                   {"phis", phis},
                   {"n_per_phi", n_per_phi},
                   {"mu", mu},
                   {"sigma", sigma},
                   {"train_fraction", train_fraction},
                   {"probe", probe_to_json(probe)}};
  if (reference_phi) j["reference_phi"] = *reference_phi;
  return j;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ValidationError("seeds must be nonempty");
  if (sources.empty() && embeddings.empty()) throw ValidationError("no embedding sources declared");
  std::set<std::string> names;
  for (const auto& s : sources) {
    feature_set_from_string(s);
    if (!names.insert(s).second) throw ValidationError(fmt::format("duplicate source '{}'", s));
  }
  for (const auto& [name, path] : embeddings) {
    if (name.empty()) throw ValidationError("embedding source needs a name");
    if (!names.insert(name).second) throw ValidationError(fmt::format("duplicate source '{}'", name));
  }
  if (lengths.empty()) throw ValidationError("lengths must be nonempty");
  for (auto L : lengths) {
    if (L < 5) throw ValidationError(fmt::format("window length {} too short for features (need >= 5)", L));
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train_fraction must lie in (0, 1)");
  }
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be >= 0");
  if (workers == 0) throw ValidationError("workers must be >= 1");

  const bool shift = kind == ExperimentKind::StrengthSweep || kind == ExperimentKind::LengthAblation;
  if (shift) {
    if (strengths.empty()) throw ValidationError("strengths must be nonempty");
    for (double s : strengths) {
      if (!(s > 0.0 && s <= 1.0)) throw ValidationError(fmt::format("strength {} outside (0, 1]", s));
    }
    if (phi_modes.empty()) throw ValidationError("phi_modes must be nonempty");
    if (n_per_class == 0) throw ValidationError("n_per_class must be positive");
  } else {
    if (phis.empty()) throw ValidationError("phis must be nonempty");
    if (kind == ExperimentKind::PersistenceSweep && phis.size() < 3) {
      throw ValidationError("persistence sweep needs at least 3 phi values");
    }
    if (n_per_phi < 2) throw ValidationError("n_per_phi must be >= 2");
    if (reference_phi && std::find(phis.begin(), phis.end(), *reference_phi) == phis.end()) {
      throw ValidationError("reference_phi must be one of phis");
    }
  }
}

}  // namespace nsbench
