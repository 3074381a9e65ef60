#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsbench/features.hpp"
#include "nsbench/probes.hpp"
#include "nsbench/synthgen.hpp"

namespace nsbench {

enum class ExperimentKind { StrengthSweep, LengthAblation, PhiRegression, PersistenceSweep };

std::string_view to_string(ExperimentKind k) noexcept;
ExperimentKind experiment_kind_from_string(std::string_view s);

// Default strength grid, strongest first.
inline const std::vector<double> kDefaultStrengths{1.0, 0.7, 0.5, 0.35, 0.25, 0.18, 0.12, 0.08};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::StrengthSweep;
  std::vector<double> strengths;
  std::vector<std::size_t> lengths;
  std::vector<PhiMode> phi_modes;
  std::size_t n_per_class = 2000;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  // Built-in feature sources ("stats", "statsdyn").
  std::vector<std::string> sources{"stats", "statsdyn"};
  // External sources: name -> directory holding <dataset_id>.nseb files.
  std::map<std::string, std::filesystem::path> embeddings;
  std::filesystem::path output_dir;
  // phi_regression / persistence_sweep grid.
  std::vector<double> phis;
  std::size_t n_per_phi = 400;
  std::optional<double> reference_phi;
  double mu = 0.5;
  double sigma = kBaselineSigma;
  double train_fraction = 0.7;
  ProbeConfig probe;
  std::size_t workers = 1;

  static ExperimentConfig defaults(ExperimentKind kind);
  // Starts from defaults(kind from JSON or `fallback`) and overlays the JSON.
  // Unknown keys throw ValidationError.
  static ExperimentConfig from_json(const nlohmann::json& j, ExperimentKind fallback);
  static ExperimentConfig load(const std::filesystem::path& path, ExperimentKind fallback);

  nlohmann::json to_json() const;
  void validate() const;
};

}  // namespace nsbench
