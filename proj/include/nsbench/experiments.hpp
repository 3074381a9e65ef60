#pragma once

#include <cstdint>
#include <filesystem>

#include "nsbench/experiment_config.hpp"
#include "nsbench/report.hpp"

namespace nsbench {

// Dataset master seed for trial seed `seed` under run seed `run_seed`.
// Shared across strengths, lengths and sources so cells differ only in the
// factor being swept.
std::uint64_t trial_data_seed(std::uint64_t run_seed, std::uint64_t seed) noexcept;
std::uint64_t trial_split_seed(std::uint64_t run_seed, std::uint64_t seed) noexcept;

Report run_strength_sweep(const ExperimentConfig& config, std::uint64_t run_seed);
Report run_length_ablation(const ExperimentConfig& config, std::uint64_t run_seed);
Report run_phi_regression(const ExperimentConfig& config, std::uint64_t run_seed);
Report run_persistence_sweep(const ExperimentConfig& config, std::uint64_t run_seed);

Report run_experiment(const ExperimentConfig& config, std::uint64_t run_seed);

// Standalone generation for the `gen` subcommand. Keys: generator
// ("shift" | "phi_sweep"), n_per_class, strengths, length, phi_mode, mu,
// sigma, phis, n_per_phi, zscore, workers. Unknown keys throw.
Dataset generate_from_json(const nlohmann::json& config, std::uint64_t seed);

// One JSON record for a probe trial (the `probe` subcommand output line).
nlohmann::json trial_to_json(const TrialResult& result, const DatasetManifest& manifest);

// Writes <dir>/<dataset_id>/{manifest.json,series.nseb} for every dataset
// the experiment would generate, so external embedders can produce
// <dataset_id>.nseb files for the `embeddings` sources. Returns the count.
std::size_t export_datasets(const ExperimentConfig& config, std::uint64_t run_seed,
                            const std::filesystem::path& dir);

}  // namespace nsbench
