#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsbench/synthgen_types.hpp"

namespace nsbench {

struct ManifestRecord {
  std::uint64_t id = 0;
  ShiftKind label = ShiftKind::Stationary;
  double phi = 0.0;
  double strength = 1.0;
  std::uint64_t seed = 0;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

// Provenance for a generated dataset. Row i of every matrix derived from
// the dataset (series, features, embeddings) corresponds to records[i].
struct DatasetManifest {
  std::string dataset_id;
  nlohmann::json config;
  std::vector<ManifestRecord> records;

  std::size_t size() const noexcept { return records.size(); }

  // Throws ValidationError on duplicate ids or an empty id.
  void validate() const;

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j);

  void save(const std::filesystem::path& path) const;
  static DatasetManifest load(const std::filesystem::path& path);
};

// Deterministic dataset id from a config snapshot.
std::string dataset_id_for(const nlohmann::json& config);

}  // namespace nsbench
