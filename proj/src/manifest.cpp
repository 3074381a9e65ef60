#include "nsbench/manifest.hpp"

#include <fmt/format.h>

#include <fstream>
#include <unordered_set>

#include "nsbench/error.hpp"

namespace nsbench {

std::string_view to_string(ShiftKind kind) noexcept {
  switch (kind) {
    case ShiftKind::Stationary:
      return "stationary";
    case ShiftKind::MeanShift:
      return "mean_shift";
    case ShiftKind::VarianceShift:
      return "variance_shift";
    case ShiftKind::Trend:
      return "trend";
  }
  return "unknown";
}

ShiftKind shift_kind_from_string(std::string_view name) {
  for (auto k : kShiftKinds) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError(fmt::format("unknown shift label '{}'", name));
}

void DatasetManifest::validate() const {
  if (dataset_id.empty()) throw ValidationError("manifest has an empty dataset_id");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(records.size());
  for (const auto& r : records) {
    if (!seen.insert(r.id).second) {
      throw ValidationError(fmt::format("manifest '{}' repeats record id {}", dataset_id, r.id));
    }
  }
}

nlohmann::json DatasetManifest::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    recs.push_back({{"id", r.id},
                    {"label", std::string(to_string(r.label))},
                    {"phi", r.phi},
                    {"strength", r.strength},
                    {"seed", r.seed}});
  }
  return {{"dataset_id", dataset_id}, {"config", config}, {"records", std::move(recs)}};
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
  DatasetManifest m;
  try {
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.config = j.at("config");
    const auto& recs = j.at("records");
    m.records.reserve(recs.size());
    for (const auto& r : recs) {
      m.records.push_back({r.at("id").get<std::uint64_t>(),
                           shift_kind_from_string(r.at("label").get<std::string>()),
                           r.at("phi").get<double>(), r.at("strength").get<double>(),
                           r.at("seed").get<std::uint64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed manifest: {}", e.what()));
  }
  m.validate();
  return m;
}

void DatasetManifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write manifest {}", path.string()));
  out << to_json().dump(1) << '\n';
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
  require_input_file(path);
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open manifest {}", path.string()));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  return from_json(j);
}

std::string dataset_id_for(const nlohmann::json& config) {
  // FNV-1a over the canonical dump; nlohmann sorts object keys.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("ar1-{:016x}", h);
}

}  // namespace nsbench
