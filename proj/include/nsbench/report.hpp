#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsbench/metrics.hpp"

namespace nsbench {

// One metric value from one trial. Empty strength/length render as empty
// CSV fields (experiments without that axis).
struct ReportRow {
  std::string experiment;
  std::string source;
  std::optional<double> strength;
  std::optional<std::size_t> length;
  std::string phi_mode;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

// Mean and sample std (n-1; 0 for a single seed) over seeds.
struct AggregateRow {
  std::string experiment;
  std::string source;
  std::optional<double> strength;
  std::optional<std::size_t> length;
  std::string phi_mode;
  std::string metric;
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;
  // File stem -> matrix summed over seeds.
  std::map<std::string, ConfusionMatrix> confusions;
  // File stem -> curve.
  std::map<std::string, DiscrepancyCurve> curves;
  nlohmann::json config;
};

inline constexpr const char* kTrialsHeader =
    "experiment,source,strength,length,phi_mode,seed,metric,value";
inline constexpr const char* kAggregateHeader =
    "experiment,source,strength,length,phi_mode,metric,n,mean,std";

// Groups by every key except seed, in first-appearance order.
std::vector<AggregateRow> aggregate(const std::vector<ReportRow>& rows);

std::string trials_csv(const std::vector<ReportRow>& rows);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
nlohmann::json aggregate_json(const std::vector<AggregateRow>& rows);
std::vector<ReportRow> parse_trials_csv(const std::string& text);

// Writes trials.csv, aggregate.csv, summary.json, config.json (when set),
// confusion/<stem>.csv and curves/<stem>.csv under `dir`. Rejects empty
// reports and duplicate trial keys, and cross-checks the aggregate against
// a re-parse of the written trial CSV.
void emit_report(const Report& report, const std::filesystem::path& dir);

// Rebuilds aggregate.csv and summary.json in `out` from `in`/trials.csv.
void regenerate_report(const std::filesystem::path& in, const std::filesystem::path& out);

}  // namespace nsbench
