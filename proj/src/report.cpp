#include "nsbench/report.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "nsbench/error.hpp"

namespace nsbench {
namespace {

namespace fs = std::filesystem;

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_num(*v) : ""; }
std::string fmt_opt(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : ""; }

nlohmann::json json_num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

using GroupKey = std::tuple<std::string, std::string, std::string, std::string, std::string, std::string>;

GroupKey group_key(const ReportRow& r) {
  return {r.experiment, r.source, fmt_opt(r.strength), fmt_opt(r.length), r.phi_mode, r.metric};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

std::string read_file(const fs::path& path) {
  require_input_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fields holding a comma or quote are quoted, with embedded quotes doubled.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ValidationError(fmt::format("unterminated quote in CSV row: {}", line));
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return NAN;
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw ValidationError(fmt::format("bad number '{}' in trials CSV", s));
  return v;
}

bool same_value(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a));
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<ReportRow>& rows) {
  std::vector<AggregateRow> out;
  std::map<GroupKey, std::size_t> slot;
  std::vector<std::vector<double>> values;
  for (const auto& r : rows) {
    const auto [it, inserted] = slot.emplace(group_key(r), out.size());
    if (inserted) {
      out.push_back({r.experiment, r.source, r.strength, r.length, r.phi_mode, r.metric, 0, 0.0, 0.0});
      values.emplace_back();
    }
    values[it->second].push_back(r.value);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& v = values[i];
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out[i].n = v.size();
    out[i].mean = mean;
    out[i].std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  }
  return out;
}

std::string trials_csv(const std::vector<ReportRow>& rows) {
  std::string out = std::string(kTrialsHeader) + '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(r.experiment), csv_field(r.source),
                       fmt_opt(r.strength), fmt_opt(r.length), csv_field(r.phi_mode), r.seed,
                       csv_field(r.metric), fmt_num(r.value));
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out = std::string(kAggregateHeader) + '\n';
  for (const auto& a : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", csv_field(a.experiment), csv_field(a.source),
                       fmt_opt(a.strength), fmt_opt(a.length), csv_field(a.phi_mode), csv_field(a.metric),
                       a.n, fmt_num(a.mean), fmt_num(a.std));
  }
  return out;
}

nlohmann::json aggregate_json(const std::vector<AggregateRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : rows) {
    arr.push_back({{"experiment", a.experiment},
                   {"source", a.source},
                   {"strength", a.strength ? nlohmann::json(*a.strength) : nlohmann::json()},
                   {"length", a.length ? nlohmann::json(*a.length) : nlohmann::json()},
                   {"phi_mode", a.phi_mode},
                   {"metric", a.metric},
                   {"n", a.n},
                   {"mean", json_num(a.mean)},
                   {"std", json_num(a.std)}});
  }
  return {{"aggregates", std::move(arr)}};
}

std::vector<ReportRow> parse_trials_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTrialsHeader) {
    throw ValidationError("trials CSV header mismatch");
  }
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw ValidationError(fmt::format("trials CSV row has {} fields: {}", f.size(), line));
    ReportRow r;
    r.experiment = f[0];
    r.source = f[1];
    if (!f[2].empty()) r.strength = parse_double(f[2]);
    if (!f[3].empty()) r.length = std::stoul(f[3]);
    r.phi_mode = f[4];
    r.seed = std::stoull(f[5]);
    r.metric = f[6];
    r.value = parse_double(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_report(const Report& report, const fs::path& dir) {
  if (report.rows.empty()) throw ValidationError("refusing to emit an empty report");
  std::set<std::tuple<GroupKey, std::uint64_t>> keys;
  for (const auto& r : report.rows) {
    if (!keys.emplace(group_key(r), r.seed).second) {
      throw ValidationError(fmt::format("duplicate report row {}/{}/{} seed {}", r.experiment, r.source,
                                        r.metric, r.seed));
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));

  const std::string trials = trials_csv(report.rows);
  const auto agg = aggregate(report.rows);

  // Aggregates must be reproducible from the emitted trial rows alone.
  const auto again = aggregate(parse_trials_csv(trials));
  if (again.size() != agg.size()) throw NumericalError("aggregate cross-check: group count differs");
  for (std::size_t i = 0; i < agg.size(); ++i) {
    if (agg[i].n != again[i].n || !same_value(agg[i].mean, again[i].mean) ||
        !same_value(agg[i].std, again[i].std)) {
      throw NumericalError(fmt::format("aggregate cross-check failed for {}/{}", agg[i].source, agg[i].metric));
    }
  }

  write_file(dir / "trials.csv", trials);
  write_file(dir / "aggregate.csv", aggregate_csv(agg));
  write_file(dir / "summary.json", aggregate_json(agg).dump(2) + '\n');
  if (!report.config.is_null()) write_file(dir / "config.json", report.config.dump(2) + '\n');
  if (!report.confusions.empty()) {
    fs::create_directories(dir / "confusion");
    for (const auto& [stem, cm] : report.confusions) write_file(dir / "confusion" / (stem + ".csv"), cm.to_csv());
  }
  if (!report.curves.empty()) {
    fs::create_directories(dir / "curves");
    for (const auto& [stem, c] : report.curves) write_file(dir / "curves" / (stem + ".csv"), c.to_csv());
  }
}

void regenerate_report(const fs::path& in, const fs::path& out) {
  const auto rows = parse_trials_csv(read_file(in / "trials.csv"));
  if (rows.empty()) throw ValidationError(fmt::format("{} has no trial rows", (in / "trials.csv").string()));
  const auto agg = aggregate(rows);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", out.string(), ec.message()));
  write_file(out / "aggregate.csv", aggregate_csv(agg));
  write_file(out / "summary.json", aggregate_json(agg).dump(2) + '\n');
  if (fs::absolute(in) != fs::absolute(out)) write_file(out / "trials.csv", trials_csv(rows));
}

}  // namespace nsbench
