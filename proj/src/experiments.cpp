#include "nsbench/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "nsbench/embedio.hpp"
#include "nsbench/error.hpp"
#include "nsbench/parallel.hpp"
#include "nsbench/rng.hpp"

namespace nsbench {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDataStream = 0xda7a;
constexpr std::uint64_t kSplitStream = 0x5971;

struct Source {
  std::string name;
  std::optional<FeatureSetKind> features;  // empty: external
  fs::path dir;
};

std::vector<Source> sources_of(const ExperimentConfig& c) {
  std::vector<Source> out;
  for (const auto& s : c.sources) out.push_back({s, feature_set_from_string(s), {}});
  for (const auto& [name, dir] : c.embeddings) out.push_back({name, std::nullopt, dir});
  return out;
}

Matrix source_matrix(const Source& src, const Dataset& ds) {
  if (src.features) return featurize_dataset(ds.windows, *src.features);
  const fs::path path = src.dir / (ds.manifest.dataset_id + ".nseb");
  if (!fs::exists(path)) {
    throw ValidationError(fmt::format("source '{}': missing embedding file {}", src.name, path.string()));
  }
  EmbeddingMatrix emb = read_embeddings(path);
  validate_alignment(emb, ds.manifest);
  return std::move(emb.values);
}

// Filename-safe rendering of a phi mode label.
std::string mode_stem(const PhiMode& m) {
  std::string s = m.label();
  std::replace(s.begin(), s.end(), '(', '-');
  std::replace(s.begin(), s.end(), ',', '-');
  s.erase(std::remove(s.begin(), s.end(), ')'), s.end());
  return s;
}

struct CellOutput {
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, ConfusionMatrix>> confusions;
  std::vector<std::pair<std::string, DiscrepancyCurve>> curves;
};

Report merge(const ExperimentConfig& config, std::vector<CellOutput>& cells) {
  Report report;
  report.config = config.to_json();
  for (auto& cell : cells) {
    for (auto& r : cell.rows) report.rows.push_back(std::move(r));
    for (auto& [stem, cm] : cell.confusions) {
      auto [it, inserted] = report.confusions.emplace(stem, cm);
      if (!inserted) it->second += cm;
    }
    for (auto& [stem, c] : cell.curves) report.curves.emplace(stem, std::move(c));
  }
  return report;
}

struct ShiftCell {
  std::size_t length;
  double strength;
  PhiMode mode;
  std::uint64_t seed;
};

std::vector<ShiftCell> shift_cells(const ExperimentConfig& c) {
  std::vector<ShiftCell> cells;
  for (auto L : c.lengths)
    for (double s : c.strengths)
      for (const auto& m : c.phi_modes)
        for (auto seed : c.seeds) cells.push_back({L, s, m, seed});
  return cells;
}

Dataset shift_dataset(const ExperimentConfig& c, const ShiftCell& cell, std::uint64_t run_seed) {
  ShiftDatasetConfig dc;
  dc.n_per_class = c.n_per_class;
  dc.strengths = {cell.strength};
  dc.length = cell.length;
  dc.phi_mode = cell.mode;
  dc.mu = c.mu;
  dc.sigma = c.sigma;
  dc.master_seed = trial_data_seed(run_seed, cell.seed);
  return gen_dataset(dc);
}

struct SweepCell {
  std::size_t length;
  std::uint64_t seed;
};

std::vector<SweepCell> sweep_cells(const ExperimentConfig& c) {
  std::vector<SweepCell> cells;
  for (auto L : c.lengths)
    for (auto seed : c.seeds) cells.push_back({L, seed});
  return cells;
}

Dataset sweep_dataset(const ExperimentConfig& c, const SweepCell& cell, std::uint64_t run_seed) {
  GenParams p{c.mu, c.sigma, 0.0, cell.length};
  return gen_phi_sweep(c.phis, c.n_per_phi, p, trial_data_seed(run_seed, cell.seed));
}

void require_kind(const ExperimentConfig& c, std::initializer_list<ExperimentKind> kinds) {
  c.validate();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) {
    throw ValidationError(fmt::format("config kind '{}' does not match the requested experiment",
                                      to_string(c.kind)));
  }
}

Report run_shift_probes(const ExperimentConfig& config, std::uint64_t run_seed) {
  const auto cells = shift_cells(config);
  const auto sources = sources_of(config);
  const std::string experiment(to_string(config.kind));
  std::vector<CellOutput> out(cells.size());
  parallel_for(cells.size(), config.workers, [&](std::size_t i) {
    const auto& cell = cells[i];
    const Dataset ds = shift_dataset(config, cell, run_seed);
    const SplitSpec split{config.train_fraction, true, trial_split_seed(run_seed, cell.seed)};
    for (const auto& src : sources) {
      const Matrix x = source_matrix(src, ds);
      const TrialResult res = run_probe_trial(x, ds.manifest, ProbeTask::ShiftClass, split, config.probe);
      out[i].rows.push_back({experiment, src.name, cell.strength, cell.length, cell.mode.label(),
                             cell.seed, "macro_f1", res.macro_f1});
      out[i].confusions.emplace_back(
          fmt::format("{}_{}_L{}_s{}_{}", experiment, src.name, cell.length, cell.strength,
                      mode_stem(cell.mode)),
          res.confusion);
    }
  });
  return merge(config, out);
}

}  // namespace

std::uint64_t trial_data_seed(std::uint64_t run_seed, std::uint64_t seed) noexcept {
  return derive_seed(derive_seed(run_seed, kDataStream), seed);
}

std::uint64_t trial_split_seed(std::uint64_t run_seed, std::uint64_t seed) noexcept {
  return derive_seed(derive_seed(run_seed, kSplitStream), seed);
}

Report run_strength_sweep(const ExperimentConfig& config, std::uint64_t run_seed) {
  require_kind(config, {ExperimentKind::StrengthSweep});
  return run_shift_probes(config, run_seed);
}

Report run_length_ablation(const ExperimentConfig& config, std::uint64_t run_seed) {
  require_kind(config, {ExperimentKind::LengthAblation});
  return run_shift_probes(config, run_seed);
}

Report run_phi_regression(const ExperimentConfig& config, std::uint64_t run_seed) {
  require_kind(config, {ExperimentKind::PhiRegression});
  const auto cells = sweep_cells(config);
  const auto sources = sources_of(config);
  const std::string experiment(to_string(config.kind));
  std::vector<CellOutput> out(cells.size());
  parallel_for(cells.size(), config.workers, [&](std::size_t i) {
    const auto& cell = cells[i];
    const Dataset ds = sweep_dataset(config, cell, run_seed);
    const SplitSpec split{config.train_fraction, true, trial_split_seed(run_seed, cell.seed)};
    for (const auto& src : sources) {
      const Matrix x = source_matrix(src, ds);
      const TrialResult res = run_probe_trial(x, ds.manifest, ProbeTask::PhiRegression, split, config.probe);
      auto push = [&](const char* metric, double v) {
        out[i].rows.push_back({experiment, src.name, std::nullopt, cell.length, "sweep", cell.seed, metric, v});
      };
      push("mae", res.mae);
      push("pearson_r", res.pearson_r.value_or(NAN));
      push("r2", res.r2);
    }
  });
  return merge(config, out);
}

Report run_persistence_sweep(const ExperimentConfig& config, std::uint64_t run_seed) {
  require_kind(config, {ExperimentKind::PersistenceSweep});
  const auto cells = sweep_cells(config);
  const auto sources = sources_of(config);
  const std::string experiment(to_string(config.kind));
  std::vector<CellOutput> out(cells.size());
  parallel_for(cells.size(), config.workers, [&](std::size_t i) {
    const auto& cell = cells[i];
    const Dataset raw = sweep_dataset(config, cell, run_seed);
    const Dataset z = zscore_dataset(raw);
    std::vector<double> row_phi;
    for (const auto& r : raw.manifest.records) row_phi.push_back(r.phi);
    for (const auto& src : sources) {
      for (const auto norm : {Normalization::Raw, Normalization::ZScore}) {
        const Matrix x = source_matrix(src, norm == Normalization::Raw ? raw : z);
        DiscrepancyCurve curve = discrepancy_curve(x, row_phi, norm, config.reference_phi);
        const double rho = spearman_rho(curve.phis(), curve.means());
        const std::string name = fmt::format("{}:{}", src.name, to_string(norm));
        out[i].rows.push_back({experiment, name, std::nullopt, cell.length, "sweep", cell.seed, "spearman_rho", rho});
        out[i].curves.emplace_back(fmt::format("{}_{}_{}_L{}_seed{}", experiment, src.name, to_string(norm),
                                               cell.length, cell.seed),
                                   std::move(curve));
      }
    }
  });
  return merge(config, out);
}

Report run_experiment(const ExperimentConfig& config, std::uint64_t run_seed) {
  switch (config.kind) {
    case ExperimentKind::StrengthSweep:
      return run_strength_sweep(config, run_seed);
    case ExperimentKind::LengthAblation:
      return run_length_ablation(config, run_seed);
    case ExperimentKind::PhiRegression:
      return run_phi_regression(config, run_seed);
    case ExperimentKind::PersistenceSweep:
      return run_persistence_sweep(config, run_seed);
  }
  throw ValidationError("unknown experiment kind");
}

std::size_t export_datasets(const ExperimentConfig& config, std::uint64_t run_seed, const fs::path& dir) {
  config.validate();
  std::size_t count = 0;
  auto write = [&](const Dataset& ds) {
    const fs::path sub = dir / ds.manifest.dataset_id;
    fs::create_directories(sub);
    ds.manifest.save(sub / "manifest.json");
    write_embeddings(series_matrix(ds.windows), sub / "series.nseb");
    ++count;
  };
  if (config.kind == ExperimentKind::StrengthSweep || config.kind == ExperimentKind::LengthAblation) {
    for (const auto& cell : shift_cells(config)) write(shift_dataset(config, cell, run_seed));
  } else {
    for (const auto& cell : sweep_cells(config)) {
      const Dataset raw = sweep_dataset(config, cell, run_seed);
      write(raw);
      if (config.kind == ExperimentKind::PersistenceSweep) write(zscore_dataset(raw));
    }
  }
  return count;
}

Dataset generate_from_json(const nlohmann::json& j, std::uint64_t seed) {
  if (!j.is_object()) throw ValidationError("generation config must be a JSON object");
  static const std::vector<std::string> allowed{"generator", "n_per_class", "strengths", "length",
                                                "phi_mode",  "mu",          "sigma",     "phis",
                                                "n_per_phi", "zscore",      "workers"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ValidationError(fmt::format("unknown key '{}' in generation config", k));
    }
  }
  try {
    const std::string generator = j.value("generator", std::string("shift"));
    const std::size_t workers = std::max<std::size_t>(1, j.value("workers", std::size_t{1}));
    Dataset ds;
    if (generator == "shift") {
      for (const char* k : {"phis", "n_per_phi"}) {
        if (j.contains(k)) throw ValidationError(fmt::format("'{}' only applies to generator phi_sweep", k));
      }
      ShiftDatasetConfig c;
      c.n_per_class = j.value("n_per_class", c.n_per_class);
      if (j.contains("strengths")) c.strengths = j["strengths"].get<std::vector<double>>();
      c.length = j.value("length", c.length);
      if (j.contains("phi_mode")) c.phi_mode = PhiMode::from_json(j["phi_mode"]);
      c.mu = j.value("mu", c.mu);
      c.sigma = j.value("sigma", c.sigma);
      c.master_seed = seed;
      c.workers = workers;
      ds = gen_dataset(c);
    } else if (generator == "phi_sweep") {
      for (const char* k : {"n_per_class", "strengths", "phi_mode"}) {
        if (j.contains(k)) throw ValidationError(fmt::format("'{}' only applies to generator shift", k));
      }
      GenParams p;
      p.length = j.value("length", p.length);
      p.mu = j.value("mu", p.mu);
      p.sigma = j.value("sigma", p.sigma);
      const auto phis = j.value("phis", ExperimentConfig::defaults(ExperimentKind::PhiRegression).phis);
      ds = gen_phi_sweep(phis, j.value("n_per_phi", std::size_t{400}), p, seed, workers);
    } else {
      throw ValidationError(fmt::format("unknown generator '{}' (expected shift|phi_sweep)", generator));
    }
    if (j.value("zscore", false)) ds = zscore_dataset(ds);
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed generation config: {}", e.what()));
  }
}

nlohmann::json trial_to_json(const TrialResult& r, const DatasetManifest& manifest) {
  nlohmann::json j{{"dataset_id", manifest.dataset_id},
                   {"task", std::string(to_string(r.task))},
                   {"seed", r.seed},
                   {"n_train", r.n_train},
                   {"n_test", r.n_test}};
  if (r.task == ProbeTask::ShiftClass) {
    j["macro_f1"] = r.macro_f1;
    j["labels"] = r.confusion.names();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t t = 0; t < r.confusion.size(); ++t) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t p = 0; p < r.confusion.size(); ++p) row.push_back(r.confusion.at(t, p));
      rows.push_back(std::move(row));
    }
    j["confusion"] = std::move(rows);
    j["fit"] = {{"iterations", r.fit.iterations},
                {"grad_inf_norm", r.fit.grad_inf_norm},
                {"objective", r.fit.objective},
                {"converged", r.fit.converged}};
  } else {
    j["mae"] = r.mae;
    j["pearson_r"] = r.pearson_r ? nlohmann::json(*r.pearson_r) : nlohmann::json();
    j["r2"] = r.r2;
  }
  return j;
}

}  // namespace nsbench
