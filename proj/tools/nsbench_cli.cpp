// nsbench command-line entry point.
//
// Exit codes: 0 success, 1 validation error (bad arguments, configs or
// input files), 2 runtime error.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsbench/embedio.hpp"
#include "nsbench/error.hpp"
#include "nsbench/experiments.hpp"
#include "nsbench/features.hpp"
#include "nsbench/kernels.hpp"

namespace fs = std::filesystem;
using namespace nsbench;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

nlohmann::json read_json(const fs::path& path) {
  require_input_file(path);
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
}

std::map<std::string, fs::path> parse_named_paths(const std::vector<std::string>& specs) {
  std::map<std::string, fs::path> out;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
      throw ValidationError(fmt::format("--embeddings expects name=path, got '{}'", s));
    }
    if (!out.emplace(s.substr(0, eq), s.substr(eq + 1)).second) {
      throw ValidationError(fmt::format("embedding source '{}' given twice", s.substr(0, eq)));
    }
  }
  return out;
}

struct ExperimentArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<std::size_t> workers;
  std::vector<std::string> embeddings;
  std::string export_dir;
};

void add_experiment_command(CLI::App& app, const char* name, const char* help, ExperimentKind kind,
                            ExperimentArgs& args, std::function<int()>& action) {
  auto* cmd = app.add_subcommand(name, help);
  cmd->add_option("--config", args.config, "Experiment config (JSON); defaults used when omitted");
  cmd->add_option("--seed", args.seed, "Run seed");
  cmd->add_option("--out", args.out, "Report directory");
  cmd->add_option("--workers", args.workers, "Parallel trial workers");
  cmd->add_option("--embeddings", args.embeddings,
                  "External source name=dir (dir holds <dataset_id>.nseb); repeatable");
  cmd->add_option("--export-datasets", args.export_dir,
                  "Write every dataset (manifest + series) to this directory and exit");
  cmd->callback([&args, &action, kind] {
    action = [&args, kind]() -> int {
      ExperimentConfig config = args.config.empty() ? ExperimentConfig::defaults(kind)
                                                    : ExperimentConfig::load(args.config, kind);
      if (config.kind != kind) {
        throw ValidationError(fmt::format("config kind '{}' does not match this subcommand",
                                          to_string(config.kind)));
      }
      for (auto& [n, p] : parse_named_paths(args.embeddings)) config.embeddings[n] = p;
      if (args.workers) config.workers = *args.workers;
      if (!args.out.empty()) config.output_dir = args.out;
      config.validate();
      if (!args.export_dir.empty()) {
        const auto n = export_datasets(config, args.seed, args.export_dir);
        fmt::print("exported {} datasets to {}\n", n, args.export_dir);
        return 0;
      }
      if (config.output_dir.empty()) throw ValidationError("--out (or output_dir in config) is required");
      const Report report = run_experiment(config, args.seed);
      emit_report(report, config.output_dir);
      fmt::print("{}: {} trial rows written to {} (kernels: {})\n", to_string(kind), report.rows.size(),
                 config.output_dir.string(), simd::active_kernels().name);
      return 0;
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-stationarity probing benchmark for time-series embeddings"};
  app.require_subcommand(1);
  std::function<int()> action;

  // gen
  std::string gen_config, gen_out;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Generate a dataset (manifest.json + series.nseb)");
  gen->add_option("--config", gen_config, "Generation config (JSON)")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->callback([&] {
    action = [&]() -> int {
      const Dataset ds = generate_from_json(read_json(gen_config), gen_seed);
      fs::create_directories(gen_out);
      ds.manifest.save(fs::path(gen_out) / "manifest.json");
      write_embeddings(series_matrix(ds.windows), fs::path(gen_out) / "series.nseb");
      fmt::print("{}: {} windows written to {}\n", ds.manifest.dataset_id, ds.windows.size(), gen_out);
      return 0;
    };
  });

  // features
  std::string feat_manifest, feat_series, feat_set, feat_out;
  auto* feat = app.add_subcommand("features", "Compute a baseline feature matrix as NSEB");
  feat->add_option("--manifest", feat_manifest, "Dataset manifest")->required();
  feat->add_option("--series", feat_series, "Series file (default: series.nseb beside the manifest)");
  feat->add_option("--set", feat_set, "stats|statsdyn")->required();
  feat->add_option("--out", feat_out, "Output NSEB file")->required();
  feat->callback([&] {
    action = [&]() -> int {
      const DatasetManifest manifest = DatasetManifest::load(feat_manifest);
      const fs::path series_path =
          feat_series.empty() ? fs::path(feat_manifest).parent_path() / "series.nseb" : fs::path(feat_series);
      EmbeddingMatrix series = read_embeddings(series_path);
      validate_alignment(series, manifest);
      const auto windows = windows_from_series(series.values, manifest);
      const Matrix x = featurize_dataset(windows, feature_set_from_string(feat_set));
      write_embeddings(x, feat_out);
      fmt::print("{}x{} {} features written to {}\n", x.rows(), x.cols(), feat_set, feat_out);
      return 0;
    };
  });

  // probe
  std::string probe_emb, probe_manifest, probe_task = "shift", probe_out;
  std::size_t probe_seeds = 5;
  std::uint64_t probe_run_seed = 0;
  auto* probe = app.add_subcommand("probe", "Run linear probe trials on one embedding file");
  probe->add_option("--embeddings", probe_emb, "NSEB file")->required();
  probe->add_option("--manifest", probe_manifest, "Dataset manifest")->required();
  probe->add_option("--task", probe_task, "shift|phi");
  probe->add_option("--seeds", probe_seeds, "Number of split seeds");
  probe->add_option("--seed", probe_run_seed, "Run seed for split derivation");
  probe->add_option("--out", probe_out, "Output JSON-lines file")->required();
  probe->callback([&] {
    action = [&]() -> int {
      const ProbeTask task = probe_task_from_string(probe_task);
      if (probe_seeds == 0) throw ValidationError("--seeds must be >= 1");
      const DatasetManifest manifest = DatasetManifest::load(probe_manifest);
      EmbeddingMatrix emb = read_embeddings(probe_emb);
      validate_alignment(emb, manifest);
      std::ofstream out(probe_out);
      if (!out) throw IoError(fmt::format("cannot write {}", probe_out));
      const ProbeConfig config;
      for (std::size_t k = 0; k < probe_seeds; ++k) {
        SplitSpec split{0.7, true, trial_split_seed(probe_run_seed, k)};
        TrialResult r = run_probe_trial(emb.values, manifest, task, split, config);
        r.seed = k;
        out << trial_to_json(r, manifest).dump() << '\n';
      }
      if (!out) throw IoError(fmt::format("write failed for {}", probe_out));
      return 0;
    };
  });

  ExperimentArgs sweep_args, ablate_args, phireg_args, persist_args;
  add_experiment_command(app, "sweep", "Shift-type probing across strengths", ExperimentKind::StrengthSweep,
                         sweep_args, action);
  add_experiment_command(app, "ablate", "Shift-type probing across window lengths",
                         ExperimentKind::LengthAblation, ablate_args, action);
  add_experiment_command(app, "phireg", "Persistence regression", ExperimentKind::PhiRegression,
                         phireg_args, action);
  add_experiment_command(app, "persist", "Cosine discrepancy across persistence",
                         ExperimentKind::PersistenceSweep, persist_args, action);

  // report
  std::string report_in, report_out;
  auto* report = app.add_subcommand("report", "Recompute aggregates from a report's trials.csv");
  report->add_option("--in", report_in, "Report directory containing trials.csv")->required();
  report->add_option("--out", report_out, "Output directory (default: --in)");
  report->callback([&] {
    action = [&]() -> int {
      regenerate_report(report_in, report_out.empty() ? report_in : report_out);
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }

  try {
    return action ? action() : 0;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
