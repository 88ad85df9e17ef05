#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftalloc/config.hpp"
#include "ftalloc/cost_model.hpp"
#include "ftalloc/solver.hpp"
#include "ftalloc/verifier.hpp"

namespace ftalloc {

std::string_view tool_version() noexcept;

// Everything needed to reproduce a run.
struct RunManifest {
  GameConfig config;
  std::string oracle;
  std::vector<std::string> corpus_files;
  std::string tool_version;
  std::string timestamp;  // ISO-8601 UTC; only written to aggregate.json
};

// One line of summary.csv.
struct SummaryRow {
  std::string name;
  double q_uniform = 0.0;
  double r_uniform = 0.0;
  double q_eq = 0.0;
  double r_eq = 0.0;
  double improvement_pct = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::int64_t oracle_evaluations = 0;  // not a CSV column
};

struct AggregateSummary {
  int circuit_count = 0;
  double mean_pct = 0.0;  // unweighted per-instance mean
  double median_pct = 0.0;
  double min_pct = 0.0;
  double max_pct = 0.0;
  int converged_count = 0;
  std::int64_t total_oracle_evaluations = 0;
};

inline constexpr std::string_view kSummaryCsvHeader =
    "name,Q_uniform,R_uniform,Q_eq,R_eq,improvement_pct,sweeps,converged";

std::string csv_row(const SummaryRow& row);
AggregateSummary summarize(std::span<const SummaryRow> rows);

struct HarnessOptions {
  std::optional<double> grid_check;  // resolution
  unsigned jobs = 1;                 // concurrent circuits / restarts
  int certify_samples = 2001;
  double certify_bound_factor = 10.0;  // bound = factor * tol_delta
};

struct CircuitOutcome {
  CircuitProfile profile;
  SolveResult solve;
  EquilibriumCertificate certificate;
  ImprovementReport report;
  std::optional<GridResult> grid;

  SummaryRow row() const;
};

// Solve, certify and measure improvement for one profile.
CircuitOutcome run_circuit(ResourceOracle& oracle, const CircuitProfile& profile,
                           const GameConfig& cfg, const HarnessOptions& options = {});

std::string manifest_json(const RunManifest& manifest, bool with_timestamp);
GameConfig config_from_manifest_json(const std::string& manifest_text);
std::string report_json(const CircuitOutcome& outcome, const RunManifest& manifest);

struct CorpusRun {
  AggregateSummary summary;
  std::vector<CircuitOutcome> outcomes;  // sorted by circuit name
  std::vector<std::string> diagnostics;
  int exit_code = 0;
};

// Runs every *.json profile in corpus_dir and writes <name>.report.json,
// summary.csv and aggregate.json into out_dir. Unreadable profiles and
// failed solves are skipped with a diagnostic and a nonzero exit code.
CorpusRun run_corpus(const std::filesystem::path& corpus_dir,
                     const GameConfig& cfg, ResourceOracle& oracle,
                     const std::filesystem::path& out_dir,
                     const HarnessOptions& options = {});

// Full JSON report for one profile file.
std::string run_single(const std::filesystem::path& profile_path,
                       const GameConfig& cfg, ResourceOracle& oracle,
                       const HarnessOptions& options = {});

// "synthetic" or "exec:<command line>".
std::unique_ptr<ResourceOracle> make_oracle(
    std::string_view choice,
    std::chrono::milliseconds timeout = std::chrono::seconds(60));

}  // namespace ftalloc
