#include "ftalloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "ftalloc/error.hpp"
#include "ftalloc/external_oracle.hpp"
#include "json.hpp"

#ifndef FTALLOC_VERSION
#define FTALLOC_VERSION "0.0.0"
#endif

namespace ftalloc {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json shares_json(const Allocation& s) {
  return json::array({s[PlayerId::L], s[PlayerId::T], s[PlayerId::R]});
}

json config_json(const GameConfig& c) {
  return {{"epsilon_total", c.epsilon_total},
          {"eps_min", c.eps_min},
          {"weight_w", c.weight_w},
          {"restarts_K", c.restarts_K},
          {"max_sweeps_Tmax", c.max_sweeps_Tmax},
          {"tol_delta", c.tol_delta},
          {"rng_seed", c.rng_seed},
          {"brent_xtol", c.brent_xtol},
          {"brent_max_eval", c.brent_max_eval},
          {"bracket_scan_points", c.bracket_scan_points},
          {"relative_delta", c.relative_delta}};
}

json manifest_object(const RunManifest& m, bool with_timestamp) {
  json j = {{"config", config_json(m.config)},
            {"oracle", m.oracle},
            {"corpus_files", m.corpus_files},
            {"tool_version", m.tool_version}};
  if (with_timestamp) j["timestamp"] = m.timestamp;
  return j;
}

json point_json(const OperatingPoint& p) {
  return {{"s", shares_json(p.allocation)},
          {"Q", p.estimate.physical_qubits},
          {"R_seconds", p.estimate.runtime_seconds},
          {"cost", p.cost},
          {"volume", p.volume}};
}

json solve_json(const SolveResult& r) {
  json restarts = json::array();
  for (const auto& t : r.restarts) {
    json trajectory = json::array();
    for (const auto& rec : t.records) {
      trajectory.push_back({{"sweep", rec.sweep},
                            {"s", shares_json(rec.allocation)},
                            {"cost", rec.cost},
                            {"delta", rec.delta},
                            {"movement", rec.movement}});
    }
    json failure = nullptr;
    if (t.failure) {
      failure = {{"code", std::string(to_string(t.failure->code))},
                 {"message", t.failure->message}};
    }
    restarts.push_back({{"index", t.index},
                        {"seed", t.seed},
                        {"converged", t.converged},
                        {"sweeps", t.sweeps()},
                        {"evaluations", t.evaluations},
                        {"failure", failure},
                        {"trajectory", trajectory}});
  }
  json winner = nullptr;
  if (r.winning_restart) winner = *r.winning_restart;
  return {{"s_star", shares_json(r.s_star)},
          {"c_star", r.c_star},
          {"uniform_cost", r.uniform_cost},
          {"winning_restart", winner},
          {"oracle_evaluations", r.oracle_evaluations},
          {"converged", r.converged()},
          {"restarts", restarts}};
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

}  // namespace

std::string_view tool_version() noexcept { return FTALLOC_VERSION; }

std::string csv_row(const SummaryRow& r) {
  return r.name + "," + fmt_double(r.q_uniform) + "," + fmt_double(r.r_uniform) +
         "," + fmt_double(r.q_eq) + "," + fmt_double(r.r_eq) + "," +
         fmt_double(r.improvement_pct) + "," + std::to_string(r.sweeps) + "," +
         (r.converged ? "true" : "false");
}

AggregateSummary summarize(std::span<const SummaryRow> rows) {
  AggregateSummary s;
  s.circuit_count = static_cast<int>(rows.size());
  if (rows.empty()) return s;
  std::vector<double> pct;
  double sum = 0.0;
  for (const auto& r : rows) {
    pct.push_back(r.improvement_pct);
    sum += r.improvement_pct;
    if (r.converged) ++s.converged_count;
    s.total_oracle_evaluations += r.oracle_evaluations;
  }
  s.mean_pct = sum / static_cast<double>(rows.size());
  std::sort(pct.begin(), pct.end());
  const std::size_t n = pct.size();
  s.median_pct = n % 2 ? pct[n / 2] : 0.5 * (pct[n / 2 - 1] + pct[n / 2]);
  s.min_pct = pct.front();
  s.max_pct = pct.back();
  return s;
}

SummaryRow CircuitOutcome::row() const {
  SummaryRow r;
  r.name = profile.name;
  r.q_uniform = report.uniform.estimate.physical_qubits;
  r.r_uniform = report.uniform.estimate.runtime_seconds;
  r.q_eq = report.equilibrium.estimate.physical_qubits;
  r.r_eq = report.equilibrium.estimate.runtime_seconds;
  r.improvement_pct = report.improvement_pct;
  r.sweeps = solve.winning_restart ? solve.restarts[*solve.winning_restart].sweeps() : 0;
  r.converged = solve.converged();
  r.oracle_evaluations = solve.oracle_evaluations;
  return r;
}

CircuitOutcome run_circuit(ResourceOracle& oracle, const CircuitProfile& profile,
                           const GameConfig& cfg, const HarnessOptions& options) {
  SolveResult result = solve(oracle, profile, cfg, SolveOptions{options.jobs});
  EquilibriumCertificate cert =
      certify_nash(oracle, profile, result.s_star, cfg, options.certify_samples,
                   options.certify_bound_factor * cfg.tol_delta);
  ImprovementReport report = improvement(oracle, profile, cfg, result);
  std::optional<GridResult> grid;
  if (options.grid_check) {
    grid = grid_minimize(oracle, profile, cfg, *options.grid_check, options.jobs);
  }
  return {profile, std::move(result), cert, report, grid};
}

std::string manifest_json(const RunManifest& manifest, bool with_timestamp) {
  return manifest_object(manifest, with_timestamp).dump(2);
}

GameConfig config_from_manifest_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("manifest: ") + e.what());
  }
  const json& c = j.contains("manifest") ? j.at("manifest").at("config")
                                         : j.at("config");
  GameConfig cfg;
  cfg.epsilon_total = c.at("epsilon_total").get<double>();
  cfg.eps_min = c.at("eps_min").get<double>();
  cfg.weight_w = c.at("weight_w").get<double>();
  cfg.restarts_K = c.at("restarts_K").get<int>();
  cfg.max_sweeps_Tmax = c.at("max_sweeps_Tmax").get<int>();
  cfg.tol_delta = c.at("tol_delta").get<double>();
  cfg.rng_seed = c.at("rng_seed").get<std::uint64_t>();
  cfg.brent_xtol = c.at("brent_xtol").get<double>();
  cfg.brent_max_eval = c.at("brent_max_eval").get<int>();
  cfg.bracket_scan_points = c.at("bracket_scan_points").get<int>();
  cfg.relative_delta = c.at("relative_delta").get<bool>();
  cfg.validate();
  return cfg;
}

std::string report_json(const CircuitOutcome& o, const RunManifest& manifest) {
  const auto& cert = o.certificate;
  json j = {
      {"name", o.profile.name},
      {"manifest", manifest_object(manifest, false)},
      {"profile", json::parse(dump_profile(o.profile))},
      {"uniform", point_json(o.report.uniform)},
      {"equilibrium", point_json(o.report.equilibrium)},
      {"improvement_pct", o.report.improvement_pct},
      {"certificate",
       {{"improvement", cert.improvement},
        {"samples_per_player", cert.samples_per_player},
        {"bound", cert.bound},
        {"pass", cert.pass}}},
      {"solve", solve_json(o.solve)}};
  if (o.grid) {
    j["grid_check"] = {{"s", shares_json(o.grid->allocation)},
                       {"cost", o.grid->cost},
                       {"points", o.grid->points}};
  }
  return j.dump(2) + "\n";
}

CorpusRun run_corpus(const fs::path& corpus_dir, const GameConfig& cfg,
                     ResourceOracle& oracle, const fs::path& out_dir,
                     const HarnessOptions& options) {
  cfg.validate();
  if (!fs::is_directory(corpus_dir)) {
    throw Error(ErrorCode::kUsage, corpus_dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Error(ErrorCode::kUsage, "no *.json profiles in " + corpus_dir.string());
  }

  CorpusRun run;
  RunManifest manifest{cfg, oracle.describe(), {}, std::string(tool_version()),
                       utc_timestamp()};
  std::vector<CircuitProfile> profiles;
  std::set<std::string> names;
  for (const auto& f : files) {
    manifest.corpus_files.push_back(f.filename().string());
    try {
      CircuitProfile p = load_profile(f);
      if (!names.insert(p.name).second) {
        throw Error(ErrorCode::kInvalidProfile,
                    f.filename().string() + ": duplicate circuit name '" + p.name + "'");
      }
      profiles.push_back(std::move(p));
    } catch (const Error& e) {
      run.diagnostics.push_back(std::string("skipped: ") + e.what());
    }
  }
  std::sort(profiles.begin(), profiles.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });

  // Circuits may run concurrently; restarts inside each then run serially.
  const unsigned jobs = oracle.reentrant() ? std::max(1u, options.jobs) : 1u;
  HarnessOptions per_circuit = options;
  per_circuit.jobs = 1;
  std::vector<std::optional<CircuitOutcome>> outcomes(profiles.size());
  std::vector<std::string> failures(profiles.size());
  const auto work = [&](std::size_t k) {
    try {
      outcomes[k] = run_circuit(oracle, profiles[k], cfg, per_circuit);
    } catch (const Error& e) {
      failures[k] = profiles[k].name + ": " + e.what();
    }
  };
  if (jobs == 1) {
    for (std::size_t k = 0; k < profiles.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < profiles.size(); k = next++) work(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  fs::create_directories(out_dir);
  std::vector<SummaryRow> rows;
  std::string csv = std::string(kSummaryCsvHeader) + "\n";
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    if (!outcomes[k]) {
      run.diagnostics.push_back("failed: " + failures[k]);
      continue;
    }
    const CircuitOutcome& o = *outcomes[k];
    write_file(out_dir / (o.profile.name + ".report.json"), report_json(o, manifest));
    rows.push_back(o.row());
    csv += csv_row(rows.back()) + "\n";
    run.outcomes.push_back(std::move(*outcomes[k]));
  }
  write_file(out_dir / "summary.csv", csv);

  run.summary = summarize(rows);
  const AggregateSummary& s = run.summary;
  json aggregate = {
      {"summary",
       {{"circuit_count", s.circuit_count},
        {"mean_improvement_pct", s.mean_pct},
        {"median_improvement_pct", s.median_pct},
        {"min_improvement_pct", s.min_pct},
        {"max_improvement_pct", s.max_pct},
        {"converged_count", s.converged_count},
        {"total_oracle_evaluations", s.total_oracle_evaluations},
        {"mean_weighting", "unweighted per-instance mean"}}},
      {"manifest", manifest_object(manifest, true)},
      {"diagnostics", run.diagnostics}};
  write_file(out_dir / "aggregate.json", aggregate.dump(2) + "\n");

  run.exit_code = run.diagnostics.empty() ? 0 : 1;
  return run;
}

std::string run_single(const fs::path& profile_path, const GameConfig& cfg,
                       ResourceOracle& oracle, const HarnessOptions& options) {
  cfg.validate();
  const CircuitProfile profile = load_profile(profile_path);
  const CircuitOutcome o = run_circuit(oracle, profile, cfg, options);
  const RunManifest manifest{cfg, oracle.describe(),
                             {profile_path.filename().string()},
                             std::string(tool_version()), {}};
  return report_json(o, manifest);
}

std::unique_ptr<ResourceOracle> make_oracle(std::string_view choice,
                                            std::chrono::milliseconds timeout) {
  if (choice == "synthetic") return std::make_unique<SyntheticOracle>();
  constexpr std::string_view kExec = "exec:";
  if (choice.substr(0, kExec.size()) == kExec && choice.size() > kExec.size()) {
    return std::make_unique<ExternalOracle>(std::string(choice.substr(kExec.size())),
                                            timeout);
  }
  throw Error(ErrorCode::kUsage,
              "--oracle must be 'synthetic' or 'exec:<command>'");
}

}  // namespace ftalloc
