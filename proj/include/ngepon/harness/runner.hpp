#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <system_error>

#include "ngepon/harness/config.hpp"
#include "ngepon/harness/simulation.hpp"
#include "ngepon/metrics/csv.hpp"

namespace ngepon::harness {

inline constexpr const char* kOutputRootEnv = "NGEPON_OUTPUT_ROOT";
inline constexpr const char* kResolvedConfigFile = "scenario.json";
inline constexpr const char* kTimeseriesFile = "latency_timeseries.csv";
inline constexpr const char* kAgentLogFile = "agent_log.csv";
inline constexpr const char* kQTableFile = "qtable.csv";
inline constexpr const char* kSummaryFile = "summary.csv";

/// Where a run writes when its config names no directory:
/// $NGEPON_OUTPUT_ROOT (or ./runs) / <name>-seed<seed>.
inline std::filesystem::path default_output_dir(const ScenarioConfig& cfg) {
  const char* root = std::getenv(kOutputRootEnv);
  std::filesystem::path base = (root && *root) ? root : "runs";
  return base / (cfg.name + "-seed" + std::to_string(cfg.seed));
}

struct ScenarioOutcome {
  std::filesystem::path output_dir;
  RunResult result;
  SimTime managed_mean_latency{};
  SimTime target_latency{};
};

inline void write_outputs(const std::filesystem::path& dir, const ScenarioConfig& cfg, const RunResult& r) {
  auto resolved = cfg;
  resolved.output_dir = dir.string();
  metrics::write_file(dir / kResolvedConfigFile, [&](std::ostream& out) { out << to_json(resolved).dump(2) << '\n'; });
  metrics::write_file(dir / kTimeseriesFile, [&](std::ostream& out) { metrics::write_timeseries(out, r.windows); });
  metrics::write_file(dir / kAgentLogFile, [&](std::ostream& out) { metrics::write_agent_log(out, r.agent_log); });
  metrics::write_file(dir / kQTableFile, [&](std::ostream& out) { metrics::write_qtable(out, r.qtable); });
  metrics::write_file(dir / kSummaryFile, [&](std::ostream& out) { metrics::write_summary(out, r.summary.onus); });
}

/// Validates, simulates, and writes the four CSVs plus the resolved config.
/// A directory created here is removed again if anything fails.
inline ScenarioOutcome run_scenario(ScenarioConfig cfg, RunOptions options = {}) {
  validate(cfg);
  const std::filesystem::path dir = cfg.output_dir.empty() ? default_output_dir(cfg) : std::filesystem::path(cfg.output_dir);
  const bool existed = std::filesystem::exists(dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw metrics::CsvError("cannot create output directory " + dir.string() + ": " + ec.message());
  try {
    ScenarioOutcome out;
    out.output_dir = dir;
    Simulation sim(cfg, std::move(options));
    out.result = sim.run();
    write_outputs(dir, cfg, out.result);
    out.managed_mean_latency = out.result.summary.onus.at(static_cast<std::size_t>(cfg.managed_onu)).mean_latency;
    out.target_latency = cfg.agent.target_latency;
    return out;
  } catch (...) {
    if (!existed) std::filesystem::remove_all(dir, ec);
    throw;
  }
}

}  // namespace ngepon::harness
