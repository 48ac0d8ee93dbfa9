// Command-line front end: run scenarios, compare runs, check guard budgets.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ngepon/harness/compare.hpp"
#include "ngepon/harness/config.hpp"
#include "ngepon/harness/guard_budget.hpp"
#include "ngepon/harness/runner.hpp"

namespace {

using namespace ngepon;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInvalidConfig = 2,
  kRuntimeFailure = 3,
  kIoFailure = 4,
};

struct ScenarioSource {
  std::string file;
  std::string preset;
};

harness::ScenarioConfig resolve(const ScenarioSource& src) {
  if (!src.file.empty() && !src.preset.empty()) throw harness::ConfigError("give either a scenario file or --preset, not both");
  if (!src.file.empty()) return harness::load_scenario(src.file);
  return harness::preset(src.preset.empty() ? "desk-fixed" : src.preset);
}

int report(const std::exception& e, int code) {
  std::cerr << "ngepon: " << e.what() << '\n';
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    std::cerr << "  caused by: " << inner.what() << '\n';
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NG-EPON upstream simulator with a SARSA latency controller"};
  app.require_subcommand(1);

  ScenarioSource run_src;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::optional<double> target_ms;
  std::string agent_mode;
  std::string out_dir;
  bool audit = false;
  auto* run = app.add_subcommand("run", "simulate a scenario and write its CSV outputs");
  run->add_option("scenario", run_src.file, "scenario JSON file");
  run->add_option("--preset", run_src.preset, "named scenario")->check(CLI::IsMember(harness::preset_names()));
  run->add_option("--seed", seed, "random seed");
  run->add_option("--duration", duration_s, "simulated seconds")->check(CLI::PositiveNumber);
  run->add_option("--agent", agent_mode, "enable the RL agent")->check(CLI::IsMember({"on", "off"}));
  run->add_option("--target-latency", target_ms, "agent latency target in milliseconds")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--audit", audit, "check scheduler invariants over the whole trace");

  std::vector<std::string> compare_dirs;
  auto* compare = app.add_subcommand("compare", "tabulate managed-ONU latency across run directories");
  compare->add_option("runs", compare_dirs, "run output directories")->required();

  harness::GuardBudget budget;
  std::int64_t guard_ns = 1000;
  auto* guard = app.add_subcommand("guard-budget", "sum burst-mode settling times against the guard interval");
  guard->add_option("--laser-off", budget.laser_off_ns, "laser turn-off time, ns")->capture_default_str();
  guard->add_option("--laser-on", budget.laser_on_ns, "laser turn-on time, ns")->capture_default_str();
  guard->add_option("--tia-settle", budget.tia_settle_ns, "burst-mode TIA gain setting time, ns")->capture_default_str();
  guard->add_option("--cdr-lock", budget.cdr_lock_ns, "burst CDR lock time, ns")->capture_default_str();
  guard->add_option("--margin", budget.margin_ns, "extra margin, ns")->capture_default_str();
  guard->add_option("--guard", guard_ns, "configured guard interval, ns")->capture_default_str();

  ScenarioSource validate_src;
  auto* validate = app.add_subcommand("validate", "check a scenario without running it");
  validate->add_option("scenario", validate_src.file, "scenario JSON file");
  validate->add_option("--preset", validate_src.preset, "named scenario")->check(CLI::IsMember(harness::preset_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*run) {
    harness::ScenarioConfig cfg;
    try {
      cfg = resolve(run_src);
      if (seed) cfg.seed = *seed;
      if (duration_s) cfg.duration = seconds_to_time(*duration_s);
      if (!agent_mode.empty()) cfg.agent_enabled = agent_mode == "on";
      if (target_ms) cfg.agent.target_latency = seconds_to_time(*target_ms * 1e-3);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      harness::validate(cfg);
    } catch (const harness::ConfigError& e) {
      return report(e, kInvalidConfig);
    }
    try {
      harness::RunOptions options;
      options.audit = audit;
      const auto outcome = harness::run_scenario(cfg, std::move(options));
      const auto& s = outcome.result.summary;
      std::printf("wrote %s\n", outcome.output_dir.string().c_str());
      std::printf("utilization %.4f  grant utilization %.4f  guard overhead %.4f\n", s.utilization, s.grant_utilization,
                  s.guard_overhead_fraction);
      std::printf("managed ONU %d mean latency %.3f ms vs target %.3f ms (%s)%s\n", cfg.managed_onu,
                  outcome.managed_mean_latency.count() * 1e-6, outcome.target_latency.count() * 1e-6,
                  outcome.managed_mean_latency <= outcome.target_latency ? "met" : "missed",
                  cfg.agent_enabled ? "" : " [agent off]");
      if (outcome.result.audit) {
        std::printf("audit: %llu violations\n", static_cast<unsigned long long>(outcome.result.audit->total()));
        for (const auto& m : outcome.result.audit_messages) std::printf("  %s\n", m.c_str());
        if (outcome.result.audit->total() != 0) return kRuntimeFailure;
      }
    } catch (const metrics::CsvError& e) {
      return report(e, kIoFailure);
    } catch (const std::exception& e) {
      return report(e, kRuntimeFailure);
    }
    return kOk;
  }

  if (*compare) {
    try {
      std::vector<std::filesystem::path> dirs(compare_dirs.begin(), compare_dirs.end());
      const auto rows = harness::compare_runs(dirs);
      harness::print_comparison(std::cout, rows);
    } catch (const harness::ConfigError& e) {
      return report(e, kInvalidConfig);
    } catch (const metrics::CsvError& e) {
      return report(e, kIoFailure);
    } catch (const std::exception& e) {
      return report(e, kRuntimeFailure);
    }
    return kOk;
  }

  if (*guard) {
    try {
      const auto v = harness::guard_budget(budget, guard_ns);
      std::printf("laser off %lld + laser on %lld + TIA %lld + CDR %lld + margin %lld = %lld ns\n",
                  static_cast<long long>(budget.laser_off_ns), static_cast<long long>(budget.laser_on_ns),
                  static_cast<long long>(budget.tia_settle_ns), static_cast<long long>(budget.cdr_lock_ns),
                  static_cast<long long>(budget.margin_ns), static_cast<long long>(v.total_ns));
      std::printf("%s against %lld ns guard\n", v.safe ? "SAFE" : "UNSAFE", static_cast<long long>(v.guard_ns));
    } catch (const std::invalid_argument& e) {
      return report(e, kInvalidConfig);
    }
    return kOk;
  }

  if (*validate) {
    try {
      const auto cfg = resolve(validate_src);
      harness::validate(cfg);
      std::printf("%s: ok\n", cfg.name.c_str());
    } catch (const harness::ConfigError& e) {
      return report(e, kInvalidConfig);
    }
    return kOk;
  }
  return kUsage;
}
