#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ngepon/harness/compare.hpp"
#include "ngepon/harness/config.hpp"
#include "ngepon/harness/guard_budget.hpp"
#include "ngepon/harness/load_profile.hpp"
#include "ngepon/harness/runner.hpp"
#include "ngepon/harness/simulation.hpp"

using namespace ngepon;
using namespace ngepon::harness;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("ngepon_harness_" + name);
  fs::remove_all(p);
  return p;
}

ScenarioConfig short_baseline() {
  auto c = preset("desk-fixed");
  c.agent_enabled = false;
  c.duration = 1s;
  c.seed = 42;
  return c;
}

double fraction_under_final_quarter(const RunResult& r, int onu, SimTime target) {
  const auto ws = r.windows_for(onu);
  const std::vector<metrics::WindowStats> tail(ws.begin() + static_cast<std::ptrdiff_t>(ws.size() * 3 / 4), ws.end());
  return fraction_under(tail, target);
}

}  // namespace

TEST(GuardBudget, MeasuredComponentsAreSafe) {
  const auto v = guard_budget(GuardBudget{}, 1000);
  EXPECT_EQ(v.total_ns, 125);
  EXPECT_TRUE(v.safe);
}

TEST(GuardBudget, ZerosAndThreshold) {
  EXPECT_EQ(guard_budget(GuardBudget{0, 0, 0, 0, 0}, 1000).total_ns, 0);
  EXPECT_TRUE(guard_budget(GuardBudget{0, 0, 0, 0, 0}, 1000).safe);
  const auto over = guard_budget(GuardBudget{34, 27, 48, 16, 900}, 1000);
  EXPECT_EQ(over.total_ns, 1025);
  EXPECT_FALSE(over.safe);
  EXPECT_TRUE(guard_budget(GuardBudget{34, 27, 48, 16, 875}, 1000).safe);
  EXPECT_THROW(guard_budget(GuardBudget{-1, 0, 0, 0, 0}, 1000), std::invalid_argument);
}

TEST(LoadProfile, Examples) {
  EXPECT_DOUBLE_EQ(load_profile_at(FixedLoad{0.7}, 123s), 0.7);
  const LoadProfile d = DynamicLoad{{{0s, 0.2}, {10s, 0.8}}};
  EXPECT_DOUBLE_EQ(load_profile_at(d, 5s), 0.5);
  EXPECT_DOUBLE_EQ(load_profile_at(d, 20s), 0.8);
  const LoadProfile late = DynamicLoad{{{2s, 0.4}, {4s, 0.6}}};
  EXPECT_DOUBLE_EQ(load_profile_at(late, 1s), 0.4);
  EXPECT_DOUBLE_EQ(peak_load(late), 0.6);
}

TEST(LoadProfile, Continuity) {
  const LoadProfile d = synthetic_diurnal_profile(20s);
  double prev = load_profile_at(d, 0ns);
  for (std::int64_t t = 1'000'000; t <= 20'000'000'000; t += 1'000'000) {
    const double v = load_profile_at(d, SimTime{t});
    ASSERT_LT(std::abs(v - prev), 0.01) << t;
    prev = v;
  }
  EXPECT_DOUBLE_EQ(load_profile_at(d, 20s), 0.50);
  const auto ramp = linear_ramp(0.3, 0.95, 20s);
  EXPECT_DOUBLE_EQ(load_profile_at(ramp, 10s), 0.625);
}

TEST(LoadProfile, Validation) {
  EXPECT_THROW(validate(LoadProfile{DynamicLoad{}}), std::invalid_argument);
  EXPECT_THROW(validate(LoadProfile{DynamicLoad{{{2s, 0.1}, {1s, 0.2}}}}), std::invalid_argument);
  EXPECT_THROW(validate(LoadProfile{DynamicLoad{{{0s, -0.1}}}}), std::invalid_argument);
  EXPECT_THROW(validate(LoadProfile{FixedLoad{-1}}), std::invalid_argument);
}

TEST(Config, BaseDefaults) {
  const ScenarioConfig c;
  EXPECT_EQ(c.pon.n_onus, 32);
  EXPECT_EQ(c.pon.n_wavelengths, 2);
  EXPECT_EQ(c.pon.line_rate, 25'000'000'000);
  EXPECT_EQ(c.pon.guard, 1us);
  EXPECT_EQ(c.pon.rtt_min, 100us);
  EXPECT_EQ(c.pon.rtt_max, 200us);
  EXPECT_EQ(c.pon.default_w_max, 30000);
  EXPECT_EQ(c.agent.interval, 800ms);
  EXPECT_EQ(c.agent.target_latency, 1ms);
  EXPECT_EQ(c.traffic.max_rate, 2'000'000'000);
  EXPECT_EQ(c.managed_onu, 2);
}

TEST(Config, RoundTrip) {
  for (const auto& name : preset_names()) {
    auto c = preset(name);
    c.onu_load_scale[4] = 0.5;
    c.traffic.packet_sizes = traffic::PacketSizeModel::discrete({{64, 0.5}, {594, 0.1}, {1518, 0.4}});
    c.agent.reward_statistic = rl::RewardStatistic::kP99;
    const auto j = to_json(c);
    const auto back = from_json(j);
    EXPECT_EQ(to_json(back), j) << name;
    EXPECT_EQ(back.duration, c.duration);
    EXPECT_EQ(back.agent.action_set, c.agent.action_set);
    EXPECT_EQ(back.onu_load_scale, c.onu_load_scale);
    const auto reparsed = parse_scenario(j.dump());
    EXPECT_EQ(to_json(reparsed), j);
  }
}

TEST(Config, PresetOverride) {
  const auto c = parse_scenario(R"({"preset": "desk-ramp", "seed": 9, "agent": {"enabled": false}})");
  EXPECT_EQ(c.name, "desk-ramp");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_FALSE(c.agent_enabled);
  EXPECT_EQ(c.agent.interval, 50ms);
  EXPECT_DOUBLE_EQ(load_profile_at(c.load_profile, 20s), 0.95);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_scenario("{not json"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"bogus": 1})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"pon": {"guard": 1}})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"preset": "nope"})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"seed": "one"})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"load_profile": {"kind": "sine"}})"), ConfigError);

  auto c = short_baseline();
  c.duration = 0s;
  EXPECT_THROW(validate(c), ConfigError);
  c = short_baseline();
  c.managed_onu = 32;
  EXPECT_THROW(validate(c), ConfigError);
  c = short_baseline();
  c.load_profile = FixedLoad{3.0};  // beyond the 5.5 Gb/s aggregate peak
  EXPECT_THROW(validate(c), ConfigError);
  c = short_baseline();
  c.agent.action_set = {8000, 5000};
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Runner, RepeatRunIsByteIdentical) {
  auto a = short_baseline();
  a.output_dir = scratch("det_a").string();
  auto b = a;
  b.output_dir = scratch("det_b").string();
  run_scenario(a);
  run_scenario(b);
  for (const char* f : {kTimeseriesFile, kAgentLogFile, kQTableFile, kSummaryFile}) {
    const auto x = slurp(fs::path(a.output_dir) / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(fs::path(b.output_dir) / f)) << f;
  }
  fs::remove_all(a.output_dir);
  fs::remove_all(b.output_dir);
}

TEST(Runner, AgentRunIsDeterministic) {
  auto c = short_baseline();
  c.agent_enabled = true;
  Simulation s1(c), s2(c);
  const auto r1 = s1.run();
  const auto r2 = s2.run();
  EXPECT_EQ(r1.trace_hash, r2.trace_hash);
  EXPECT_EQ(r1.events, r2.events);
  ASSERT_EQ(r1.agent_log.size(), r2.agent_log.size());
  EXPECT_EQ(r1.agent_log.size(), 20u);
  for (std::size_t i = 0; i < r1.agent_log.size(); ++i) EXPECT_EQ(r1.agent_log[i].action, r2.agent_log[i].action);
  c.seed = 43;
  EXPECT_NE(Simulation(c).run().trace_hash, r1.trace_hash);
}

TEST(Runner, ResolvedConfigReparses) {
  auto c = short_baseline();
  c.output_dir = scratch("resolved").string();
  const auto out = run_scenario(c);
  const auto back = load_scenario(out.output_dir / kResolvedConfigFile);
  auto expect = c;
  EXPECT_EQ(to_json(back), to_json(expect));
  fs::remove_all(out.output_dir);
}

TEST(Runner, OutputRootFromEnvironment) {
  const auto root = scratch("envroot");
  ::setenv(kOutputRootEnv, root.c_str(), 1);
  auto c = short_baseline();
  c.duration = 200ms;
  c.name = "envcheck";
  const auto out = run_scenario(c);
  ::unsetenv(kOutputRootEnv);
  EXPECT_EQ(out.output_dir, root / "envcheck-seed42");
  EXPECT_TRUE(fs::exists(root / "envcheck-seed42" / kSummaryFile));
  fs::remove_all(root);
}

TEST(Runner, InvalidConfigCreatesNothing) {
  auto c = short_baseline();
  c.duration = 0s;
  c.output_dir = scratch("invalid").string();
  EXPECT_THROW(run_scenario(c), ConfigError);
  EXPECT_FALSE(fs::exists(c.output_dir));
}

TEST(Runner, FailedRunRemovesItsDirectory) {
  auto c = short_baseline();
  c.output_dir = scratch("failing").string();
  RunOptions opts;
  opts.trace = [](const sim::Event& e) {
    if (e.fire_at > 10ms) throw std::runtime_error("injected fault");
  };
  EXPECT_THROW(run_scenario(c, opts), sim::EventDispatchError);
  EXPECT_FALSE(fs::exists(c.output_dir));
}

TEST(Runner, ConservationAndAuditOnShortRun) {
  auto c = short_baseline();
  c.agent_enabled = true;
  RunOptions opts;
  opts.audit = true;
  const auto r = Simulation(c, opts).run();
  ASSERT_TRUE(r.audit.has_value());
  EXPECT_EQ(r.audit->total(), 0u);
  EXPECT_GE(r.packets_generated, r.summary.packets + r.packets_queued_at_end);
  for (auto rtt : r.rtts) {
    EXPECT_GE(rtt, 100us);
    EXPECT_LE(rtt, 200us);
  }
}

TEST(Runner, ThroughputCeiling) {
  auto c = short_baseline();
  c.load_profile = FixedLoad{1.2};
  const auto r = Simulation(c).run();
  std::map<SimTime, Bytes> per_window;
  for (const auto& w : r.windows) per_window[w.window_start] += w.delivered_bytes;
  for (const auto& [start, bytes] : per_window) {
    EXPECT_LT(static_cast<double>(bytes) * 8.0, 2 * 25e9 * 0.1) << start.count();
  }
  // At best 30000 B of payload per 9621 ns burst plus 1 us guard.
  EXPECT_LT(r.summary.utilization, 240000.0 / 10621.0 / 25.0);
  EXPECT_GT(r.summary.utilization, 0.6);
}

TEST(Runner, RampRecalibratesTraffic) {
  auto c = preset("desk-ramp");
  c.agent_enabled = false;
  c.duration = 4s;
  c.load_profile = linear_ramp(0.1, 0.6, 4s);
  const auto r = Simulation(c).run();
  Bytes first = 0, last = 0;
  for (const auto& w : r.windows) {
    if (w.window_start < 1s) first += w.delivered_bytes;
    if (w.window_start >= 3s) last += w.delivered_bytes;
  }
  EXPECT_GT(static_cast<double>(last) / static_cast<double>(first), 2.5);
}

TEST(Runner, AgentBeatsFixedCapUnderSaturation) {
  auto on = preset("desk-fixed");
  on.load_profile = FixedLoad{1.0};
  on.duration = 8s;
  auto off = on;
  off.agent_enabled = false;
  const auto r_on = Simulation(on).run();
  const auto r_off = Simulation(off).run();
  const auto m = static_cast<std::size_t>(on.managed_onu);
  EXPECT_LT(r_on.summary.onus[m].mean_latency, r_off.summary.onus[m].mean_latency);
}

TEST(Compare, RunAgainstItself) {
  auto c = short_baseline();
  c.output_dir = scratch("cmp_self").string();
  run_scenario(c);
  const std::vector<fs::path> dirs{c.output_dir, c.output_dir};
  const auto rows = compare_runs(dirs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].mean_latency, rows[1].mean_latency);
  EXPECT_EQ(rows[0].p99_latency, rows[1].p99_latency);
  EXPECT_EQ(rows[0].max_latency, rows[1].max_latency);
  EXPECT_EQ(rows[0].windows, 10u);
  EXPECT_DOUBLE_EQ(rows[0].fraction_under_target, rows[1].fraction_under_target);
  std::ostringstream out;
  print_comparison(out, rows);
  std::istringstream table(out.str());
  std::string l1, l2, l3;
  std::getline(table, l1);
  std::getline(table, l2);
  std::getline(table, l3);
  EXPECT_EQ(l2, l3);
  fs::remove_all(c.output_dir);
}

TEST(Compare, EmptyListAndMismatchedWindows) {
  EXPECT_THROW(compare_runs(std::vector<fs::path>{}), std::invalid_argument);
  auto a = short_baseline();
  a.duration = 300ms;
  a.output_dir = scratch("cmp_a").string();
  auto b = a;
  b.window_len = 50ms;
  b.output_dir = scratch("cmp_b").string();
  run_scenario(a);
  run_scenario(b);
  EXPECT_THROW(compare_runs(std::vector<fs::path>{a.output_dir, b.output_dir}), std::invalid_argument);
  fs::remove_all(a.output_dir);
  fs::remove_all(b.output_dir);
}

TEST(Compare, AgentSpendsMoreTimeUnderTarget) {
  auto rl = preset("desk-fixed");
  rl.duration = 12s;
  rl.output_dir = scratch("cmp_rl").string();
  auto fixed = rl;
  fixed.agent_enabled = false;
  fixed.output_dir = scratch("cmp_fixed").string();
  const auto o_rl = run_scenario(rl);
  const auto o_fixed = run_scenario(fixed);
  const auto rows = compare_runs(std::vector<fs::path>{rl.output_dir, fixed.output_dir});
  EXPECT_TRUE(rows[0].agent_enabled);
  EXPECT_FALSE(rows[1].agent_enabled);
  EXPECT_GT(rows[0].fraction_under_target, rows[1].fraction_under_target);
  EXPECT_GT(fraction_under_final_quarter(o_rl.result, rl.managed_onu, 1ms),
            fraction_under_final_quarter(o_fixed.result, fixed.managed_onu, 1ms));
  fs::remove_all(rl.output_dir);
  fs::remove_all(fixed.output_dir);
}
