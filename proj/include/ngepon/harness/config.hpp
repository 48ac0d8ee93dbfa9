#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ngepon/harness/load_profile.hpp"
#include "ngepon/pon/config.hpp"
#include "ngepon/rl/agent.hpp"
#include "ngepon/traffic/source.hpp"

namespace ngepon::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::string name = "custom";
  pon::PonConfig pon{};
  traffic::OnuTrafficConfig traffic{};  // `load` is driven by load_profile
  std::map<int, double> onu_load_scale;  // per-ONU multiplier on the profile load
  bool agent_enabled = true;
  int managed_onu = 2;
  rl::AgentConfig agent{};
  LoadProfile load_profile = FixedLoad{0.7};
  SimTime duration = 60s;
  std::uint64_t seed = 1;
  std::string output_dir;
  SimTime window_len = 100ms;
  SimTime recalibration_interval = 1s;
};

inline double onu_load(const ScenarioConfig& cfg, int onu, double profile_load) {
  const auto it = cfg.onu_load_scale.find(onu);
  return it == cfg.onu_load_scale.end() ? profile_load : profile_load * it->second;
}

/// Checks every module-level invariant; throws ConfigError naming the field.
inline void validate(const ScenarioConfig& cfg) {
  try {
    pon::validate(cfg.pon);
    traffic::validate(cfg.traffic);
    rl::validate(cfg.agent);
    validate(cfg.load_profile);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.duration <= SimTime::zero()) throw ConfigError("duration must be positive");
  if (cfg.managed_onu < 0 || cfg.managed_onu >= cfg.pon.n_onus) throw ConfigError("agent.managed_onu must be < pon.n_onus");
  if (cfg.window_len <= SimTime::zero()) throw ConfigError("metrics.window_ns must be positive");
  if (cfg.recalibration_interval <= SimTime::zero()) throw ConfigError("recalibration_interval_ns must be positive");
  for (const auto& [onu, scale] : cfg.onu_load_scale) {
    if (onu < 0 || onu >= cfg.pon.n_onus) throw ConfigError("traffic.onu_load_scale names an unknown ONU");
    if (!(scale >= 0.0)) throw ConfigError("traffic.onu_load_scale values must be >= 0");
  }
  // Every load the profile can reach must be calibratable.
  const double peak = peak_load(cfg.load_profile);
  double worst = peak;
  for (const auto& [onu, scale] : cfg.onu_load_scale) worst = std::max(worst, peak * scale);
  auto probe = cfg.traffic;
  probe.load = worst;
  try {
    traffic::calibrate_streams(probe);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

inline void read_ns(const json& obj, const char* key, SimTime& out) {
  std::int64_t v = out.count();
  read(obj, key, v);
  out = SimTime{v};
}

}  // namespace detail

inline nlohmann::json to_json(const ScenarioConfig& c) {
  using nlohmann::json;
  json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["duration_ns"] = c.duration.count();
  j["output_dir"] = c.output_dir;
  j["recalibration_interval_ns"] = c.recalibration_interval.count();
  j["metrics"] = {{"window_ns", c.window_len.count()}};
  j["pon"] = {{"n_onus", c.pon.n_onus},
              {"n_wavelengths", c.pon.n_wavelengths},
              {"line_rate_bps", c.pon.line_rate},
              {"guard_ns", c.pon.guard.count()},
              {"rtt_min_ns", c.pon.rtt_min.count()},
              {"rtt_max_ns", c.pon.rtt_max.count()},
              {"default_w_max_bytes", c.pon.default_w_max},
              {"control_overhead_bytes", c.pon.control_overhead},
              {"dba_processing_ns", c.pon.dba_processing.count()},
              {"grant_lead_ns", c.pon.grant_lead.count()}};
  json sizes;
  if (c.traffic.packet_sizes.is_uniform()) {
    sizes = {{"model", "uniform"}, {"min", c.traffic.packet_sizes.uniform_lo()}, {"max", c.traffic.packet_sizes.uniform_hi()}};
  } else {
    json entries = json::array();
    for (const auto& e : c.traffic.packet_sizes.entries()) entries.push_back({e.size, e.weight});
    sizes = {{"model", "discrete"}, {"entries", entries}};
  }
  json scale = json::object();
  for (const auto& [onu, s] : c.onu_load_scale) scale[std::to_string(onu)] = s;
  j["traffic"] = {{"n_substreams", c.traffic.n_substreams},
                  {"shape_on", c.traffic.substream.shape_on},
                  {"shape_off", c.traffic.substream.shape_off},
                  {"min_on_ns", c.traffic.substream.min_on.count()},
                  {"peak_rate_bps", c.traffic.substream.peak_rate},
                  {"max_rate_bps", c.traffic.max_rate},
                  {"packet_sizes", sizes},
                  {"onu_load_scale", scale}};
  if (const auto* f = std::get_if<FixedLoad>(&c.load_profile)) {
    j["load_profile"] = {{"kind", "fixed"}, {"load", f->load}};
  } else {
    json pts = json::array();
    for (const auto& p : std::get<DynamicLoad>(c.load_profile).points) pts.push_back({p.at.count(), p.load});
    j["load_profile"] = {{"kind", "dynamic"}, {"points", pts}};
  }
  j["agent"] = {{"enabled", c.agent_enabled},
                {"managed_onu", c.managed_onu},
                {"target_latency_ns", c.agent.target_latency.count()},
                {"interval_ns", c.agent.interval.count()},
                {"alpha", c.agent.sarsa.alpha},
                {"gamma", c.agent.sarsa.gamma},
                {"epsilon", c.agent.sarsa.epsilon},
                {"epsilon_decay", c.agent.sarsa.epsilon_decay},
                {"epsilon_min", c.agent.sarsa.epsilon_min},
                {"action_set_bytes", c.agent.action_set},
                {"n_state_bins", c.agent.n_state_bins},
                {"reward_statistic", c.agent.reward_statistic == rl::RewardStatistic::kMean ? "mean" : "p99"}};
  return j;
}

/// Fields absent from `j` keep the values already in `base`.
inline ScenarioConfig from_json(const nlohmann::json& j, ScenarioConfig base = {}) {
  using detail::read;
  using detail::read_ns;
  ScenarioConfig c = std::move(base);
  detail::reject_unknown(j, {"name", "seed", "duration_ns", "output_dir", "recalibration_interval_ns", "metrics", "pon",
                             "traffic", "load_profile", "agent", "preset"},
                         "scenario");
  read(j, "name", c.name);
  read(j, "seed", c.seed);
  read_ns(j, "duration_ns", c.duration);
  read(j, "output_dir", c.output_dir);
  read_ns(j, "recalibration_interval_ns", c.recalibration_interval);
  if (j.contains("metrics")) {
    const auto& m = j["metrics"];
    detail::reject_unknown(m, {"window_ns"}, "metrics");
    read_ns(m, "window_ns", c.window_len);
  }
  if (j.contains("pon")) {
    const auto& p = j["pon"];
    detail::reject_unknown(p, {"n_onus", "n_wavelengths", "line_rate_bps", "guard_ns", "rtt_min_ns", "rtt_max_ns",
                               "default_w_max_bytes", "control_overhead_bytes", "dba_processing_ns", "grant_lead_ns"},
                           "pon");
    read(p, "n_onus", c.pon.n_onus);
    read(p, "n_wavelengths", c.pon.n_wavelengths);
    read(p, "line_rate_bps", c.pon.line_rate);
    read_ns(p, "guard_ns", c.pon.guard);
    read_ns(p, "rtt_min_ns", c.pon.rtt_min);
    read_ns(p, "rtt_max_ns", c.pon.rtt_max);
    read(p, "default_w_max_bytes", c.pon.default_w_max);
    read(p, "control_overhead_bytes", c.pon.control_overhead);
    read_ns(p, "dba_processing_ns", c.pon.dba_processing);
    read_ns(p, "grant_lead_ns", c.pon.grant_lead);
  }
  if (j.contains("traffic")) {
    const auto& t = j["traffic"];
    detail::reject_unknown(t, {"n_substreams", "shape_on", "shape_off", "min_on_ns", "peak_rate_bps", "max_rate_bps",
                               "packet_sizes", "onu_load_scale"},
                           "traffic");
    read(t, "n_substreams", c.traffic.n_substreams);
    read(t, "shape_on", c.traffic.substream.shape_on);
    read(t, "shape_off", c.traffic.substream.shape_off);
    read_ns(t, "min_on_ns", c.traffic.substream.min_on);
    read(t, "peak_rate_bps", c.traffic.substream.peak_rate);
    read(t, "max_rate_bps", c.traffic.max_rate);
    if (t.contains("packet_sizes")) {
      const auto& ps = t["packet_sizes"];
      detail::reject_unknown(ps, {"model", "min", "max", "entries"}, "traffic.packet_sizes");
      std::string model = "uniform";
      read(ps, "model", model);
      try {
        if (model == "uniform") {
          Bytes lo = traffic::kMinPacket, hi = traffic::kMaxPacket;
          read(ps, "min", lo);
          read(ps, "max", hi);
          c.traffic.packet_sizes = traffic::PacketSizeModel::uniform(lo, hi);
        } else if (model == "discrete") {
          std::vector<std::pair<Bytes, double>> raw;
          read(ps, "entries", raw);
          std::vector<traffic::PacketSizeModel::Entry> entries;
          for (const auto& [size, weight] : raw) entries.push_back({size, weight});
          c.traffic.packet_sizes = traffic::PacketSizeModel::discrete(std::move(entries));
        } else {
          throw ConfigError("traffic.packet_sizes.model must be 'uniform' or 'discrete'");
        }
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (t.contains("onu_load_scale")) {
      c.onu_load_scale.clear();
      std::map<std::string, double> raw;
      read(t, "onu_load_scale", raw);
      for (const auto& [key, scale] : raw) {
        try {
          c.onu_load_scale[std::stoi(key)] = scale;
        } catch (const std::logic_error&) {
          throw ConfigError("traffic.onu_load_scale keys must be ONU ids");
        }
      }
    }
  }
  if (j.contains("load_profile")) {
    const auto& lp = j["load_profile"];
    detail::reject_unknown(lp, {"kind", "load", "points"}, "load_profile");
    std::string kind;
    read(lp, "kind", kind);
    if (kind == "fixed") {
      FixedLoad f;
      read(lp, "load", f.load);
      c.load_profile = f;
    } else if (kind == "dynamic") {
      std::vector<std::pair<std::int64_t, double>> raw;
      read(lp, "points", raw);
      DynamicLoad d;
      for (const auto& [t, load] : raw) d.points.push_back({SimTime{t}, load});
      c.load_profile = d;
    } else {
      throw ConfigError("load_profile.kind must be 'fixed' or 'dynamic'");
    }
  }
  if (j.contains("agent")) {
    const auto& a = j["agent"];
    detail::reject_unknown(a, {"enabled", "managed_onu", "target_latency_ns", "interval_ns", "alpha", "gamma", "epsilon",
                               "epsilon_decay", "epsilon_min", "action_set_bytes", "n_state_bins", "reward_statistic"},
                           "agent");
    read(a, "enabled", c.agent_enabled);
    read(a, "managed_onu", c.managed_onu);
    read_ns(a, "target_latency_ns", c.agent.target_latency);
    read_ns(a, "interval_ns", c.agent.interval);
    read(a, "alpha", c.agent.sarsa.alpha);
    read(a, "gamma", c.agent.sarsa.gamma);
    read(a, "epsilon", c.agent.sarsa.epsilon);
    read(a, "epsilon_decay", c.agent.sarsa.epsilon_decay);
    read(a, "epsilon_min", c.agent.sarsa.epsilon_min);
    read(a, "action_set_bytes", c.agent.action_set);
    read(a, "n_state_bins", c.agent.n_state_bins);
    std::string stat = c.agent.reward_statistic == rl::RewardStatistic::kMean ? "mean" : "p99";
    read(a, "reward_statistic", stat);
    if (stat == "mean") {
      c.agent.reward_statistic = rl::RewardStatistic::kMean;
    } else if (stat == "p99") {
      c.agent.reward_statistic = rl::RewardStatistic::kP99;
    } else {
      throw ConfigError("agent.reward_statistic must be 'mean' or 'p99'");
    }
  }
  return c;
}

// Named scenarios. The full-scale ones use the 0.8 s agent interval; the
// desk ones keep the topology but tick every 50 ms over 20 s.
inline ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  if (name == "full-fixed") {
    c.load_profile = FixedLoad{1.0};
    c.agent.interval = 800ms;
    c.duration = 600s;
  } else if (name == "full-dynamic") {
    c.duration = 1200s;
    c.agent.interval = 800ms;
    c.load_profile = synthetic_diurnal_profile(c.duration);
  } else if (name == "desk" || name == "desk-fixed") {
    c.load_profile = FixedLoad{0.7};
    c.agent.interval = 50ms;
    c.duration = 20s;
  } else if (name == "desk-ramp") {
    c.agent.interval = 50ms;
    c.duration = 20s;
    c.load_profile = linear_ramp(0.3, 0.95, c.duration);
  } else if (name == "desk-dynamic") {
    c.agent.interval = 50ms;
    c.duration = 20s;
    c.load_profile = synthetic_diurnal_profile(c.duration);
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

inline std::vector<std::string> preset_names() {
  return {"full-fixed", "full-dynamic", "desk-fixed", "desk-ramp", "desk-dynamic"};
}

/// A scenario file may name a preset to start from and override any field.
inline ScenarioConfig parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  ScenarioConfig base;
  if (j.is_object() && j.contains("preset")) {
    std::string name;
    detail::read(j, "preset", name);
    base = preset(name);
  }
  return from_json(j, std::move(base));
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace ngepon::harness
