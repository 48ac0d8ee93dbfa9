#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "ngepon/sim/rng.hpp"
#include "ngepon/traffic/hurst.hpp"
#include "ngepon/traffic/packet_size.hpp"
#include "ngepon/traffic/pareto.hpp"
#include "ngepon/traffic/source.hpp"

using namespace ngepon;
using namespace ngepon::traffic;
using namespace std::chrono_literals;

namespace {

// Bisection on F(x) = 1 - (m/x)^a, solving F(x) = 1 - u. Independent of the
// closed form used by the generator.
double invert_pareto_cdf(double a, double m, double u) {
  double lo = m, hi = m;
  while (1.0 - std::pow(m / hi, a) < 1.0 - u) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 - std::pow(m / mid, a) < 1.0 - u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct RunStats {
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
};

RunStats generate(double load, std::uint64_t seed, SimTime span) {
  OnuTrafficConfig cfg;
  cfg.load = load;
  TrafficSource src(0, cfg, seed);
  RunStats st;
  src.advance_to(span, [&](const Packet& p) {
    ++st.packets;
    st.bytes += p.size;
  });
  return st;
}

double rate_ratio(double load, std::uint64_t seed, SimTime span) {
  const auto st = generate(load, seed, span);
  return static_cast<double>(st.bytes) * 8.0 / to_seconds(span) / (load * 2e9);
}

// Upper 1% point of chi-square with k degrees of freedom (Wilson-Hilferty).
double chi2_critical_99(double k) {
  const double z = 2.326347874;
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

}  // namespace

TEST(Pareto, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(pareto_sample(2.0, 3.0, 0.25), 6.0);
  EXPECT_NEAR(pareto_sample(1.4, 1.0, 1.0 - 1e-15), 1.0, 1e-12);
  EXPECT_NEAR(pareto_sample(1.4, 1.0, 0.5), 1.6407, 5e-5);
}

TEST(Pareto, MatchesNumericalCdfInversion) {
  for (double a : {1.1, 1.4, 1.9, 2.0}) {
    for (double m : {1.0, 3.0, 2e4}) {
      for (double u : {0.01, 0.25, 0.5, 0.9, 0.999}) {
        const double want = invert_pareto_cdf(a, m, u);
        EXPECT_NEAR(pareto_sample(a, m, u), want, 1e-9 * want) << a << ' ' << m << ' ' << u;
      }
    }
  }
}

TEST(Pareto, NeverBelowMinimum) {
  sim::RngStream rng(4, 4);
  for (int i = 0; i < 100000; ++i) ASSERT_GE(pareto_sample(1.4, 5.0, rng.uniform01()), 5.0);
}

TEST(Pareto, RejectsBadArguments) {
  EXPECT_THROW(pareto_sample(1.0, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(pareto_sample(1.4, 0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(pareto_sample(1.4, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(pareto_sample(1.4, 1.0, 1.0), std::invalid_argument);
}

TEST(Pareto, Mean) {
  EXPECT_DOUBLE_EQ(pareto_mean(2.0, 3.0), 6.0);
  sim::RngStream rng(9, 9);
  double sum = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) sum += pareto_sample(2.0, 3.0, rng.uniform01());
  EXPECT_NEAR(sum / n, 6.0, 0.1);
}

TEST(Calibration, HitsAnalyticMeanRate) {
  for (double load : {0.1, 0.25, 0.5, 0.75, 1.0, 2.0}) {
    OnuTrafficConfig cfg;
    cfg.load = load;
    const auto c = calibrate_streams(cfg);
    const double rate = cfg.n_substreams * static_cast<double>(cfg.substream.peak_rate) * c.mean_on_ns /
                        (c.mean_on_ns + c.mean_off_ns);
    EXPECT_NEAR(rate / (load * 2e9), 1.0, 1e-12) << load;
    EXPECT_NEAR(pareto_mean(cfg.substream.shape_off, c.min_off_ns), c.mean_off_ns, 1e-6 * c.mean_off_ns);
  }
}

TEST(Calibration, ZeroLoadIsSilent) {
  OnuTrafficConfig cfg;
  cfg.load = 0.0;
  EXPECT_TRUE(calibrate_streams(cfg).silent);
  const auto st = generate(0.0, 1, 10s);
  EXPECT_EQ(st.packets, 0u);
}

TEST(Calibration, RejectsUnreachableLoad) {
  OnuTrafficConfig cfg;
  cfg.load = 3.0;  // 6 Gb/s against a 5.5 Gb/s aggregate peak
  EXPECT_THROW(calibrate_streams(cfg), std::invalid_argument);
  EXPECT_THROW(TrafficSource(0, cfg, 1), std::invalid_argument);
  cfg.load = 2.75;
  EXPECT_NO_THROW(calibrate_streams(cfg));
  cfg.load = -0.1;
  EXPECT_THROW(TrafficSource(0, cfg, 1), std::invalid_argument);
}

TEST(Calibration, RejectsBadSubstream) {
  OnuTrafficConfig cfg;
  cfg.substream.shape_on = 1.0;
  EXPECT_THROW(TrafficSource(0, cfg, 1), std::invalid_argument);
  cfg = {};
  cfg.substream.min_on = SimTime::zero();
  EXPECT_THROW(TrafficSource(0, cfg, 1), std::invalid_argument);
  cfg = {};
  cfg.n_substreams = 0;
  EXPECT_THROW(TrafficSource(0, cfg, 1), std::invalid_argument);
}

TEST(Source, OfferedRateConvergesOverTenSeconds) {
  for (double load : {0.25, 0.5, 0.75}) {
    EXPECT_NEAR(rate_ratio(load, 1, 10s), 1.0, 0.05) << "load " << load;
  }
}

TEST(Source, RateUnbiasedAcrossSeeds) {
  // Heavy-tailed ON/OFF periods make single 10 s windows wander by several
  // percent; the mean over independent seeds pins the calibration itself.
  for (double load : {0.25, 0.75}) {
    double sum = 0;
    const int seeds = 12;
    for (int s = 1; s <= seeds; ++s) sum += rate_ratio(load, 100 + s, 10s);
    EXPECT_NEAR(sum / seeds, 1.0, 0.025) << "load " << load;
  }
}

TEST(Source, EmissionTimeRoundsUp) {
  EXPECT_EQ(emission_ns(1518, 2'000'000'000), 6072);
  EXPECT_EQ(emission_ns(64, 343'750'000), 1490);  // 1489.45 rounds up
}

TEST(Source, BackToBackSpacingAtPeak) {
  OnuTrafficConfig cfg;
  cfg.n_substreams = 1;
  cfg.max_rate = 2'000'000'000;
  cfg.substream.peak_rate = 2'000'000'000;
  cfg.substream.min_on = 1ms;
  cfg.load = 0.5;
  cfg.packet_sizes = PacketSizeModel::discrete({{1518, 1.0}});
  TrafficSource src(0, cfg, 3);
  std::vector<std::int64_t> t;
  src.advance_to(200ms, [&](const Packet& p) { t.push_back(p.arrive_at.count()); });
  ASSERT_GT(t.size(), 1000u);
  std::map<std::int64_t, int> gaps;
  for (std::size_t i = 1; i < t.size(); ++i) {
    ASSERT_GE(t[i] - t[i - 1], 6072);
    ++gaps[t[i] - t[i - 1]];
  }
  EXPECT_GT(gaps[6072], static_cast<int>(t.size() * 9 / 10));
}

TEST(Source, PacketsWellFormedAndOrdered) {
  OnuTrafficConfig cfg;
  cfg.load = 0.9;
  TrafficSource src(5, cfg, 77);
  SimTime last{};
  std::uint32_t seq = 0;
  std::uint64_t n = 0;
  for (int step = 1; step <= 100; ++step) {
    src.advance_to(SimTime{step * 10'000'000}, [&](const Packet& p) {
      ASSERT_GE(p.size, kMinPacket);
      ASSERT_LE(p.size, kMaxPacket);
      ASSERT_GE(p.arrive_at, last);
      ASSERT_LE(p.arrive_at, SimTime{step * 10'000'000});
      ASSERT_EQ(p.seq, seq++);
      ASSERT_EQ(p.onu_id, 5);
      last = p.arrive_at;
      ++n;
    });
  }
  EXPECT_EQ(n, src.packets_generated());
  EXPECT_EQ(src.generated_through(), 1s);
}

TEST(Source, SubstreamArrivalsStrictlyIncreasing) {
  OnuTrafficConfig cfg;
  cfg.n_substreams = 1;
  cfg.substream.peak_rate = 5'500'000'000;
  cfg.load = 1.0;
  TrafficSource src(0, cfg, 5);
  std::int64_t last = -1;
  src.advance_to(2s, [&](const Packet& p) {
    ASSERT_GT(p.arrive_at.count(), last);
    last = p.arrive_at.count();
  });
  EXPECT_GT(last, 0);
}

TEST(Source, IncrementalAdvanceMatchesOneShot) {
  OnuTrafficConfig cfg;
  cfg.load = 0.6;
  TrafficSource a(1, cfg, 8), b(1, cfg, 8);
  std::vector<std::pair<std::int64_t, int>> pa, pb;
  a.advance_to(500ms, [&](const Packet& p) { pa.emplace_back(p.arrive_at.count(), p.size); });
  for (int i = 1; i <= 5000; ++i) {
    b.advance_to(SimTime{i * 100'000}, [&](const Packet& p) { pb.emplace_back(p.arrive_at.count(), p.size); });
  }
  EXPECT_EQ(pa, pb);
}

TEST(Source, RecalibrateToZeroStopsThenResumes) {
  OnuTrafficConfig cfg;
  cfg.load = 0.5;
  TrafficSource src(0, cfg, 21);
  std::uint64_t n = 0;
  auto count = [&](const Packet&) { ++n; };
  src.advance_to(1s, count);
  src.recalibrate(0.0, 1s);
  // Periods already drawn run out; heavy tails can keep one ON for a while.
  src.advance_to(3s, count);
  const auto after_drain = n;
  src.advance_to(6s, count);
  EXPECT_LE(n - after_drain, 2000u);
  src.recalibrate(0.5, 6s);
  const auto before = n;
  src.advance_to(16s, count);
  EXPECT_GT(n - before, 500'000u);
}

TEST(Source, RecalibrationChangesRate) {
  OnuTrafficConfig cfg;
  cfg.load = 0.25;
  TrafficSource src(0, cfg, 13);
  std::uint64_t low = 0, high = 0;
  src.advance_to(10s, [&](const Packet& p) { low += p.size; });
  src.recalibrate(0.75, 10s);
  src.advance_to(12s, [](const Packet&) {});
  src.advance_to(22s, [&](const Packet& p) { high += p.size; });
  EXPECT_GT(static_cast<double>(high) / static_cast<double>(low), 2.0);
}

TEST(Source, SameSeedSameArrivals) {
  OnuTrafficConfig cfg;
  TrafficSource a(3, cfg, 99), b(3, cfg, 99), c(3, cfg, 100), d(4, cfg, 99);
  std::vector<std::int64_t> ta, tb, tc, td;
  a.advance_to(100ms, [&](const Packet& p) { ta.push_back(p.arrive_at.count()); });
  b.advance_to(100ms, [&](const Packet& p) { tb.push_back(p.arrive_at.count()); });
  c.advance_to(100ms, [&](const Packet& p) { tc.push_back(p.arrive_at.count()); });
  d.advance_to(100ms, [&](const Packet& p) { td.push_back(p.arrive_at.count()); });
  EXPECT_EQ(ta, tb);
  EXPECT_NE(ta, tc);
  EXPECT_NE(ta, td);
}

TEST(PacketSize, UniformChiSquare) {
  const auto model = PacketSizeModel::uniform();
  sim::RngStream rng(1, 77);
  const int n = 1'000'000;
  std::vector<int> hist(kMaxPacket - kMinPacket + 1, 0);
  for (int i = 0; i < n; ++i) {
    const auto s = model.sample(rng);
    ASSERT_GE(s, kMinPacket);
    ASSERT_LE(s, kMaxPacket);
    ++hist[static_cast<std::size_t>(s - kMinPacket)];
  }
  const double expected = static_cast<double>(n) / static_cast<double>(hist.size());
  double chi2 = 0;
  for (int c : hist) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, chi2_critical_99(static_cast<double>(hist.size() - 1)));
}

TEST(PacketSize, DiscreteChiSquare) {
  const auto model = PacketSizeModel::discrete({{64, 7.0}, {594, 2.0}, {1518, 3.0}});
  sim::RngStream rng(2, 77);
  const int n = 1'000'000;
  std::map<Bytes, int> hist;
  for (int i = 0; i < n; ++i) ++hist[model.sample(rng)];
  ASSERT_EQ(hist.size(), 3u);
  double chi2 = 0;
  for (const auto& [size, p] : model.pmf()) {
    const double e = p * n;
    chi2 += (hist[size] - e) * (hist[size] - e) / e;
  }
  EXPECT_LT(chi2, 9.21);  // chi-square, 2 dof, 1%
  EXPECT_NEAR(model.mean(), (64 * 7.0 + 594 * 2.0 + 1518 * 3.0) / 12.0, 1e-9);
}

TEST(PacketSize, Moments) {
  const auto m = PacketSizeModel::uniform();
  EXPECT_DOUBLE_EQ(m.mean(), 791.0);
  const auto one = PacketSizeModel::discrete({{1000, 1.0}});
  EXPECT_DOUBLE_EQ(one.second_moment(), 1e6);
}

TEST(PacketSize, RejectsOutOfRange) {
  EXPECT_THROW(PacketSizeModel::uniform(63, 1518), std::invalid_argument);
  EXPECT_THROW(PacketSizeModel::uniform(64, 1519), std::invalid_argument);
  EXPECT_THROW(PacketSizeModel::uniform(900, 800), std::invalid_argument);
  EXPECT_THROW(PacketSizeModel::discrete({}), std::invalid_argument);
  EXPECT_THROW(PacketSizeModel::discrete({{64, 0.0}}), std::invalid_argument);
}

TEST(Hurst, IidNoiseIsShortRange) {
  sim::RngStream rng(6, 6);
  std::vector<double> counts(200'000);
  for (auto& c : counts) c = rng.uniform01();
  const auto levels = log_spaced_levels(1, 1000);
  const auto h = hurst_estimate(counts, levels);
  EXPECT_NEAR(h.hurst, 0.5, 0.05);
  EXPECT_FALSE(h.nonstationary);
}

TEST(Hurst, OnOffAggregateIsSelfSimilar) {
  OnuTrafficConfig cfg;
  cfg.load = 0.5;
  TrafficSource src(0, cfg, 2);
  const std::int64_t bin = 100'000;
  std::vector<double> counts(600'000, 0.0);
  src.advance_to(60s, [&](const Packet& p) {
    const auto i = static_cast<std::size_t>(p.arrive_at.count() / bin);
    if (i < counts.size()) counts[i] += 1.0;
  });
  const auto levels = log_spaced_levels(10, 3000);
  const auto h = hurst_estimate(counts, levels);
  EXPECT_NEAR(h.hurst, (3.0 - 1.4) / 2.0, 0.07);
  EXPECT_FALSE(h.nonstationary);
}

TEST(Hurst, LinearRampIsFlagged) {
  std::vector<double> counts(20'000);
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = static_cast<double>(i);
  const auto levels = log_spaced_levels(1, 200);
  const auto h = hurst_estimate(counts, levels);
  EXPECT_TRUE(h.nonstationary);
}

TEST(Hurst, RejectsDegenerateInput) {
  std::vector<double> flat(20'000, 3.0);
  const auto levels = log_spaced_levels(1, 200);
  EXPECT_THROW(hurst_estimate(flat, levels), std::domain_error);
  std::vector<double> short_series(9'999, 1.0);
  EXPECT_THROW(hurst_estimate(short_series, levels), std::invalid_argument);
  std::vector<double> ok(20'000);
  for (std::size_t i = 0; i < ok.size(); ++i) ok[i] = static_cast<double>(i % 7);
  const auto narrow = log_spaced_levels(1, 50);
  EXPECT_THROW(hurst_estimate(ok, narrow), std::invalid_argument);
  const std::vector<std::size_t> too_coarse{1, 10, 100, 5000};
  EXPECT_THROW(hurst_estimate(ok, too_coarse), std::invalid_argument);
}

TEST(Hurst, LogSpacedLevels) {
  const auto l = log_spaced_levels(10, 1000, 1);
  EXPECT_EQ(l, (std::vector<std::size_t>{10, 100, 1000}));
}
