#include <gtest/gtest.h>

#include <cmath>

#include "botwatch/sessionizer.hpp"
#include "botwatch/synth.hpp"

using namespace botwatch;

namespace {

PacketRecord pkt(double ts, const char* src, const char* dst, Proto proto = Proto::TCP) {
  PacketRecord p;
  p.ts = ts;
  p.src_ip = *Ipv4::parse(src);
  p.dst_ip = *Ipv4::parse(dst);
  p.proto = proto;
  p.tcp_flags = proto == Proto::TCP ? tcp::ACK : 0;
  p.ip_len = 40;
  return p;
}

Trace trace_with_span(double span) {
  Trace t;
  t.duration = span;
  for (double ts = 0; ts < span; ts += 50) t.packets.push_back(pkt(ts, "192.168.1.10", "8.8.8.8"));
  return t;
}

}  // namespace

TEST(Sessionize, ExactDivision) { EXPECT_EQ(sessionize(trace_with_span(900), 300).size(), 3u); }

TEST(Sessionize, TrailingPartialDropped) {
  const auto s = sessionize(trace_with_span(1000), 300);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.back().t_end, 900.0);
  for (const auto& p : s.back().packets) EXPECT_LT(p.ts, 900.0);
}

TEST(Sessionize, HalfOpenBoundary) {
  Trace t;
  t.duration = 600;
  t.packets.push_back(pkt(299.999, "192.168.1.10", "8.8.8.8"));
  t.packets.push_back(pkt(300.0, "192.168.1.10", "8.8.8.8"));
  const auto s = sessionize(t, 300);
  ASSERT_EQ(s.size(), 2u);
  ASSERT_EQ(s[0].packets.size(), 1u);
  ASSERT_EQ(s[1].packets.size(), 1u);
  EXPECT_EQ(s[1].packets[0].ts, 300.0);
  EXPECT_EQ(s[1].index, 1u);
}

TEST(Sessionize, RejectsNonPositiveDuration) {
  EXPECT_THROW(sessionize(trace_with_span(900), 0), ConfigError);
  EXPECT_THROW(sessionize(trace_with_span(900), -5), ConfigError);
}

TEST(Sessionize, PartitionMatchesFloorOracle) {
  SynthConfig cfg;
  cfg.duration_s = 950;
  const auto t = gen_infected_trace(cfg, 3).trace;
  const double d = 200;
  const auto s = sessionize(t, d);
  ASSERT_EQ(s.size(), 4u);
  std::vector<std::size_t> expected(4, 0);
  for (const auto& p : t.packets) {
    const auto i = static_cast<std::size_t>(std::floor(p.ts / d));
    if (i < 4) ++expected[i];
  }
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(s[i].packets.size(), expected[i]);
}

TEST(FilterTcp, KeepsOnlyTcp) {
  TrafficSession s;
  for (int i = 0; i < 3; ++i) s.packets.push_back(pkt(i, "192.168.1.10", "8.8.8.8"));
  for (int i = 0; i < 2; ++i) s.packets.push_back(pkt(i, "192.168.1.10", "8.8.8.8", Proto::UDP));
  EXPECT_EQ(filter_tcp(s).packets.size(), 3u);

  TrafficSession udp;
  udp.packets.push_back(pkt(0, "192.168.1.10", "8.8.8.8", Proto::UDP));
  EXPECT_TRUE(filter_tcp(udp).packets.empty());
}

TEST(FilterTcp, MatchesGeneratorCount) {
  SynthConfig cfg;
  cfg.duration_s = 300;
  const auto t = gen_infected_trace(cfg, 11).trace;
  const auto sessions = sessionize(t, 300);
  ASSERT_EQ(sessions.size(), 1u);
  const auto tcp_count = std::count_if(t.packets.begin(), t.packets.end(), [](auto& p) { return p.is_tcp(); });
  EXPECT_EQ(filter_tcp(sessions[0]).packets.size(), static_cast<std::size_t>(tcp_count));
}

TEST(SplitByDevice, InternalPairsAppearTwice) {
  Trace t;
  t.packets.push_back(pkt(0, "192.168.1.10", "8.8.8.8"));
  t.packets.push_back(pkt(1, "192.168.1.10", "192.168.1.11"));
  t.packets.push_back(pkt(2, "8.8.4.4", "192.168.1.11"));
  t.packets.push_back(pkt(3, "8.8.4.4", "9.9.9.9"));
  const auto m = split_by_device(t);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.at(*Ipv4::parse("192.168.1.10")).packets.size(), 2u);
  EXPECT_EQ(m.at(*Ipv4::parse("192.168.1.11")).packets.size(), 2u);
}

TEST(SplitByDevice, CountsMatchGenerator) {
  SynthConfig cfg;
  cfg.n_iot_devices = 3;
  cfg.n_pc_devices = 2;
  cfg.duration_s = 600;
  const auto t = gen_infected_trace(cfg, 4).trace;
  const auto m = split_by_device(t);
  ASSERT_EQ(m.size(), 5u);
  for (const auto& [ip, dev] : m) {
    const auto want = std::count_if(t.packets.begin(), t.packets.end(),
                                    [&](auto& p) { return p.src_ip == ip || p.dst_ip == ip; });
    EXPECT_EQ(dev.packets.size(), static_cast<std::size_t>(want)) << ip.to_string();
  }
}

TEST(Subsample, Rules) {
  TrafficSession s;
  for (int i = 0; i < 100; ++i) s.packets.push_back(pkt(i, "192.168.1.10", "8.8.8.8"));
  EXPECT_EQ(subsample(s, 1.0).packets, s.packets);

  TrafficSession ten;
  ten.packets.assign(s.packets.begin(), s.packets.begin() + 10);
  const auto half = subsample(ten, 0.5);
  ASSERT_EQ(half.packets.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(half.packets[i].ts, static_cast<double>(2 * i + 1));

  const auto tenth = subsample(s, 0.1);
  ASSERT_EQ(tenth.packets.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(tenth.packets[i].ts, static_cast<double>(10 * i + 9));

  EXPECT_THROW(subsample(s, 0.0), ConfigError);
  EXPECT_THROW(subsample(s, 1.5), ConfigError);
}
