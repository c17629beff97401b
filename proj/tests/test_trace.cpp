#include <gtest/gtest.h>

#include <algorithm>

#include "botwatch/synth.hpp"
#include "botwatch/trace.hpp"

using namespace botwatch;

namespace {

const char* kHeader = "#trace v1 subnet=192.168.1.0/24 epoch=1600000000\n";

}  // namespace

TEST(Ipv4, ParsesDottedQuad) {
  const auto ip = Ipv4::parse("192.168.1.10");
  ASSERT_TRUE(ip);
  EXPECT_EQ(ip->value, 0xC0A8010Au);
  EXPECT_EQ(ip->to_string(), "192.168.1.10");
  for (const char* bad : {"", "1.2.3", "1.2.3.4.5", "256.1.1.1", "01.2.3.4", "a.b.c.d", "1..2.3", "1.2.3.4 "}) {
    EXPECT_FALSE(Ipv4::parse(bad)) << bad;
  }
}

TEST(Cidr, ContainsAndRejectsHostBits) {
  const auto c = Cidr::parse("10.1.0.0/16");
  EXPECT_TRUE(c.contains(*Ipv4::parse("10.1.255.3")));
  EXPECT_FALSE(c.contains(*Ipv4::parse("10.2.0.1")));
  EXPECT_EQ(c.to_string(), "10.1.0.0/16");
  EXPECT_THROW(Cidr::parse("10.1.0.1/16"), ConfigError);
  EXPECT_THROW(Cidr::parse("10.1.0.0/33"), ConfigError);
  EXPECT_THROW(Cidr::parse("10.1.0.0"), ConfigError);
}

TEST(ParseTrace, EmptyBody) {
  const auto t = parse_trace(std::string(kHeader));
  EXPECT_TRUE(t.packets.empty());
  EXPECT_EQ(t.epoch, 1600000000);
  EXPECT_EQ(t.internal_subnet.to_string(), "192.168.1.0/24");
}

TEST(ParseTrace, SingleSynLine) {
  const auto t = parse_trace(std::string(kHeader) + "0.000 192.168.1.10 8.8.8.8 5555 23 TCP 0x02 40 0\n");
  ASSERT_EQ(t.packets.size(), 1u);
  const auto& p = t.packets[0];
  EXPECT_EQ(p.ts, 0.0);
  EXPECT_TRUE(p.is_syn_only());
  EXPECT_EQ(p.ip_len, 40u);
  EXPECT_EQ(p.payload_len, 0u);
  EXPECT_EQ(p.src_port, 5555);
  EXPECT_EQ(p.dst_port, 23);
  EXPECT_EQ(p.dst_ip.to_string(), "8.8.8.8");
}

TEST(ParseTrace, ResortsAgainstStableSortOracle) {
  std::string body = kHeader;
  body += "5.5 192.168.1.10 8.8.8.8 1 2 TCP 0x10 40 0\n";
  body += "1.25 192.168.1.11 8.8.8.8 3 4 UDP 0x00 60 32\n";
  body += "5.5 192.168.1.12 8.8.8.8 5 6 TCP 0x18 45 5\n";
  body += "3.0 192.168.1.13 8.8.8.8 7 8 TCP 0x02 40 0\n";
  const auto t = parse_trace(body);

  std::vector<std::pair<double, int>> oracle{{5.5, 1}, {1.25, 3}, {5.5, 5}, {3.0, 7}};
  std::stable_sort(oracle.begin(), oracle.end(), [](auto& a, auto& b) { return a.first < b.first; });
  ASSERT_EQ(t.packets.size(), oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    EXPECT_EQ(t.packets[i].ts, oracle[i].first);
    EXPECT_EQ(t.packets[i].src_port, oracle[i].second);
  }
}

TEST(ParseTrace, ErrorsNameTheLine) {
  try {
    parse_trace(std::string(kHeader) + "0.0 192.168.1.10 8.8.8.8 1 2 TCP 0x02 40 0\n0.1 bogus\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_trace(std::string(kHeader) + "0.0 192.168.1.10 8.8.8.8 1 2 ICMP 0x00 40 0\n"), ParseError);
  EXPECT_THROW(parse_trace(std::string(kHeader) + "0.0 192.168.1.10 8.8.8.8 1 2 TCP 0x02 40 41\n"), ParseError);
  EXPECT_THROW(parse_trace(std::string(kHeader) + "-1 192.168.1.10 8.8.8.8 1 2 TCP 0x02 40 0\n"), ParseError);
  EXPECT_THROW(parse_trace(std::string(kHeader) + "0 192.168.1.10 8.8.8.8 1 70000 TCP 0x02 40 0\n"), ParseError);
  EXPECT_THROW(parse_trace(std::string(kHeader) + "0 192.168.1.10 8.8.8.8 1 2 UDP 0x02 40 0\n"), ParseError);
  EXPECT_THROW(parse_trace(std::string("#trace v2 subnet=192.168.1.0/24\n")), ParseError);
  EXPECT_THROW(parse_trace(std::string("")), ParseError);
}

TEST(ParseTrace, InvalidCidrIsConfigError) {
  EXPECT_THROW(parse_trace(std::string("#trace v1 subnet=192.168.1.7/24 epoch=0\n")), ConfigError);
  EXPECT_THROW(parse_trace(std::string("#trace v1 epoch=0\n")), ConfigError);
}

TEST(WriteTrace, EmptyTraceIsHeaderOnly) {
  Trace t;
  t.epoch = 5;
  EXPECT_EQ(write_trace(t), "#trace v1 subnet=192.168.1.0/24 epoch=5\n");
}

TEST(WriteTrace, OtherProtoToken) {
  Trace t;
  PacketRecord p;
  p.ts = 1.5;
  p.src_ip = Ipv4::from_octets(192, 168, 1, 10);
  p.dst_ip = Ipv4::from_octets(1, 1, 1, 1);
  p.proto = Proto::OTHER;
  p.ip_len = 84;
  t.packets.push_back(p);
  const auto text = write_trace(t);
  EXPECT_NE(text.find("1.500 192.168.1.10 1.1.1.1 0 0 OTHER 0x00 84 0\n"), std::string::npos) << text;
  EXPECT_EQ(parse_trace(text), t);
}

TEST(WriteTrace, RoundTripsSyntheticTraces) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SynthConfig cfg;
    cfg.duration_s = 300;
    cfg.infected = {seed % 10};
    const auto t = gen_infected_trace(cfg, seed).trace;
    ASSERT_FALSE(t.packets.empty());
    const auto back = parse_trace(write_trace(t));
    EXPECT_EQ(back, t);
    EXPECT_EQ(write_trace(back), write_trace(t));
  }
}

TEST(WriteTrace, TimestampFormatting) {
  EXPECT_EQ(detail::format_fixed(0.0), "0.000");
  EXPECT_EQ(detail::format_fixed(12.5), "12.500");
  EXPECT_EQ(detail::format_fixed(0.123456), "0.123456");
  EXPECT_EQ(detail::format_fixed(899.999999), "899.999999");
  EXPECT_EQ(detail::format_fixed(1e6), "1000000.000");
}

TEST(ParseTrace, DurationHeader) {
  const auto t = parse_trace(std::string("#trace v1 subnet=10.0.0.0/8 epoch=0 duration=900.000\n"));
  ASSERT_TRUE(t.duration);
  EXPECT_EQ(*t.duration, 900.0);
  EXPECT_EQ(t.span(), 900.0);
  EXPECT_THROW(parse_trace(std::string("#trace v1 subnet=10.0.0.0/8 mystery=1\n")), ParseError);
}
