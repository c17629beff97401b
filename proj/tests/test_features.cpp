#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "botwatch/features.hpp"
#include "botwatch/synth.hpp"

using namespace botwatch;

namespace {

PacketRecord tcp_pkt(double ts, const char* src, std::uint16_t sport, const char* dst, std::uint16_t dport,
                     std::uint8_t flags, std::uint32_t len = 40) {
  PacketRecord p;
  p.ts = ts;
  p.src_ip = *Ipv4::parse(src);
  p.dst_ip = *Ipv4::parse(dst);
  p.src_port = sport;
  p.dst_port = dport;
  p.proto = Proto::TCP;
  p.tcp_flags = flags;
  p.ip_len = len;
  return p;
}

}  // namespace

TEST(ExtractFeatures, EmptySessionIsZero) {
  const auto fv = extract_features(TrafficSession{});
  for (double v : fv.values()) EXPECT_EQ(v, 0.0);
}

TEST(ExtractFeatures, HandCountedSynSession) {
  TrafficSession s;
  s.packets.push_back(tcp_pkt(0, "192.168.1.10", 1000, "10.0.0.1", 23, tcp::SYN));
  s.packets.push_back(tcp_pkt(1, "192.168.1.10", 1001, "10.0.0.1", 23, tcp::SYN));
  s.packets.push_back(tcp_pkt(2, "192.168.1.10", 1002, "10.0.0.2", 23, tcp::SYN));
  const auto fv = extract_features(s);
  EXPECT_EQ(fv.n_uniq_syn_dst, 2);
  EXPECT_EQ(fv.pkts_per_dst_max, 2);
  EXPECT_EQ(fv.pkts_per_dst_min, 1);
  EXPECT_EQ(fv.pkts_per_dst_mean, 1.5);
  EXPECT_EQ(fv.tcp_len_max, 40);
  EXPECT_EQ(fv.tcp_len_min, 40);
  EXPECT_EQ(fv.tcp_len_mean, 40);
  EXPECT_EQ(fv.n_half_open, 3);
}

TEST(ExtractFeatures, IgnoresNonTcp) {
  TrafficSession s;
  s.packets.push_back(tcp_pkt(0, "192.168.1.10", 1000, "10.0.0.1", 80, tcp::SYN, 60));
  PacketRecord udp;
  udp.proto = Proto::UDP;
  udp.ip_len = 1400;
  udp.payload_len = 1000;
  udp.src_ip = *Ipv4::parse("192.168.1.10");
  udp.dst_ip = *Ipv4::parse("10.0.0.9");
  s.packets.push_back(udp);
  const auto fv = extract_features(s);
  EXPECT_EQ(fv.tcp_len_max, 60);
  EXPECT_EQ(fv.pkts_per_dst_max, 1);
}

TEST(CountHalfOpen, HandshakeCases) {
  const auto syn = tcp_pkt(0, "192.168.1.10", 40000, "10.0.0.1", 80, tcp::SYN);
  const auto synack = tcp_pkt(0.1, "10.0.0.1", 80, "192.168.1.10", 40000, tcp::SYN | tcp::ACK);
  const auto ack = tcp_pkt(0.2, "192.168.1.10", 40000, "10.0.0.1", 80, tcp::ACK);
  EXPECT_EQ(count_half_open({syn, synack, ack}), 0u);
  EXPECT_EQ(count_half_open({syn}), 1u);
  EXPECT_EQ(count_half_open({syn, synack}), 1u);
  EXPECT_EQ(count_half_open({syn, syn}), 1u);  // retransmission
  // ACK before the SYN does not close it.
  EXPECT_EQ(count_half_open({tcp_pkt(0, "192.168.1.10", 40000, "10.0.0.1", 80, tcp::ACK),
                             tcp_pkt(1, "192.168.1.10", 40000, "10.0.0.1", 80, tcp::SYN)}),
            1u);
}

TEST(ExtractFeatures, ScanningDistinctTargetsMatchGenerator) {
  SynthConfig cfg;
  cfg.duration_s = 900;
  cfg.scan.rate_pps = 2.0;
  const Ipv4 bot = cfg.iot_ip(0);
  const auto scan = gen_scanning(cfg, bot, 99);
  std::set<std::uint32_t> targets;
  for (const auto& p : scan) {
    if (p.src_ip == bot && p.is_syn_only()) targets.insert(p.dst_ip.value);
  }
  ASSERT_GT(targets.size(), 300u);
  TrafficSession s;
  s.packets = scan;
  EXPECT_EQ(extract_features(s).n_uniq_syn_dst, static_cast<double>(targets.size()));
}

TEST(ExtractFeatures, ScanOverlayRaisesScanFeatures) {
  SynthConfig cfg;
  cfg.duration_s = 900;
  cfg.infected.clear();
  const auto benign = gen_benign(cfg, 5);
  auto packets = benign.packets;
  const auto scan = gen_scanning(cfg, cfg.iot_ip(2), 6);
  packets.insert(packets.end(), scan.begin(), scan.end());
  TrafficSession a;
  a.packets = benign.packets;
  TrafficSession b;
  b.packets = packets;
  const auto fa = extract_features(a);
  const auto fb = extract_features(b);
  EXPECT_GT(fb.n_uniq_syn_dst, fa.n_uniq_syn_dst);
  EXPECT_GT(fb.n_half_open, fa.n_half_open);
}

TEST(FeatureCsv, RoundTrip) {
  std::vector<FeatureVector> rows;
  rows.push_back(FeatureVector::from_values({1, 2, 3, 4.25, 5, 6, 7, 0.1}, Label::MALICIOUS));
  rows.push_back(FeatureVector::from_values({0, 0, 0, 0, 0, 0, 0, 1.0 / 3.0}, Label::BENIGN));
  rows.push_back(FeatureVector::from_values({9, 9, 9, 9, 9, 9, 9, 9}));
  std::stringstream ss;
  write_feature_csv(ss, rows);
  const auto back = read_feature_csv(ss);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].values(), rows[i].values());
    EXPECT_EQ(back[i].label, rows[i].label);
  }
}

TEST(FeatureCsv, RejectsMalformedRows) {
  const std::string header = std::string(kFeatureCsvHeader) + "\n";
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_feature_csv(in);
  };
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("a,b\n"), ParseError);
  EXPECT_THROW(parse(header + "1,2,3\n"), ParseError);
  EXPECT_THROW(parse(header + "1,2,3,4,5,6,7,8,EVIL\n"), ParseError);
  EXPECT_THROW(parse(header + "1,2,3,4,5,6,7,-8,BENIGN\n"), ParseError);
  EXPECT_EQ(parse(header).size(), 0u);
}
