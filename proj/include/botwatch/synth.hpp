#pragma once

// Seeded synthetic gateway traffic: benign IoT/PC activity, scanning
// overlays, and periodic CnC beacons. All numeric defaults are plumbing
// choices, exposed through SynthConfig.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "botwatch/errors.hpp"
#include "botwatch/features.hpp"
#include "botwatch/ipv4.hpp"
#include "botwatch/rng.hpp"
#include "botwatch/trace.hpp"

namespace botwatch {

struct ScanConfig {
  double rate_pps = 1.0;  // probe packets per second
  int pkts_per_target_min = 1;
  int pkts_per_target_max = 3;
  std::uint32_t pkt_len_min = 40;
  std::uint32_t pkt_len_max = 60;
  std::uint16_t dst_port = 23;
  double rst_reply_prob = 0.05;  // closed-port targets answer with RST
};

struct BeaconConfig {
  double period_s = 60.0;
  double jitter_s = 0.0;
  std::uint32_t payload_bytes = 2;
  Proto protocol = Proto::TCP;
};

struct BenignConfig {
  double app_interval_min_s = 30.0;
  double app_interval_max_s = 120.0;
  std::uint32_t app_payload_min = 100;
  std::uint32_t app_payload_max = 1000;
  double browse_burst_rate = 1.0 / 60.0;  // bursts per second per PC
  int burst_conns_min = 2;
  int burst_conns_max = 6;
  double keepalive_rate = 1.0 / 120.0;  // small PSH/ACK packets per second per PC, memoryless
  double failed_conn_prob = 0.02;        // PC connection attempts that never complete
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n_iot_devices = 10;
  std::size_t n_pc_devices = 5;
  double duration_s = 900.0;
  Cidr subnet{Ipv4::from_octets(192, 168, 1, 0), 24};
  std::int64_t epoch = 1600000000;
  ScanConfig scan;
  BeaconConfig beacon;
  BenignConfig benign;
  /// IoT device indices carrying malware in single-trace generation.
  std::vector<std::size_t> infected = {0};

  void validate() const {
    if (!(duration_s > 0)) throw ConfigError("duration must be positive");
    if (n_iot_devices == 0) throw ConfigError("need at least one IoT device");
    if (n_iot_devices > 90 || n_pc_devices > 150) throw ConfigError("too many devices for the address plan");
    if (subnet.prefix > 24) throw ConfigError("synthetic address plan needs a /24 or larger subnet");
    if (!(scan.rate_pps >= 0)) throw ConfigError("scan rate must be non-negative");
    if (scan.pkts_per_target_min < 1 || scan.pkts_per_target_max < scan.pkts_per_target_min) {
      throw ConfigError("bad packets-per-target range");
    }
    if (scan.pkt_len_min < 40 || scan.pkt_len_max < scan.pkt_len_min) throw ConfigError("bad scan length range");
    if (!(beacon.period_s > 0)) throw ConfigError("beacon period must be positive");
    if (!(beacon.jitter_s >= 0 && beacon.jitter_s < beacon.period_s / 4)) {
      throw ConfigError("beacon jitter must be below a quarter period");
    }
    if (!(benign.app_interval_min_s > 0 && benign.app_interval_max_s >= benign.app_interval_min_s)) {
      throw ConfigError("bad app interval range");
    }
    if (benign.app_payload_min < 11 || benign.app_payload_max < benign.app_payload_min) {
      throw ConfigError("bad app payload range");
    }
    for (auto i : infected) {
      if (i >= n_iot_devices) throw ConfigError("infected device index out of range");
    }
  }

  Ipv4 iot_ip(std::size_t i) const { return Ipv4{subnet.network.value + 10 + static_cast<std::uint32_t>(i)}; }
  Ipv4 pc_ip(std::size_t i) const { return Ipv4{subnet.network.value + 100 + static_cast<std::uint32_t>(i)}; }
};

namespace synth_detail {

inline double quantize(double t) { return std::round(t * 1e6) / 1e6; }

inline bool reserved(std::uint32_t ip) {
  const auto a = ip >> 24;
  const auto b = (ip >> 16) & 0xFF;
  return a == 0 || a == 10 || a == 127 || a >= 224 || (a == 100 && (b & 0xC0) == 64) || (a == 169 && b == 254) ||
         (a == 172 && (b & 0xF0) == 16) || (a == 192 && b == 168) || (a == 198 && (b & 0xFE) == 18);
}

/// Uniform over public unicast space outside the internal subnet.
inline Ipv4 external_ip(Rng& rng, const Cidr& subnet) {
  for (;;) {
    const Ipv4 ip{static_cast<std::uint32_t>(rng.next_u64() >> 32)};
    if (!reserved(ip.value) && !subnet.contains(ip)) return ip;
  }
}

inline std::uint16_t ephemeral_port(Rng& rng) { return static_cast<std::uint16_t>(rng.between(32768, 60999)); }

class Emitter {
 public:
  Emitter(std::vector<PacketRecord>& out, double duration) : out_(out), duration_(duration) {}

  void tcp(double t, Ipv4 src, std::uint16_t sport, Ipv4 dst, std::uint16_t dport, std::uint8_t flags,
           std::uint32_t payload = 0) {
    push({quantize(t), src, dst, sport, dport, Proto::TCP, flags, 52 + payload, payload});
  }

  void tcp_len(double t, Ipv4 src, std::uint16_t sport, Ipv4 dst, std::uint16_t dport, std::uint8_t flags,
               std::uint32_t ip_len) {
    push({quantize(t), src, dst, sport, dport, Proto::TCP, flags, ip_len, 0});
  }

  void udp(double t, Ipv4 src, std::uint16_t sport, Ipv4 dst, std::uint16_t dport, std::uint32_t payload) {
    push({quantize(t), src, dst, sport, dport, Proto::UDP, 0, 28 + payload, payload});
  }

 private:
  void push(const PacketRecord& p) {
    if (p.ts >= 0 && p.ts < duration_) out_.push_back(p);
  }

  std::vector<PacketRecord>& out_;
  double duration_;
};

// Handshake, request, response, teardown. Returns the time after the last packet.
inline double full_connection(Emitter& em, Rng& rng, double t, Ipv4 client, Ipv4 server, std::uint16_t dport,
                              std::uint32_t request, int response_pkts, std::uint32_t response_payload) {
  const auto sport = ephemeral_port(rng);
  const double rtt = rng.uniform(0.01, 0.08);
  using namespace tcp;
  em.tcp_len(t, client, sport, server, dport, SYN, 60);
  t += rtt;
  em.tcp_len(t, server, dport, client, sport, SYN | ACK, 60);
  t += 0.001;
  em.tcp(t, client, sport, server, dport, ACK);
  t += 0.001;
  em.tcp(t, client, sport, server, dport, PSH | ACK, request);
  t += rtt;
  for (int i = 0; i < response_pkts; ++i) {
    em.tcp(t, server, dport, client, sport, (i + 1 == response_pkts ? PSH | ACK : ACK), response_payload);
    t += 0.002;
  }
  em.tcp(t, client, sport, server, dport, ACK);
  t += rng.uniform(0.05, 0.5);
  em.tcp(t, client, sport, server, dport, FIN | ACK);
  t += rtt;
  em.tcp(t, server, dport, client, sport, FIN | ACK);
  t += 0.001;
  em.tcp(t, client, sport, server, dport, ACK);
  return t;
}

inline void dns_lookup(Emitter& em, Rng& rng, double t, Ipv4 client, Ipv4 resolver) {
  const auto sport = ephemeral_port(rng);
  em.udp(t, client, sport, resolver, 53, static_cast<std::uint32_t>(rng.between(28, 60)));
  em.udp(t + rng.uniform(0.005, 0.03), resolver, 53, client, sport, static_cast<std::uint32_t>(rng.between(60, 200)));
}

inline Trace finish(std::vector<PacketRecord> packets, const SynthConfig& cfg) {
  Trace trace;
  trace.internal_subnet = cfg.subnet;
  trace.epoch = cfg.epoch;
  trace.duration = cfg.duration_s;
  trace.packets = std::move(packets);
  trace.sort_by_time();
  return trace;
}

}  // namespace synth_detail

/// Periodic IoT cloud exchanges plus PC browsing bursts and keep-alive noise.
inline std::vector<PacketRecord> gen_benign_packets(const SynthConfig& cfg, std::uint64_t seed) {
  using namespace synth_detail;
  cfg.validate();
  std::vector<PacketRecord> out;
  Emitter em(out, cfg.duration_s);
  const Ipv4 resolver = Ipv4::from_octets(8, 8, 8, 8);
  const auto& b = cfg.benign;

  for (std::size_t d = 0; d < cfg.n_iot_devices; ++d) {
    Rng rng(mix_seed(seed, 1000 + d));
    const Ipv4 dev = cfg.iot_ip(d);
    const Ipv4 cloud = external_ip(rng, cfg.subnet);
    const double interval = rng.uniform(b.app_interval_min_s, b.app_interval_max_s);
    for (double t = rng.uniform(0, interval); t < cfg.duration_s; t += interval) {
      const double start = t + rng.uniform(0, 0.5);
      dns_lookup(em, rng, start, dev, resolver);
      const auto req = static_cast<std::uint32_t>(rng.between(b.app_payload_min, b.app_payload_max));
      const auto resp = static_cast<std::uint32_t>(rng.between(b.app_payload_min, b.app_payload_max));
      full_connection(em, rng, start + 0.05, dev, cloud, 443, req, 1, resp);
    }
  }

  for (std::size_t d = 0; d < cfg.n_pc_devices; ++d) {
    Rng rng(mix_seed(seed, 2000 + d));
    const Ipv4 pc = cfg.pc_ip(d);
    if (b.browse_burst_rate > 0) {
      for (double t = rng.exponential(1.0 / b.browse_burst_rate); t < cfg.duration_s;
           t += rng.exponential(1.0 / b.browse_burst_rate)) {
        const auto conns = rng.between(b.burst_conns_min, b.burst_conns_max);
        for (std::int64_t c = 0; c < conns; ++c) {
          const double start = t + rng.uniform(0, 2.0);
          const Ipv4 server = external_ip(rng, cfg.subnet);
          dns_lookup(em, rng, start, pc, resolver);
          if (rng.bernoulli(b.failed_conn_prob)) {
            const auto sport = ephemeral_port(rng);
            em.tcp_len(start + 0.05, pc, sport, server, 443, tcp::SYN, 60);
            em.tcp_len(start + 1.05, pc, sport, server, 443, tcp::SYN, 60);
            continue;
          }
          full_connection(em, rng, start + 0.05, pc, server, 443, static_cast<std::uint32_t>(rng.between(200, 800)),
                          static_cast<int>(rng.between(1, 5)), 1400);
        }
      }
    }
    if (b.keepalive_rate > 0) {
      const Ipv4 server = external_ip(rng, cfg.subnet);
      const auto sport = ephemeral_port(rng);
      for (double t = rng.exponential(1.0 / b.keepalive_rate); t < cfg.duration_s;
           t += rng.exponential(1.0 / b.keepalive_rate)) {
        em.tcp(t, pc, sport, server, 443, tcp::PSH | tcp::ACK, static_cast<std::uint32_t>(rng.between(1, 5)));
        em.tcp(t + rng.uniform(0.02, 0.1), server, 443, pc, sport, tcp::ACK);
      }
    }
  }
  return out;
}

inline Trace gen_benign(const SynthConfig& cfg, std::uint64_t seed) {
  return synth_detail::finish(gen_benign_packets(cfg, seed), cfg);
}

/// SYN-only probes from `bot` to uniformly random external addresses.
inline std::vector<PacketRecord> gen_scanning(const SynthConfig& cfg, Ipv4 bot, std::uint64_t seed) {
  using namespace synth_detail;
  cfg.validate();
  std::vector<PacketRecord> out;
  const auto& s = cfg.scan;
  if (s.rate_pps <= 0) return out;
  Emitter em(out, cfg.duration_s);
  Rng rng(mix_seed(seed, 3000));
  const double mean_pkts = 0.5 * (s.pkts_per_target_min + s.pkts_per_target_max);
  const double target_rate = s.rate_pps / mean_pkts;
  for (double t = rng.exponential(1.0 / target_rate); t < cfg.duration_s; t += rng.exponential(1.0 / target_rate)) {
    const Ipv4 target = external_ip(rng, cfg.subnet);
    const auto sport = ephemeral_port(rng);
    const auto len = static_cast<std::uint32_t>(rng.between(s.pkt_len_min, s.pkt_len_max));
    const auto n = rng.between(s.pkts_per_target_min, s.pkts_per_target_max);
    double at = t;
    for (std::int64_t k = 0; k < n; ++k) {
      em.tcp_len(at, bot, sport, target, s.dst_port, tcp::SYN, len);
      at += rng.uniform(1.0, 3.0);
    }
    if (rng.bernoulli(s.rst_reply_prob)) {
      em.tcp_len(t + rng.uniform(0.02, 0.2), target, s.dst_port, bot, sport, tcp::RST | tcp::ACK, 40);
    }
  }
  return out;
}

/// Beacons at k*period + U(-jitter, jitter), clamped at 0. TCP beacons are
/// PSH+ACK with an ACK reply; UDP beacons get a same-size reply.
inline std::vector<PacketRecord> gen_cnc_beacon(const BeaconConfig& beacon, double duration_s, std::uint64_t seed,
                                                Ipv4 bot, Ipv4 cnc) {
  using namespace synth_detail;
  if (!(beacon.period_s > 0)) throw ConfigError("beacon period must be positive");
  if (!(beacon.jitter_s >= 0)) throw ConfigError("beacon jitter must be non-negative");
  std::vector<PacketRecord> out;
  Emitter em(out, duration_s);
  Rng rng(mix_seed(seed, 4000));
  const auto sport = ephemeral_port(rng);
  const std::uint16_t cnc_port = beacon.protocol == Proto::UDP ? 5353 : 6667;
  for (std::size_t k = 0;; ++k) {
    const double nominal = static_cast<double>(k) * beacon.period_s;
    if (nominal >= duration_s) break;
    double t = nominal;
    if (beacon.jitter_s > 0) t += rng.uniform(-beacon.jitter_s, beacon.jitter_s);
    t = std::max(0.0, t);
    const double reply = rng.uniform(0.02, 0.1);
    if (beacon.protocol == Proto::UDP) {
      em.udp(t, bot, sport, cnc, cnc_port, beacon.payload_bytes);
      em.udp(t + reply, cnc, cnc_port, bot, sport, beacon.payload_bytes);
    } else {
      em.tcp(t, bot, sport, cnc, cnc_port, tcp::PSH | tcp::ACK, beacon.payload_bytes);
      em.tcp(t + reply, cnc, cnc_port, bot, sport, tcp::ACK);
    }
  }
  return out;
}

// Labeled corpus ------------------------------------------------------------

enum class SessionKind { BENIGN, BEACON_60, BEACON_210, BOTH };

inline std::string_view session_kind_name(SessionKind k) {
  switch (k) {
    case SessionKind::BENIGN: return "benign";
    case SessionKind::BEACON_60: return "scan+beacon60";
    case SessionKind::BEACON_210: return "scan+beacon210";
    case SessionKind::BOTH: return "scan+beacon60+beacon210";
  }
  return "benign";
}

struct SessionPlan {
  std::size_t id = 0;
  SessionKind kind = SessionKind::BENIGN;
  std::uint64_t seed = 0;

  Label label() const { return kind == SessionKind::BENIGN ? Label::BENIGN : Label::MALICIOUS; }
};

struct LabeledTrace {
  SessionPlan plan;
  Trace trace;
  std::vector<Ipv4> infected;  // ground truth, sorted
};

/// n_benign benign sessions followed by malicious ones split 40/40/20 between
/// the 60 s family, the 210 s family, and both.
inline std::vector<SessionPlan> plan_corpus(std::size_t n_benign, std::size_t n_malicious, std::uint64_t seed) {
  std::vector<SessionPlan> plans;
  const std::size_t n60 = n_malicious * 2 / 5;
  const std::size_t n210 = n_malicious * 2 / 5;
  std::size_t id = 0;
  auto add = [&](std::size_t count, SessionKind kind) {
    for (std::size_t i = 0; i < count; ++i, ++id) plans.push_back({id, kind, mix_seed(seed, id)});
  };
  add(n_benign, SessionKind::BENIGN);
  add(n60, SessionKind::BEACON_60);
  add(n210, SessionKind::BEACON_210);
  add(n_malicious - n60 - n210, SessionKind::BOTH);
  return plans;
}

/// One duration_s trace for the plan. Malicious sessions pick their
/// infected IoT devices from the session seed.
inline LabeledTrace gen_session(const SynthConfig& base, const SessionPlan& plan) {
  SynthConfig cfg = base;
  cfg.infected.clear();
  cfg.validate();
  auto packets = gen_benign_packets(cfg, plan.seed);
  LabeledTrace out;
  out.plan = plan;

  if (plan.kind != SessionKind::BENIGN) {
    Rng pick(mix_seed(plan.seed, 5000));
    std::vector<std::size_t> devices(cfg.n_iot_devices);
    for (std::size_t i = 0; i < devices.size(); ++i) devices[i] = i;
    pick.shuffle(devices.begin(), devices.end());

    struct Family {
      double period;
      std::uint16_t port;
    };
    std::vector<Family> families;
    if (plan.kind == SessionKind::BEACON_60 || plan.kind == SessionKind::BOTH) families.push_back({60.0, 23});
    if (plan.kind == SessionKind::BEACON_210 || plan.kind == SessionKind::BOTH) families.push_back({210.0, 80});
    if (families.size() > cfg.n_iot_devices) throw ConfigError("not enough IoT devices for the malware mix");

    for (std::size_t f = 0; f < families.size(); ++f) {
      const Ipv4 bot = cfg.iot_ip(devices[f]);
      SynthConfig fam = cfg;
      fam.scan.dst_port = families[f].port;
      auto scan = gen_scanning(fam, bot, mix_seed(plan.seed, 6000 + f));
      BeaconConfig beacon = cfg.beacon;
      beacon.period_s = families[f].period;
      Rng cnc_rng(mix_seed(plan.seed, 7000 + f));
      const Ipv4 cnc = synth_detail::external_ip(cnc_rng, cfg.subnet);
      auto beacons = gen_cnc_beacon(beacon, cfg.duration_s, mix_seed(plan.seed, 8000 + f), bot, cnc);
      packets.insert(packets.end(), scan.begin(), scan.end());
      packets.insert(packets.end(), beacons.begin(), beacons.end());
      out.infected.push_back(bot);
    }
    std::sort(out.infected.begin(), out.infected.end());
  }
  out.trace = synth_detail::finish(std::move(packets), cfg);
  return out;
}

/// Full labeled corpus; each session is its own duration_s trace.
inline std::vector<LabeledTrace> gen_dataset(const SynthConfig& cfg, std::size_t n_benign, std::size_t n_malicious,
                                             std::uint64_t seed) {
  std::vector<LabeledTrace> out;
  for (const auto& plan : plan_corpus(n_benign, n_malicious, seed)) out.push_back(gen_session(cfg, plan));
  return out;
}

/// Benign traffic with scanning and a beacon from each device in cfg.infected.
inline LabeledTrace gen_infected_trace(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  auto packets = gen_benign_packets(cfg, seed);
  LabeledTrace out;
  out.plan = {0, cfg.infected.empty() ? SessionKind::BENIGN : SessionKind::BEACON_60, seed};
  for (std::size_t n = 0; n < cfg.infected.size(); ++n) {
    const Ipv4 bot = cfg.iot_ip(cfg.infected[n]);
    auto scan = gen_scanning(cfg, bot, mix_seed(seed, 6000 + n));
    Rng cnc_rng(mix_seed(seed, 7000 + n));
    const Ipv4 cnc = synth_detail::external_ip(cnc_rng, cfg.subnet);
    auto beacons = gen_cnc_beacon(cfg.beacon, cfg.duration_s, mix_seed(seed, 8000 + n), bot, cnc);
    packets.insert(packets.end(), scan.begin(), scan.end());
    packets.insert(packets.end(), beacons.begin(), beacons.end());
    out.infected.push_back(bot);
  }
  std::sort(out.infected.begin(), out.infected.end());
  out.trace = synth_detail::finish(std::move(packets), cfg);
  return out;
}

}  // namespace botwatch
