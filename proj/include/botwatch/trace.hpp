#pragma once

// Canonical packet trace: one text line per packet header.
//
//   #trace v1 subnet=<CIDR> epoch=<unix-seconds> [duration=<secs>]
//   <ts> <src_ip> <dst_ip> <src_port> <dst_port> <TCP|UDP|OTHER> 0xNN <ip_len> <payload_len>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "botwatch/errors.hpp"
#include "botwatch/ipv4.hpp"

namespace botwatch {

enum class Proto : std::uint8_t { TCP, UDP, OTHER };

namespace tcp {
inline constexpr std::uint8_t FIN = 0x01;
inline constexpr std::uint8_t SYN = 0x02;
inline constexpr std::uint8_t RST = 0x04;
inline constexpr std::uint8_t PSH = 0x08;
inline constexpr std::uint8_t ACK = 0x10;
inline constexpr std::uint8_t URG = 0x20;
}  // namespace tcp

inline std::string_view proto_name(Proto p) {
  switch (p) {
    case Proto::TCP: return "TCP";
    case Proto::UDP: return "UDP";
    case Proto::OTHER: return "OTHER";
  }
  return "OTHER";
}

struct PacketRecord {
  double ts = 0.0;  // seconds since trace epoch
  Ipv4 src_ip;
  Ipv4 dst_ip;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  Proto proto = Proto::TCP;
  std::uint8_t tcp_flags = 0;
  std::uint32_t ip_len = 0;
  std::uint32_t payload_len = 0;

  bool operator==(const PacketRecord&) const = default;

  bool is_tcp() const { return proto == Proto::TCP; }
  bool has(std::uint8_t flag) const { return (tcp_flags & flag) == flag; }
  /// SYN set and ACK clear: a connection attempt, not a SYN-ACK reply.
  bool is_syn_only() const { return is_tcp() && has(tcp::SYN) && !has(tcp::ACK); }

  /// Empty string when valid, otherwise the violated invariant.
  std::string validate() const {
    if (!(ts >= 0.0) || !std::isfinite(ts)) return "timestamp must be finite and non-negative";
    if (payload_len > ip_len) return "payload_len exceeds ip_len";
    if (proto != Proto::TCP && tcp_flags != 0) return "tcp flags set on non-TCP packet";
    if (proto == Proto::OTHER && (src_port != 0 || dst_port != 0)) return "ports set on OTHER packet";
    if (tcp_flags & 0xC0) return "unknown tcp flag bits";
    return {};
  }
};

struct Trace {
  std::vector<PacketRecord> packets;  // non-decreasing ts
  Cidr internal_subnet{Ipv4::from_octets(192, 168, 1, 0), 24};
  std::int64_t epoch = 0;
  /// Capture span in seconds. When unset the span ends at the last packet.
  std::optional<double> duration;

  bool operator==(const Trace&) const = default;

  double span() const {
    if (duration) return *duration;
    return packets.empty() ? 0.0 : packets.back().ts;
  }

  void sort_by_time() {
    std::stable_sort(packets.begin(), packets.end(),
                     [](const PacketRecord& a, const PacketRecord& b) { return a.ts < b.ts; });
  }
};

namespace detail {

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out, int base = 10) {
  if (s.empty()) return false;
  std::from_chars_result r;
  if constexpr (std::is_floating_point_v<T>) {
    r = std::from_chars(s.data(), s.data() + s.size(), out);
  } else {
    r = std::from_chars(s.data(), s.data() + s.size(), out, base);
  }
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

/// Shortest round-trip fixed notation with at least `min_decimals` digits after the point.
inline std::string format_fixed(double v, int min_decimals = 3) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  std::string s(buf, end);
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    s += '.';
    dot = s.size() - 1;
  }
  const auto decimals = static_cast<int>(s.size() - dot - 1);
  if (decimals < min_decimals) s.append(static_cast<std::size_t>(min_decimals - decimals), '0');
  return s;
}

/// Shortest round-trip representation, any notation.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

inline std::string hex_byte(std::uint8_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  return std::string{'0', 'x', digits[v >> 4], digits[v & 0xF]};
}

}  // namespace detail

inline PacketRecord parse_packet_line(std::string_view line, std::size_t line_no) {
  auto fail = [line_no](const std::string& why) -> ParseError {
    return ParseError("line " + std::to_string(line_no) + ": " + why);
  };
  const auto f = detail::split_spaces(line);
  if (f.size() != 9) throw fail("expected 9 fields, got " + std::to_string(f.size()));

  PacketRecord p;
  if (!detail::parse_number(f[0], p.ts)) throw fail("bad timestamp '" + std::string(f[0]) + "'");
  const auto src = Ipv4::parse(f[1]);
  const auto dst = Ipv4::parse(f[2]);
  if (!src) throw fail("bad source address '" + std::string(f[1]) + "'");
  if (!dst) throw fail("bad destination address '" + std::string(f[2]) + "'");
  p.src_ip = *src;
  p.dst_ip = *dst;
  if (!detail::parse_number(f[3], p.src_port)) throw fail("bad source port '" + std::string(f[3]) + "'");
  if (!detail::parse_number(f[4], p.dst_port)) throw fail("bad destination port '" + std::string(f[4]) + "'");
  if (f[5] == "TCP") {
    p.proto = Proto::TCP;
  } else if (f[5] == "UDP") {
    p.proto = Proto::UDP;
  } else if (f[5] == "OTHER") {
    p.proto = Proto::OTHER;
  } else {
    throw fail("bad protocol '" + std::string(f[5]) + "'");
  }
  const auto flags = f[6];
  if (flags.size() != 4 || flags[0] != '0' || (flags[1] != 'x' && flags[1] != 'X') ||
      !detail::parse_number(flags.substr(2), p.tcp_flags, 16)) {
    throw fail("bad flags '" + std::string(flags) + "'");
  }
  if (!detail::parse_number(f[7], p.ip_len) || p.ip_len > 65535) throw fail("bad ip_len '" + std::string(f[7]) + "'");
  if (!detail::parse_number(f[8], p.payload_len)) throw fail("bad payload_len '" + std::string(f[8]) + "'");
  if (auto why = p.validate(); !why.empty()) throw fail(why);
  return p;
}

inline Trace parse_trace(std::istream& in) {
  Trace trace;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing '#trace v1' header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto head = detail::split_spaces(line);
  if (head.size() < 2 || head[0] != "#trace" || head[1] != "v1") {
    throw ParseError("line 1: expected '#trace v1' header");
  }
  bool have_subnet = false;
  for (std::size_t i = 2; i < head.size(); ++i) {
    const auto kv = head[i];
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw ParseError("line 1: bad header token '" + std::string(kv) + "'");
    const auto key = kv.substr(0, eq);
    const auto value = kv.substr(eq + 1);
    if (key == "subnet") {
      trace.internal_subnet = Cidr::parse(value);
      have_subnet = true;
    } else if (key == "epoch") {
      if (!detail::parse_number(value, trace.epoch)) throw ParseError("line 1: bad epoch '" + std::string(value) + "'");
    } else if (key == "duration") {
      double d = 0;
      if (!detail::parse_number(value, d) || !(d >= 0) || !std::isfinite(d)) {
        throw ParseError("line 1: bad duration '" + std::string(value) + "'");
      }
      trace.duration = d;
    } else {
      throw ParseError("line 1: unknown header key '" + std::string(key) + "'");
    }
  }
  if (!have_subnet) throw ConfigError("line 1: header lacks subnet=<CIDR>");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    trace.packets.push_back(parse_packet_line(line, line_no));
  }
  trace.sort_by_time();
  return trace;
}

inline Trace parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

inline void write_trace(std::ostream& out, const Trace& trace) {
  out << "#trace v1 subnet=" << trace.internal_subnet.to_string() << " epoch=" << trace.epoch;
  if (trace.duration) out << " duration=" << detail::format_fixed(*trace.duration);
  out << '\n';
  for (const auto& p : trace.packets) {
    out << detail::format_fixed(p.ts) << ' ' << p.src_ip.to_string() << ' ' << p.dst_ip.to_string() << ' '
        << p.src_port << ' ' << p.dst_port << ' ' << proto_name(p.proto) << ' ' << detail::hex_byte(p.tcp_flags)
        << ' ' << p.ip_len << ' ' << p.payload_len << '\n';
  }
}

inline std::string write_trace(const Trace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

}  // namespace botwatch
