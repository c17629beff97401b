#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "botwatch/errors.hpp"
#include "botwatch/trace.hpp"

namespace botwatch {

/// Fixed-duration window of gateway packets; the unit of stage-1 classification.
struct TrafficSession {
  std::size_t index = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<PacketRecord> packets;  // t_start <= ts < t_end

  double duration() const { return t_end - t_start; }
};

/// All packets in which one internal address is source or destination.
struct DeviceTrace {
  Ipv4 device_ip;
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<PacketRecord> packets;
};

/// Splits the trace into [i*d, (i+1)*d) windows starting at ts = 0.
/// A trailing window shorter than d is dropped.
inline std::vector<TrafficSession> sessionize(const Trace& trace, double duration_s) {
  if (!(duration_s > 0) || !std::isfinite(duration_s)) {
    throw ConfigError("session duration must be positive, got " + std::to_string(duration_s));
  }
  // Tolerate span values that are a multiple of d up to rounding.
  const auto count = static_cast<std::size_t>(std::floor(trace.span() / duration_s + 1e-9));
  std::vector<TrafficSession> sessions(count);
  for (std::size_t i = 0; i < count; ++i) {
    sessions[i].index = i;
    sessions[i].t_start = static_cast<double>(i) * duration_s;
    sessions[i].t_end = static_cast<double>(i + 1) * duration_s;
  }
  for (const auto& p : trace.packets) {
    const auto slot = static_cast<std::size_t>(std::floor(p.ts / duration_s));
    if (slot < count) sessions[slot].packets.push_back(p);
  }
  return sessions;
}

inline TrafficSession filter_tcp(const TrafficSession& session) {
  TrafficSession out{session.index, session.t_start, session.t_end, {}};
  for (const auto& p : session.packets) {
    if (p.is_tcp()) out.packets.push_back(p);
  }
  return out;
}

/// One DeviceTrace per internal address seen; internal-to-internal packets land in both.
inline std::map<Ipv4, DeviceTrace> split_by_device(const std::vector<PacketRecord>& packets, const Cidr& subnet,
                                                  double t_start, double t_end) {
  std::map<Ipv4, DeviceTrace> devices;
  auto add = [&](Ipv4 ip, const PacketRecord& p) {
    auto [it, inserted] = devices.try_emplace(ip);
    if (inserted) {
      it->second.device_ip = ip;
      it->second.t_start = t_start;
      it->second.t_end = t_end;
    }
    it->second.packets.push_back(p);
  };
  for (const auto& p : packets) {
    const bool src_in = subnet.contains(p.src_ip);
    const bool dst_in = subnet.contains(p.dst_ip);
    if (src_in) add(p.src_ip, p);
    if (dst_in && p.dst_ip != p.src_ip) add(p.dst_ip, p);
  }
  return devices;
}

inline std::map<Ipv4, DeviceTrace> split_by_device(const Trace& trace) {
  return split_by_device(trace.packets, trace.internal_subnet, 0.0, trace.span());
}

inline std::map<Ipv4, DeviceTrace> split_by_device(const TrafficSession& session, const Cidr& subnet) {
  return split_by_device(session.packets, subnet, session.t_start, session.t_end);
}

/// Deterministic systematic sampling: keeps the j-th packet (1-based) iff
/// floor(j*rate) > floor((j-1)*rate). Exactly floor(n*rate) packets survive.
inline TrafficSession subsample(const TrafficSession& session, double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw ConfigError("sub-sampling rate must lie in (0, 1], got " + std::to_string(rate));
  }
  TrafficSession out{session.index, session.t_start, session.t_end, {}};
  for (std::size_t j = 1; j <= session.packets.size(); ++j) {
    if (std::floor(static_cast<double>(j) * rate) > std::floor(static_cast<double>(j - 1) * rate)) {
      out.packets.push_back(session.packets[j - 1]);
    }
  }
  return out;
}

}  // namespace botwatch
