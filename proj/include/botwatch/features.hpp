#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "botwatch/errors.hpp"
#include "botwatch/sessionizer.hpp"
#include "botwatch/trace.hpp"

namespace botwatch {

enum class Label : int { BENIGN = 0, MALICIOUS = 1 };

inline std::string_view label_name(Label l) { return l == Label::MALICIOUS ? "MALICIOUS" : "BENIGN"; }

inline constexpr std::size_t kNumFeatures = 8;

inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "n_uniq_syn_dst", "pkts_max", "pkts_min", "pkts_mean", "n_half_open", "len_max", "len_min", "len_mean"};

/// Per-session scanning features, in CSV column order.
struct FeatureVector {
  double n_uniq_syn_dst = 0;
  double pkts_per_dst_max = 0;
  double pkts_per_dst_min = 0;
  double pkts_per_dst_mean = 0;
  double n_half_open = 0;
  double tcp_len_max = 0;
  double tcp_len_min = 0;
  double tcp_len_mean = 0;
  std::optional<Label> label;

  bool operator==(const FeatureVector&) const = default;

  std::array<double, kNumFeatures> values() const {
    return {n_uniq_syn_dst, pkts_per_dst_max, pkts_per_dst_min, pkts_per_dst_mean,
            n_half_open,    tcp_len_max,      tcp_len_min,      tcp_len_mean};
  }

  static FeatureVector from_values(const std::array<double, kNumFeatures>& v, std::optional<Label> label = {}) {
    return FeatureVector{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], label};
  }
};

/// Connections opened by a SYN-only packet that the initiator never followed
/// with an ACK on the same 4-tuple. Retransmitted SYNs count once.
inline std::size_t count_half_open(const std::vector<PacketRecord>& packets) {
  using Key = std::tuple<std::uint32_t, std::uint16_t, std::uint32_t, std::uint16_t>;
  std::map<Key, bool> completed;
  for (const auto& p : packets) {
    if (!p.is_tcp()) continue;
    const Key key{p.src_ip.value, p.src_port, p.dst_ip.value, p.dst_port};
    if (p.is_syn_only()) {
      completed.try_emplace(key, false);
    } else if (p.has(tcp::ACK)) {
      if (auto it = completed.find(key); it != completed.end()) it->second = true;
    }
  }
  return static_cast<std::size_t>(
      std::count_if(completed.begin(), completed.end(), [](const auto& kv) { return !kv.second; }));
}

inline std::size_t count_half_open(const TrafficSession& session) { return count_half_open(session.packets); }

inline FeatureVector extract_features(const TrafficSession& raw) {
  const auto session = filter_tcp(raw);
  FeatureVector fv;
  if (session.packets.empty()) return fv;

  std::set<std::uint32_t> syn_dsts;
  std::map<std::uint32_t, std::size_t> per_dst;
  double len_sum = 0;
  double len_min = session.packets.front().ip_len;
  double len_max = len_min;
  for (const auto& p : session.packets) {
    if (p.is_syn_only()) syn_dsts.insert(p.dst_ip.value);
    ++per_dst[p.dst_ip.value];
    len_sum += p.ip_len;
    len_min = std::min<double>(len_min, p.ip_len);
    len_max = std::max<double>(len_max, p.ip_len);
  }

  std::size_t cmin = per_dst.begin()->second;
  std::size_t cmax = cmin;
  for (const auto& [dst, c] : per_dst) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }

  const auto n = static_cast<double>(session.packets.size());
  fv.n_uniq_syn_dst = static_cast<double>(syn_dsts.size());
  fv.pkts_per_dst_max = static_cast<double>(cmax);
  fv.pkts_per_dst_min = static_cast<double>(cmin);
  fv.pkts_per_dst_mean = n / static_cast<double>(per_dst.size());
  fv.n_half_open = static_cast<double>(count_half_open(session.packets));
  fv.tcp_len_max = len_max;
  fv.tcp_len_min = len_min;
  fv.tcp_len_mean = len_sum / n;
  return fv;
}

// Feature CSV ---------------------------------------------------------------

inline constexpr std::string_view kFeatureCsvHeader =
    "n_uniq_syn_dst,pkts_max,pkts_min,pkts_mean,n_half_open,len_max,len_min,len_mean,label";

inline void write_feature_csv(std::ostream& out, const std::vector<FeatureVector>& rows) {
  out << kFeatureCsvHeader << '\n';
  for (const auto& r : rows) {
    for (double v : r.values()) out << detail::format_double(v) << ',';
    if (r.label) out << label_name(*r.label);
    out << '\n';
  }
}

inline std::vector<FeatureVector> read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("feature CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kFeatureCsvHeader) throw ParseError("feature CSV line 1: unexpected header");

  std::vector<FeatureVector> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      return ParseError("feature CSV line " + std::to_string(line_no) + ": " + why);
    };
    std::array<double, kNumFeatures> v{};
    std::size_t pos = 0;
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      const auto comma = line.find(',', pos);
      if (comma == std::string::npos) throw fail("expected 9 columns");
      if (!detail::parse_number(std::string_view(line).substr(pos, comma - pos), v[i]) || v[i] < 0) {
        throw fail("bad value in column " + std::to_string(i + 1));
      }
      pos = comma + 1;
    }
    const auto tag = std::string_view(line).substr(pos);
    std::optional<Label> label;
    if (tag == "MALICIOUS") {
      label = Label::MALICIOUS;
    } else if (tag == "BENIGN") {
      label = Label::BENIGN;
    } else if (!tag.empty()) {
      throw fail("bad label '" + std::string(tag) + "'");
    }
    rows.push_back(FeatureVector::from_values(v, label));
  }
  return rows;
}

}  // namespace botwatch
