#pragma once

// Per-device detection of periodic bot-to-CnC beaconing.
//
// Candidate CnC packets (UDP, or TCP with PSH+ACK, carrying at most a few
// payload bytes) are binned into a binary sequence e(i) at interval T.
// Periodic beaconing shows up as equally spaced peaks of the unbiased
// autocorrelation
//
//   R(l) = K/(K-l) * sum_{i<K-l} (e_i - mean)(e_{i+l} - mean) / sum_i (e_i - mean)^2

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "botwatch/errors.hpp"
#include "botwatch/sessionizer.hpp"
#include "botwatch/trace.hpp"

namespace botwatch {

struct EncodedSequence {
  std::vector<int> e;  // 0/1
  double T = 0.0;

  std::size_t K() const { return e.size(); }
  bool is_constant() const { return std::adjacent_find(e.begin(), e.end(), std::not_equal_to<>{}) == e.end(); }
};

struct AcfSeries {
  std::vector<double> R;  // lags 0..L

  std::size_t max_lag() const { return R.empty() ? 0 : R.size() - 1; }
};

struct PeriodicityParams {
  double sample_T = 10.0;
  double peak_height_frac = 0.7;
  double gap_variance_thresh = 0.01;
  std::uint32_t payload_cutoff_bytes = 10;
  std::size_t min_peaks = 3;
  double max_lag_frac = 0.75;

  void validate() const {
    if (!(sample_T > 0)) throw ConfigError("sample_T must be positive");
    if (!(peak_height_frac > 0 && peak_height_frac <= 1)) throw ConfigError("peak_height_frac must lie in (0, 1]");
    if (!(gap_variance_thresh > 0)) throw ConfigError("gap variance threshold must be positive");
    if (payload_cutoff_bytes == 0) throw ConfigError("payload cutoff must be positive");
    if (min_peaks < 2) throw ConfigError("min_peaks must be at least 2");
    if (!(max_lag_frac > 0 && max_lag_frac < 1)) throw ConfigError("max_lag_frac must lie in (0, 1)");
  }
};

/// UDP packets and TCP packets with PSH and ACK set, payload <= cutoff; arrival times ascending.
inline std::vector<double> filter_cnc_candidates(std::span<const PacketRecord> packets, std::uint32_t payload_cutoff) {
  std::vector<double> ts;
  for (const auto& p : packets) {
    const bool shape = p.proto == Proto::UDP || (p.is_tcp() && p.has(tcp::PSH | tcp::ACK));
    if (shape && p.payload_len <= payload_cutoff) ts.push_back(p.ts);
  }
  std::sort(ts.begin(), ts.end());
  return ts;
}

inline std::vector<double> filter_cnc_candidates(const DeviceTrace& dev, std::uint32_t payload_cutoff) {
  return filter_cnc_candidates(std::span<const PacketRecord>(dev.packets), payload_cutoff);
}

/// e[i] = 1 iff some arrival falls in [i*T, (i+1)*T); K = floor(duration / T).
/// Arrivals are relative to the start of the capture.
inline EncodedSequence encode(std::span<const double> arrivals, double T, double duration) {
  if (!(T > 0)) throw ConfigError("sampling interval must be positive");
  if (!(duration >= T)) throw ConfigError("capture duration shorter than one sampling interval");
  const auto K = static_cast<std::size_t>(std::floor(duration / T + 1e-9));
  EncodedSequence seq{std::vector<int>(K, 0), T};
  for (double t : arrivals) {
    if (!(t >= 0)) continue;
    const auto i = static_cast<std::size_t>(std::floor(t / T));
    if (i < K) seq.e[i] = 1;
  }
  return seq;
}

/// Unbiased autocorrelation at lags 0..max_lag. Throws DegenerateSignalError on a constant sequence.
template <typename T>
AcfSeries acf(std::span<const T> e, std::size_t max_lag) {
  const auto K = e.size();
  if (max_lag >= K) throw ConfigError("max lag must be smaller than the sequence length");
  double mean = 0;
  for (auto v : e) mean += static_cast<double>(v);
  mean /= static_cast<double>(K);
  std::vector<double> centered(K);
  double denom = 0;
  for (std::size_t i = 0; i < K; ++i) {
    centered[i] = static_cast<double>(e[i]) - mean;
    denom += centered[i] * centered[i];
  }
  if (!(denom > 0)) throw DegenerateSignalError("autocorrelation of a constant sequence");

  AcfSeries out;
  out.R.resize(max_lag + 1);
  for (std::size_t l = 0; l <= max_lag; ++l) {
    double num = 0;
    for (std::size_t i = 0; i + l < K; ++i) num += centered[i] * centered[i + l];
    out.R[l] = static_cast<double>(K) / static_cast<double>(K - l) * num / denom;
  }
  return out;
}

inline AcfSeries acf(const EncodedSequence& seq, std::size_t max_lag) {
  return acf(std::span<const int>(seq.e), max_lag);
}

/// Strict local maxima at lags >= 1 (the last lag compares against its left
/// neighbour only) whose height reaches height_frac * tallest such maximum.
inline std::vector<std::size_t> find_peaks(const AcfSeries& series, double height_frac) {
  const auto& R = series.R;
  std::vector<std::size_t> candidates;
  if (R.size() < 3) return candidates;
  const auto L = R.size() - 1;
  for (std::size_t l = 1; l <= L; ++l) {
    const bool left = R[l] > R[l - 1];
    const bool right = l == L || R[l] > R[l + 1];
    if (left && right) candidates.push_back(l);
  }
  if (candidates.empty()) return candidates;
  double top = R[candidates.front()];
  for (auto l : candidates) top = std::max(top, R[l]);
  const double height = height_frac * top;
  std::vector<std::size_t> peaks;
  for (auto l : candidates) {
    if (R[l] >= height) peaks.push_back(l);
  }
  return peaks;
}

/// Population variance of the gaps between consecutive peak lags.
inline double peak_gap_variance(std::span<const std::size_t> peaks) {
  if (peaks.size() < 2) return 0.0;
  std::vector<double> gaps;
  for (std::size_t i = 1; i < peaks.size(); ++i) gaps.push_back(static_cast<double>(peaks[i] - peaks[i - 1]));
  double mean = 0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  double var = 0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  return var / static_cast<double>(gaps.size());
}

enum class PeriodVerdict { PERIOD_NOT_DETECTED, PERIOD_DETECTED };

inline std::string_view verdict_name(PeriodVerdict v) {
  return v == PeriodVerdict::PERIOD_DETECTED ? "PERIOD_DETECTED" : "PERIOD_NOT_DETECTED";
}

struct PeriodicityResult {
  PeriodVerdict verdict = PeriodVerdict::PERIOD_NOT_DETECTED;
  std::size_t n_candidates = 0;  // packets surviving the CnC filter
  std::size_t K = 0;
  std::vector<std::size_t> peaks;
  std::optional<double> gap_variance;
  std::string reason;  // empty when the full pipeline ran

  bool detected() const { return verdict == PeriodVerdict::PERIOD_DETECTED; }
};

/// Decision on an already encoded sequence.
inline PeriodicityResult detect_periodicity(const EncodedSequence& seq, const PeriodicityParams& params) {
  params.validate();
  PeriodicityResult res;
  res.K = seq.K();
  if (seq.is_constant()) {
    res.reason = "constant encoded sequence";
    return res;
  }
  const auto max_lag = static_cast<std::size_t>(std::floor(static_cast<double>(seq.K()) * params.max_lag_frac));
  if (max_lag < 2) {
    res.reason = "sequence too short";
    return res;
  }
  res.peaks = find_peaks(acf(seq, max_lag), params.peak_height_frac);
  if (res.peaks.size() < params.min_peaks) {
    res.reason = "fewer than " + std::to_string(params.min_peaks) + " peaks";
    return res;
  }
  res.gap_variance = peak_gap_variance(res.peaks);
  if (*res.gap_variance < params.gap_variance_thresh) res.verdict = PeriodVerdict::PERIOD_DETECTED;
  return res;
}

/// Filter, encode over the device's capture window, then decide.
inline PeriodicityResult detect_periodicity(const DeviceTrace& dev, const PeriodicityParams& params) {
  params.validate();
  auto arrivals = filter_cnc_candidates(dev, params.payload_cutoff_bytes);
  for (auto& t : arrivals) t -= dev.t_start;
  const double duration = dev.t_end - dev.t_start;
  if (duration < params.sample_T) {
    PeriodicityResult res;
    res.n_candidates = arrivals.size();
    res.reason = "capture shorter than one sampling interval";
    return res;
  }
  auto res = detect_periodicity(encode(arrivals, params.sample_T, duration), params);
  res.n_candidates = arrivals.size();
  if (arrivals.empty()) res.reason = "no candidate CnC packets";
  return res;
}

}  // namespace botwatch
