#pragma once

// Walker's largest sample test: the largest periodogram ordinate, normalized
// by the sample variance, against the threshold
//   z = -ln(1 - (1 - gamma)^(1/M)),  M = floor((K - 1) / 2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "botwatch/errors.hpp"

namespace botwatch {

struct WalkerParams {
  double gamma = 0.1;  // false-positive probability

  void validate() const {
    if (!(gamma > 0 && gamma < 1)) throw ConfigError("gamma must lie in (0, 1)");
  }
};

enum class WalkerVerdict { NOT_DETECTED, DETECTED };

struct WalkerResult {
  WalkerVerdict verdict = WalkerVerdict::NOT_DETECTED;
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t peak_index = 0;  // Fourier index k of the largest ordinate
  std::string reason;

  bool detected() const { return verdict == WalkerVerdict::DETECTED; }
};

/// Periodogram I(k) = |sum_i (x_i - mean) exp(-2 pi j i k / K)|^2 / K for k = 1..M, index 0 -> k = 1.
template <typename T>
std::vector<double> periodogram(std::span<const T> seq) {
  const auto K = seq.size();
  const auto M = K >= 1 ? (K - 1) / 2 : 0;
  double mean = 0;
  for (auto v : seq) mean += static_cast<double>(v);
  if (K) mean /= static_cast<double>(K);

  std::vector<double> out(M);
  for (std::size_t k = 1; k <= M; ++k) {
    // Phasor recurrence; renormalized each step to stop magnitude drift.
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(K);
    const std::complex<double> step(std::cos(angle), std::sin(angle));
    std::complex<double> phase = step;  // i = 1
    std::complex<double> acc = 0;
    for (std::size_t i = 0; i < K; ++i) {
      acc += (static_cast<double>(seq[i]) - mean) * phase;
      phase *= step;
      phase /= std::abs(phase);
    }
    out[k - 1] = std::norm(acc) / static_cast<double>(K);
  }
  return out;
}

inline double walker_threshold(std::size_t M, double gamma) {
  return -std::log(1.0 - std::pow(1.0 - gamma, 1.0 / static_cast<double>(M)));
}

template <typename T>
WalkerResult walker_test(std::span<const T> seq, double gamma) {
  WalkerParams{gamma}.validate();
  WalkerResult res;
  const auto K = seq.size();
  if (K < 8) throw ConfigError("Walker's test needs at least 8 samples");
  double mean = 0;
  for (auto v : seq) mean += static_cast<double>(v);
  mean /= static_cast<double>(K);
  double ss = 0;
  for (auto v : seq) ss += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
  const double variance = ss / static_cast<double>(K - 1);
  const auto M = (K - 1) / 2;
  res.threshold = walker_threshold(M, gamma);
  if (!(variance > 0)) {
    res.reason = "constant sequence";
    return res;
  }
  const auto I = periodogram(seq);
  const auto top = std::max_element(I.begin(), I.end());
  res.peak_index = static_cast<std::size_t>(top - I.begin()) + 1;
  res.statistic = *top / variance;
  if (res.statistic > res.threshold) res.verdict = WalkerVerdict::DETECTED;
  return res;
}

template <typename T>
WalkerResult walker_test(const std::vector<T>& seq, double gamma) {
  return walker_test(std::span<const T>(seq), gamma);
}

}  // namespace botwatch
