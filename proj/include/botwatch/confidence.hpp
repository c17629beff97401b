#pragma once

// Bot detection confidence score (BDCS).
//
// Each device's chance of showing beacon periodicity is approximated from the
// Ljung-Box statistic of its encoded sequence; the gateway score is the
// product over devices, assuming independent infections.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "botwatch/acf_detector.hpp"
#include "botwatch/errors.hpp"

namespace botwatch {

struct BdcsParams {
  double alpha = 0.05;
  std::size_t h = 20;  // capped at K - 2
  double pvalue_floor = 1e-6;

  void validate() const {
    if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
    if (h < 1) throw ConfigError("number of lags h must be at least 1");
    if (!(pvalue_floor > 0 && pvalue_floor <= 1)) throw ConfigError("p-value floor must lie in (0, 1]");
  }
};

namespace detail {

// Lower regularized gamma P(a, x) by its power series; converges fast for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by modified Lentz continued fraction; for x >= a + 1.
inline double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Q(a, x) = Gamma(a, x) / Gamma(a).
inline double gamma_q(double a, double x) {
  if (!(a > 0) || !(x >= 0)) throw ConfigError("gamma_q domain error");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_fraction(a, x);
}

/// Upper-tail probability of a chi-square variable with df degrees of freedom.
inline double chi2_sf(double x, double df) {
  if (!(df >= 1) || !(x >= 0) || std::isnan(x)) {
    throw ConfigError("chi2_sf domain error (x=" + std::to_string(x) + ", df=" + std::to_string(df) + ")");
  }
  if (std::isinf(x)) return 0.0;
  return gamma_q(df / 2.0, x / 2.0);
}

/// x such that chi2_sf(x, df) = upper; bisection on the monotone survival function.
inline double chi2_isf(double upper, double df) {
  if (!(upper > 0 && upper < 1)) throw ConfigError("chi2 quantile needs a probability in (0, 1)");
  double lo = 0.0;
  double hi = std::max(1.0, df);
  while (chi2_sf(hi, df) > upper) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_sf(mid, df) > upper ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Ljung-Box Q = K(K+2) sum_{k=1..h} rho_k^2 / (K-k), with the biased
/// (denominator K) sample autocorrelation rho_k.
template <typename T>
double ljung_box_q(std::span<const T> seq, std::size_t h) {
  const auto K = seq.size();
  if (h < 1 || h + 2 > K) throw ConfigError("Ljung-Box needs 1 <= h <= K - 2");
  double mean = 0;
  for (auto v : seq) mean += static_cast<double>(v);
  mean /= static_cast<double>(K);
  std::vector<double> c(K);
  double c0 = 0;
  for (std::size_t i = 0; i < K; ++i) {
    c[i] = static_cast<double>(seq[i]) - mean;
    c0 += c[i] * c[i];
  }
  if (!(c0 > 0)) throw DegenerateSignalError("Ljung-Box statistic of a constant sequence");
  double sum = 0;
  for (std::size_t k = 1; k <= h; ++k) {
    double ck = 0;
    for (std::size_t i = 0; i + k < K; ++i) ck += c[i] * c[i + k];
    const double rho = ck / c0;
    sum += rho * rho / static_cast<double>(K - k);
  }
  const double Kd = static_cast<double>(K);
  return Kd * (Kd + 2.0) * sum;
}

struct DetectionProbability {
  double p = 0.0;
  double q = 0.0;
  double p_value = 1.0;
  std::size_t h = 0;
  std::string reason;  // set for degenerate input
};

/// Per-device periodicity-detection probability:
///   1            when the Ljung-Box p-value is below pvalue_floor * alpha,
///   1            when Q exceeds the chi2(1 - alpha, h) quantile,
///   the p-value  otherwise.
/// A constant sequence scores 0.
template <typename T>
DetectionProbability period_detection_prob(std::span<const T> seq, const BdcsParams& params) {
  params.validate();
  DetectionProbability out;
  if (seq.size() < 3) {
    out.reason = "sequence too short";
    return out;
  }
  out.h = std::min(params.h, seq.size() - 2);
  try {
    out.q = ljung_box_q(seq, out.h);
  } catch (const DegenerateSignalError&) {
    out.reason = "constant encoded sequence";
    return out;
  }
  out.p_value = chi2_sf(out.q, static_cast<double>(out.h));
  if (out.p_value < params.pvalue_floor * params.alpha) {
    out.p = 1.0;
  } else if (out.q > chi2_isf(params.alpha, static_cast<double>(out.h))) {
    out.p = 1.0;
  } else {
    out.p = out.p_value;
  }
  return out;
}

inline DetectionProbability period_detection_prob(const EncodedSequence& seq, const BdcsParams& params) {
  return period_detection_prob(std::span<const int>(seq.e), params);
}

/// Product of per-device probabilities; 1 for an empty set.
inline double bdcs(std::span<const double> probs) {
  double score = 1.0;
  for (double p : probs) {
    if (!(p >= 0 && p <= 1)) throw ConfigError("BDCS input probability out of [0, 1]");
    score *= p;
  }
  return score;
}

}  // namespace botwatch
