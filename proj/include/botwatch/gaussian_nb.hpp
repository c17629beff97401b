#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "botwatch/errors.hpp"
#include "botwatch/features.hpp"
#include "botwatch/preprocess.hpp"

namespace botwatch {

/// Gaussian Naive Bayes over two classes, indexed by Label value.
struct GnbModel {
  std::array<double, 2> priors{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> var;  // smoothed
  double var_smoothing = 1e-3;

  bool operator==(const GnbModel&) const = default;

  std::size_t dims() const { return mean[0].size(); }
};

struct Prediction {
  Label label = Label::BENIGN;
  /// GNB: posterior of the predicted class. Forest: fraction of trees voting MALICIOUS.
  double confidence = 0.0;
};

/// Per-class Gaussians; every variance is inflated by
/// var_smoothing * (largest per-feature variance of the whole training set).
inline GnbModel gnb_fit(const Dataset& train, double var_smoothing = 1e-3) {
  const auto n = train.size();
  const auto d = train.X.cols();
  std::array<std::size_t, 2> count{};
  for (auto l : train.y) ++count[static_cast<int>(l)];
  if (count[0] == 0 || count[1] == 0) throw DataError("GNB needs samples of both classes");

  auto column_stats = [&](auto&& include, std::size_t m, std::vector<double>& mu, std::vector<double>& var) {
    mu.assign(d, 0.0);
    var.assign(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      if (!include(r)) continue;
      for (std::size_t j = 0; j < d; ++j) mu[j] += train.X(r, j);
    }
    for (auto& v : mu) v /= static_cast<double>(m);
    for (std::size_t r = 0; r < n; ++r) {
      if (!include(r)) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const double dev = train.X(r, j) - mu[j];
        var[j] += dev * dev;
      }
    }
    for (auto& v : var) v /= static_cast<double>(m);
  };

  std::vector<double> all_mu;
  std::vector<double> all_var;
  column_stats([](std::size_t) { return true; }, n, all_mu, all_var);
  const double epsilon = var_smoothing * *std::max_element(all_var.begin(), all_var.end());

  GnbModel m;
  m.var_smoothing = var_smoothing;
  for (int c = 0; c < 2; ++c) {
    column_stats([&](std::size_t r) { return static_cast<int>(train.y[r]) == c; }, count[c], m.mean[c], m.var[c]);
    for (auto& v : m.var[c]) v += epsilon;
    m.priors[c] = static_cast<double>(count[c]) / static_cast<double>(n);
  }
  for (int c = 0; c < 2; ++c) {
    for (double v : m.var[c]) {
      if (!(v > 0)) throw DataError("GNB variance collapsed to zero (all features constant)");
    }
  }
  return m;
}

/// Log prior + Gaussian log likelihood per class.
inline std::array<double, 2> gnb_joint_log_likelihood(const GnbModel& m, std::span<const double> x) {
  if (x.size() != m.dims()) throw DataError("GNB expects " + std::to_string(m.dims()) + " features");
  std::array<double, 2> jll{};
  for (int c = 0; c < 2; ++c) {
    double s = std::log(m.priors[c]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double v = m.var[c][j];
      const double dev = x[j] - m.mean[c][j];
      s -= 0.5 * std::log(2.0 * std::numbers::pi * v) + dev * dev / (2.0 * v);
    }
    jll[c] = s;
  }
  return jll;
}

/// Posterior probabilities {P(BENIGN|x), P(MALICIOUS|x)}.
inline std::array<double, 2> gnb_posterior(const GnbModel& m, std::span<const double> x) {
  const auto jll = gnb_joint_log_likelihood(m, x);
  const double top = std::max(jll[0], jll[1]);
  const double a = std::exp(jll[0] - top);
  const double b = std::exp(jll[1] - top);
  return {a / (a + b), b / (a + b)};
}

/// Ties resolve to BENIGN.
inline Prediction gnb_predict(const GnbModel& m, std::span<const double> x) {
  const auto jll = gnb_joint_log_likelihood(m, x);
  const auto post = gnb_posterior(m, x);
  if (jll[1] > jll[0]) return {Label::MALICIOUS, post[1]};
  return {Label::BENIGN, post[0]};
}

}  // namespace botwatch
