#pragma once

#include <cstddef>
#include <span>

#include "botwatch/errors.hpp"
#include "botwatch/features.hpp"

namespace botwatch {

/// Binary confusion counts with MALICIOUS as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  void add(Label truth, Label predicted) {
    const bool t = truth == Label::MALICIOUS;
    const bool p = predicted == Label::MALICIOUS;
    if (t && p) ++tp;
    else if (!t && p) ++fp;
    else if (!t && !p) ++tn;
    else ++fn;
  }

  std::size_t total() const { return tp + fp + tn + fn; }

  // Undefined ratios (zero denominator) report 0.
  double accuracy() const { return total() ? static_cast<double>(tp + tn) / static_cast<double>(total()) : 0.0; }
  double precision() const { return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0; }
  double recall() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
  double f1() const {
    const double p = precision();
    const double r = recall();
    return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
  }
};

inline Confusion confusion(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw DataError("label vectors differ in length");
  if (truth.empty()) throw DataError("no samples to score");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) c.add(truth[i], predicted[i]);
  return c;
}

/// Stage-2 detection rate over malicious traces; MDR = 1 - DR.
struct DetectionRate {
  std::size_t detected = 0;
  std::size_t total = 0;

  double dr() const { return total ? static_cast<double>(detected) / static_cast<double>(total) : 0.0; }
  double mdr() const { return total ? 1.0 - dr() : 0.0; }
};

}  // namespace botwatch
