#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "botwatch/errors.hpp"
#include "botwatch/features.hpp"
#include "botwatch/rng.hpp"

namespace botwatch {

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }
  /// Row-major storage.
  const std::vector<double>& data() const { return data_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) throw DataError("row width mismatch");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Dataset {
  Matrix X;
  std::vector<Label> y;
  std::vector<std::string> feature_names;

  std::size_t size() const { return y.size(); }

  Dataset subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.X = Matrix(0, X.cols());
    for (auto r : rows) {
      out.X.append_row(X.row(r));
      out.y.push_back(y[r]);
    }
    return out;
  }

  static Dataset from_features(const std::vector<FeatureVector>& rows) {
    Dataset ds;
    ds.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
    ds.X = Matrix(0, kNumFeatures);
    for (const auto& r : rows) {
      if (!r.label) throw DataError("feature row without label");
      const auto v = r.values();
      ds.X.append_row(v);
      ds.y.push_back(*r.label);
    }
    return ds;
  }
};

// Min-max scaling ------------------------------------------------------------

struct Scaler {
  std::vector<double> min;
  std::vector<double> max;

  bool operator==(const Scaler&) const = default;

  std::size_t dims() const { return min.size(); }

  double transform_value(std::size_t j, double x) const {
    const double range = max[j] - min[j];
    if (!(range > 0)) return 0.0;
    return std::clamp((x - min[j]) / range, 0.0, 1.0);
  }

  std::vector<double> transform_row(std::span<const double> x) const {
    if (x.size() != dims()) throw DataError("scaler expects " + std::to_string(dims()) + " features");
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = transform_value(j, x[j]);
    return out;
  }
};

inline Scaler scaler_fit(const Matrix& X) {
  if (X.empty()) throw DataError("cannot fit scaler on empty data");
  Scaler s;
  s.min.assign(X.row(0).begin(), X.row(0).end());
  s.max = s.min;
  for (std::size_t r = 1; r < X.rows(); ++r) {
    for (std::size_t j = 0; j < X.cols(); ++j) {
      s.min[j] = std::min(s.min[j], X(r, j));
      s.max[j] = std::max(s.max[j], X(r, j));
    }
  }
  return s;
}

inline Matrix scaler_transform(const Scaler& s, const Matrix& X) {
  if (X.cols() != s.dims()) throw DataError("scaler dimension mismatch");
  Matrix out(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t j = 0; j < X.cols(); ++j) out(r, j) = s.transform_value(j, X(r, j));
  }
  return out;
}

// Shuffle + split ------------------------------------------------------------

inline std::pair<Dataset, Dataset> shuffle_split(const Dataset& ds, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
  if (ds.size() < 2) throw DataError("need at least 2 rows to split");
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(ds.size()) * ratio));
  const std::span<const std::size_t> all(order);
  return {ds.subset(all.first(n_train)), ds.subset(all.subspan(n_train))};
}

// Chi-squared feature scoring ------------------------------------------------

/// Observed-vs-expected class sums per feature; X must be non-negative.
inline std::vector<double> chi2_scores(const Matrix& X, std::span<const Label> y) {
  if (X.rows() != y.size()) throw DataError("X/y row count mismatch");
  const auto n = X.rows();
  const auto d = X.cols();
  std::vector<double> total(d, 0.0);
  std::vector<double> malicious(d, 0.0);
  std::size_t n_mal = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const bool is_mal = y[r] == Label::MALICIOUS;
    n_mal += is_mal;
    for (std::size_t j = 0; j < d; ++j) {
      const double v = X(r, j);
      if (v < 0) throw DataError("chi2 requires non-negative features");
      total[j] += v;
      if (is_mal) malicious[j] += v;
    }
  }
  std::vector<double> scores(d, 0.0);
  if (n == 0) return scores;
  const double p_mal = static_cast<double>(n_mal) / static_cast<double>(n);
  const double p_ben = 1.0 - p_mal;
  for (std::size_t j = 0; j < d; ++j) {
    if (total[j] == 0) continue;
    const double obs[2] = {total[j] - malicious[j], malicious[j]};
    const double exp[2] = {p_ben * total[j], p_mal * total[j]};
    for (int c = 0; c < 2; ++c) {
      if (exp[c] > 0) scores[j] += (obs[c] - exp[c]) * (obs[c] - exp[c]) / exp[c];
    }
  }
  return scores;
}

/// Indices of the k largest scores, best first; ties go to the lower index.
inline std::vector<std::size_t> select_k_best(std::span<const double> scores, std::size_t k) {
  if (k > scores.size()) {
    throw ConfigError("k=" + std::to_string(k) + " exceeds feature count " + std::to_string(scores.size()));
  }
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(k);
  return idx;
}

inline Matrix select_columns(const Matrix& X, std::span<const std::size_t> cols) {
  Matrix out(X.rows(), cols.size());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] >= X.cols()) throw DataError("selected feature index out of range");
      out(r, j) = X(r, cols[j]);
    }
  }
  return out;
}

}  // namespace botwatch
