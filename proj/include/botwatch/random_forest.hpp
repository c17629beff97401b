#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "botwatch/errors.hpp"
#include "botwatch/gaussian_nb.hpp"
#include "botwatch/preprocess.hpp"
#include "botwatch/rng.hpp"

namespace botwatch {

struct ForestParams {
  std::size_t n_trees = 10;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0 -> floor(sqrt(d))
  bool bootstrap = true;

  bool operator==(const ForestParams&) const = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<std::uint32_t, 2> counts{};  // training samples per class reaching the node

  bool operator==(const TreeNode&) const = default;

  bool is_leaf() const { return feature < 0; }
  /// Majority class; ties go to BENIGN.
  Label majority() const { return counts[1] > counts[0] ? Label::MALICIOUS : Label::BENIGN; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  bool operator==(const DecisionTree&) const = default;

  const TreeNode& leaf_for(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i];
  }

  Label predict(std::span<const double> x) const { return leaf_for(x).majority(); }
};

struct ForestModel {
  ForestParams params;
  std::uint64_t seed = 0;
  std::size_t dims = 0;
  std::vector<DecisionTree> trees;

  bool operator==(const ForestModel&) const = default;
};

namespace detail {

inline double gini(std::uint32_t a, std::uint32_t b) {
  const double n = static_cast<double>(a) + b;
  if (n == 0) return 0.0;
  const double pa = a / n;
  const double pb = b / n;
  return 1.0 - pa * pa - pb * pb;
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestParams& params, std::size_t max_features, Rng& rng)
      : data_(data), params_(params), max_features_(max_features), rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> samples) {
    DecisionTree tree;
    struct Pending {
      std::size_t node;
      std::vector<std::size_t> samples;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(samples)});
    while (!stack.empty()) {
      auto job = std::move(stack.back());
      stack.pop_back();
      auto& node = tree.nodes[job.node];
      for (auto s : job.samples) ++node.counts[static_cast<int>(data_.y[s])];
      const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
      if (pure || job.samples.size() < params_.min_samples_split) continue;

      const auto split = best_split(job.samples, node.counts);
      if (!split.found) continue;

      std::vector<std::size_t> left;
      std::vector<std::size_t> right;
      for (auto s : job.samples) {
        (data_.X(s, split.feature) <= split.threshold ? left : right).push_back(s);
      }
      node.feature = static_cast<int>(split.feature);
      node.threshold = split.threshold;
      const auto left_id = tree.nodes.size();
      node.left = static_cast<std::int32_t>(left_id);
      node.right = static_cast<std::int32_t>(left_id + 1);
      // `node` is invalidated by the emplace_backs below.
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      stack.push_back({left_id + 1, std::move(right)});
      stack.push_back({left_id, std::move(left)});
    }
    return tree;
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  // Draws features without replacement and keeps going past max_features
  // until that many non-constant features have been examined.
  Split best_split(std::vector<std::size_t>& samples, const std::array<std::uint32_t, 2>& counts) {
    const auto d = data_.X.cols();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), std::size_t{0});
    Split best;
    std::size_t informative = 0;
    const double n = static_cast<double>(samples.size());

    for (std::size_t drawn = 0; drawn < d && informative < max_features_; ++drawn) {
      const auto pick = drawn + static_cast<std::size_t>(rng_.index(d - drawn));
      std::swap(features[drawn], features[pick]);
      const auto f = features[drawn];

      std::sort(samples.begin(), samples.end(), [&](std::size_t a, std::size_t b) {
        const double va = data_.X(a, f);
        const double vb = data_.X(b, f);
        return va < vb || (va == vb && a < b);
      });
      if (data_.X(samples.front(), f) == data_.X(samples.back(), f)) continue;
      ++informative;

      std::array<std::uint32_t, 2> left{};
      for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        ++left[static_cast<int>(data_.y[samples[i]])];
        const double lo = data_.X(samples[i], f);
        const double hi = data_.X(samples[i + 1], f);
        if (lo == hi) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = samples.size() - n_left;
        if (n_left < params_.min_samples_leaf || n_right < params_.min_samples_leaf) continue;
        const std::array<std::uint32_t, 2> right{counts[0] - left[0], counts[1] - left[1]};
        const double impurity =
            (static_cast<double>(n_left) * gini(left[0], left[1]) + static_cast<double>(n_right) * gini(right[0], right[1])) / n;
        if (!best.found || impurity < best.impurity) {
          double mid = lo + (hi - lo) / 2.0;
          if (mid >= hi) mid = lo;
          best = {true, f, mid, impurity};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const ForestParams& params_;
  std::size_t max_features_;
  Rng& rng_;
};

}  // namespace detail

/// Rows are put in a canonical order (lexicographic by feature tuple, then
/// label) before bootstrapping, so the fitted forest does not depend on the
/// order of the training rows. Tree t draws from Rng(mix_seed(seed, t)).
inline ForestModel forest_fit(const Dataset& train, std::uint64_t seed, const ForestParams& params = {}) {
  const auto n = train.size();
  const auto d = train.X.cols();
  if (n < 2) throw DataError("forest needs at least 2 training rows");
  if (params.n_trees == 0) throw ConfigError("n_trees must be positive");
  if (d == 0) throw DataError("forest needs at least one feature");

  std::vector<std::size_t> canonical(n);
  std::iota(canonical.begin(), canonical.end(), std::size_t{0});
  std::stable_sort(canonical.begin(), canonical.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = train.X.row(a);
    const auto rb = train.X.row(b);
    if (std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end())) return true;
    if (std::lexicographical_compare(rb.begin(), rb.end(), ra.begin(), ra.end())) return false;
    return train.y[a] < train.y[b];
  });

  const std::size_t max_features =
      params.max_features ? std::min(params.max_features, d)
                          : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));

  ForestModel model{params, seed, d, {}};
  model.trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(mix_seed(seed, t));
    std::vector<std::size_t> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
      samples[i] = canonical[params.bootstrap ? static_cast<std::size_t>(rng.index(n)) : i];
    }
    detail::TreeBuilder builder(train, params, max_features, rng);
    model.trees.push_back(builder.build(std::move(samples)));
  }
  return model;
}

/// Hard majority vote; ties go to BENIGN. confidence = fraction of trees voting MALICIOUS.
inline Prediction forest_predict(const ForestModel& m, std::span<const double> x) {
  if (x.size() != m.dims) throw DataError("forest expects " + std::to_string(m.dims) + " features");
  std::size_t votes = 0;
  for (const auto& tree : m.trees) votes += tree.predict(x) == Label::MALICIOUS;
  const double fraction = static_cast<double>(votes) / static_cast<double>(m.trees.size());
  return {2 * votes > m.trees.size() ? Label::MALICIOUS : Label::BENIGN, fraction};
}

}  // namespace botwatch
