#pragma once

// Trained stage-1 classifier bundle: scaler, selected features, GNB or forest.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "botwatch/errors.hpp"
#include "botwatch/features.hpp"
#include "botwatch/gaussian_nb.hpp"
#include "botwatch/metrics.hpp"
#include "botwatch/preprocess.hpp"
#include "botwatch/random_forest.hpp"

namespace botwatch {

enum class ModelKind { GNB, FOREST };

inline std::string_view model_kind_name(ModelKind k) { return k == ModelKind::GNB ? "gnb" : "forest"; }

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "gnb") return ModelKind::GNB;
  if (s == "forest") return ModelKind::FOREST;
  throw ConfigError("unknown model kind '" + std::string(s) + "' (expected gnb or forest)");
}

struct TrainConfig {
  ModelKind kind = ModelKind::FOREST;
  std::size_t k_best = 6;
  std::uint64_t seed = 0;
  double var_smoothing = 1e-3;
  ForestParams forest;
  double session_secs = 900.0;
};

struct TrainedModel {
  ModelKind kind = ModelKind::FOREST;
  std::variant<GnbModel, ForestModel> payload;
  Scaler scaler;
  std::vector<std::size_t> selected;
  double session_secs = 900.0;

  bool operator==(const TrainedModel&) const = default;

  /// Scales the raw features and keeps the selected columns.
  std::vector<double> prepare(std::span<const double> raw) const {
    const auto scaled = scaler.transform_row(raw);
    std::vector<double> out;
    out.reserve(selected.size());
    for (auto j : selected) out.push_back(scaled.at(j));
    return out;
  }

  Prediction predict(std::span<const double> raw) const {
    const auto x = prepare(raw);
    if (kind == ModelKind::GNB) return gnb_predict(std::get<GnbModel>(payload), x);
    return forest_predict(std::get<ForestModel>(payload), x);
  }

  Prediction predict(const FeatureVector& fv) const {
    const auto v = fv.values();
    return predict(v);
  }
};

inline std::variant<GnbModel, ForestModel> fit_classifier(const Dataset& train, const TrainConfig& cfg) {
  if (cfg.kind == ModelKind::GNB) return gnb_fit(train, cfg.var_smoothing);
  return forest_fit(train, cfg.seed, cfg.forest);
}

inline Prediction classify(const std::variant<GnbModel, ForestModel>& m, std::span<const double> x) {
  if (const auto* g = std::get_if<GnbModel>(&m)) return gnb_predict(*g, x);
  return forest_predict(std::get<ForestModel>(m), x);
}

/// Scaled, feature-selected view of a raw dataset plus the transform that produced it.
struct PreparedData {
  Dataset data;
  Scaler scaler;
  std::vector<double> scores;
  std::vector<std::size_t> selected;
};

inline PreparedData prepare_dataset(const Dataset& raw, std::size_t k_best) {
  PreparedData out;
  out.scaler = scaler_fit(raw.X);
  const auto scaled = scaler_transform(out.scaler, raw.X);
  out.scores = chi2_scores(scaled, raw.y);
  out.selected = select_k_best(out.scores, k_best);
  out.data.X = select_columns(scaled, out.selected);
  out.data.y = raw.y;
  for (auto j : out.selected) out.data.feature_names.push_back(raw.feature_names.at(j));
  return out;
}

/// Min-max scaling, chi2 selection of k_best columns, then the classifier.
inline TrainedModel train_model(const Dataset& raw, const TrainConfig& cfg) {
  auto prepared = prepare_dataset(raw, cfg.k_best);
  TrainedModel m;
  m.kind = cfg.kind;
  m.scaler = std::move(prepared.scaler);
  m.selected = std::move(prepared.selected);
  m.session_secs = cfg.session_secs;
  m.payload = fit_classifier(prepared.data, cfg);
  return m;
}

struct CvResult {
  std::vector<double> fold_accuracy;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

/// Seeded k-fold split: rows are permuted, then position i goes to fold i mod k.
inline CvResult cross_validate(const Dataset& ds, std::size_t k, const TrainConfig& cfg) {
  if (k < 2) throw ConfigError("cross-validation needs k >= 2");
  if (ds.size() < k) throw DataError("cross-validation needs at least k rows");
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(cfg.seed, 0xCF));
  rng.shuffle(order.begin(), order.end());

  CvResult res;
  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < order.size(); ++i) (i % k == fold ? test_rows : train_rows).push_back(order[i]);
    const auto train = ds.subset(train_rows);
    const auto test = ds.subset(test_rows);
    const auto model = fit_classifier(train, cfg);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < test.size(); ++r) correct += classify(model, test.X.row(r)).label == test.y[r];
    res.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
  }
  for (double a : res.fold_accuracy) res.mean += a;
  res.mean /= static_cast<double>(k);
  for (double a : res.fold_accuracy) res.stddev += (a - res.mean) * (a - res.mean);
  res.stddev = std::sqrt(res.stddev / static_cast<double>(k));
  return res;
}

// Model file ----------------------------------------------------------------
//
// Line-oriented text, doubles in shortest round-trip form so parameters
// reload bit-for-bit. The trailing "end" line detects truncation.

inline constexpr std::string_view kModelMagic = "botwatch-model";
inline constexpr int kModelVersion = 1;

namespace detail {

inline void write_doubles(std::ostream& out, std::span<const double> v) {
  for (double x : v) out << ' ' << format_double(x);
}

class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw CorruptFileError("model file truncated");
    return w;
  }

  void expect(std::string_view w) {
    const auto got = word();
    if (got != w) throw CorruptFileError("model file: expected '" + std::string(w) + "', got '" + got + "'");
  }

  double real() {
    const auto w = word();
    double v = 0;
    if (!parse_number(std::string_view(w), v)) throw CorruptFileError("model file: bad number '" + w + "'");
    return v;
  }

  std::uint64_t count(std::uint64_t limit = 1u << 24) {
    const auto w = word();
    std::uint64_t v = 0;
    if (!parse_number(std::string_view(w), v) || v > limit) {
      throw CorruptFileError("model file: bad count '" + w + "'");
    }
    return v;
  }

  std::int64_t integer() {
    const auto w = word();
    std::int64_t v = 0;
    if (!parse_number(std::string_view(w), v)) throw CorruptFileError("model file: bad integer '" + w + "'");
    return v;
  }

  std::vector<double> reals(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = real();
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace detail

inline void save_model(std::ostream& out, const TrainedModel& m) {
  out << kModelMagic << " v" << kModelVersion << '\n';
  out << "kind " << model_kind_name(m.kind) << '\n';
  out << "session_secs " << detail::format_double(m.session_secs) << '\n';
  out << "scaler " << m.scaler.dims() << '\n';
  out << "min";
  detail::write_doubles(out, m.scaler.min);
  out << "\nmax";
  detail::write_doubles(out, m.scaler.max);
  out << "\nselected " << m.selected.size();
  for (auto j : m.selected) out << ' ' << j;
  out << '\n';
  if (m.kind == ModelKind::GNB) {
    const auto& g = std::get<GnbModel>(m.payload);
    out << "gnb " << g.dims() << ' ' << detail::format_double(g.var_smoothing) << '\n';
    out << "priors";
    detail::write_doubles(out, g.priors);
    for (int c = 0; c < 2; ++c) {
      out << "\nmean" << c;
      detail::write_doubles(out, g.mean[c]);
      out << "\nvar" << c;
      detail::write_doubles(out, g.var[c]);
    }
    out << '\n';
  } else {
    const auto& f = std::get<ForestModel>(m.payload);
    out << "forest " << f.dims << ' ' << f.seed << ' ' << f.params.n_trees << ' ' << f.params.min_samples_split << ' '
        << f.params.min_samples_leaf << ' ' << f.params.max_features << ' ' << (f.params.bootstrap ? 1 : 0) << '\n';
    for (const auto& tree : f.trees) {
      out << "tree " << tree.nodes.size() << '\n';
      for (const auto& n : tree.nodes) {
        out << n.feature << ' ' << detail::format_double(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
            << n.counts[0] << ' ' << n.counts[1] << '\n';
      }
    }
  }
  out << "end\n";
}

inline TrainedModel load_model(std::istream& in) {
  detail::TokenReader rd(in);
  std::string magic;
  if (!(in >> magic)) throw CorruptFileError("model file is empty");
  if (magic != kModelMagic) throw CorruptFileError("not a model file");
  const auto version = rd.word();
  if (version != "v" + std::to_string(kModelVersion)) {
    throw CorruptFileError("unsupported model version '" + version + "'");
  }

  TrainedModel m;
  rd.expect("kind");
  try {
    m.kind = parse_model_kind(rd.word());
  } catch (const ConfigError& e) {
    throw CorruptFileError(std::string("model file: ") + e.what());
  }
  rd.expect("session_secs");
  m.session_secs = rd.real();
  rd.expect("scaler");
  const auto dims = rd.count(1024);
  rd.expect("min");
  m.scaler.min = rd.reals(dims);
  rd.expect("max");
  m.scaler.max = rd.reals(dims);
  for (std::size_t j = 0; j < dims; ++j) {
    if (!(m.scaler.max[j] >= m.scaler.min[j])) throw CorruptFileError("model file: scaler max < min");
  }
  rd.expect("selected");
  const auto k = rd.count(dims);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = rd.count(dims);
    if (j >= dims) throw CorruptFileError("model file: selected index out of range");
    m.selected.push_back(j);
  }

  if (m.kind == ModelKind::GNB) {
    GnbModel g;
    rd.expect("gnb");
    const auto gd = rd.count(1024);
    if (gd != k) throw CorruptFileError("model file: GNB dimension does not match selection");
    g.var_smoothing = rd.real();
    rd.expect("priors");
    g.priors = {rd.real(), rd.real()};
    for (int c = 0; c < 2; ++c) {
      rd.expect("mean" + std::to_string(c));
      g.mean[c] = rd.reals(gd);
      rd.expect("var" + std::to_string(c));
      g.var[c] = rd.reals(gd);
      for (double v : g.var[c]) {
        if (!(v > 0)) throw CorruptFileError("model file: non-positive GNB variance");
      }
    }
    m.payload = std::move(g);
  } else {
    ForestModel f;
    rd.expect("forest");
    f.dims = rd.count(1024);
    if (f.dims != k) throw CorruptFileError("model file: forest dimension does not match selection");
    f.seed = rd.count(UINT64_MAX);
    f.params.n_trees = rd.count(100000);
    f.params.min_samples_split = rd.count();
    f.params.min_samples_leaf = rd.count();
    f.params.max_features = rd.count(1024);
    f.params.bootstrap = rd.count(1) == 1;
    for (std::size_t t = 0; t < f.params.n_trees; ++t) {
      rd.expect("tree");
      const auto n_nodes = rd.count();
      if (n_nodes == 0) throw CorruptFileError("model file: empty tree");
      DecisionTree tree;
      tree.nodes.resize(n_nodes);
      for (std::size_t i = 0; i < n_nodes; ++i) {
        auto& node = tree.nodes[i];
        node.feature = static_cast<int>(rd.integer());
        node.threshold = rd.real();
        node.left = static_cast<std::int32_t>(rd.integer());
        node.right = static_cast<std::int32_t>(rd.integer());
        node.counts = {static_cast<std::uint32_t>(rd.count(UINT32_MAX)), static_cast<std::uint32_t>(rd.count(UINT32_MAX))};
        if (node.feature >= static_cast<int>(f.dims)) throw CorruptFileError("model file: node feature out of range");
        if (!node.is_leaf()) {
          // Children always follow their parent, which also rules out cycles.
          const auto lo = static_cast<std::int64_t>(i);
          if (node.left <= lo || node.right <= lo || node.left >= static_cast<std::int64_t>(n_nodes) ||
              node.right >= static_cast<std::int64_t>(n_nodes)) {
            throw CorruptFileError("model file: bad child index");
          }
        }
      }
      f.trees.push_back(std::move(tree));
    }
    m.payload = std::move(f);
  }
  rd.expect("end");
  return m;
}

inline void save_model(const std::string& path, const TrainedModel& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_model(out, m);
  if (!out) throw Error("write to '" + path + "' failed");
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path + "'");
  return load_model(in);
}

}  // namespace botwatch
