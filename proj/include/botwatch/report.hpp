#pragma once

// JSON rendering of DetectionReport. Keys are emitted in a fixed order so
// two reports from identical inputs are byte-identical.

#include <string>

#include "botwatch/pipeline.hpp"
#include "json.hpp"

namespace botwatch {

inline nlohmann::ordered_json to_json(const FeatureVector& fv) {
  nlohmann::ordered_json j;
  const auto v = fv.values();
  for (std::size_t i = 0; i < kNumFeatures; ++i) j[std::string(kFeatureNames[i])] = v[i];
  return j;
}

inline nlohmann::ordered_json to_json(const DeviceFinding& d) {
  nlohmann::ordered_json j;
  j["ip"] = d.ip.to_string();
  j["verdict"] = verdict_name(d.periodicity.verdict);
  j["candidates"] = d.periodicity.n_candidates;
  j["K"] = d.periodicity.K;
  j["peaks"] = d.periodicity.peaks;
  j["gap_variance"] = d.periodicity.gap_variance ? nlohmann::ordered_json(*d.periodicity.gap_variance) : nullptr;
  j["reason"] = d.periodicity.reason;
  j["ljung_box_q"] = d.probability.q;
  j["ljung_box_h"] = d.probability.h;
  j["p_value"] = d.probability.p_value;
  j["detection_prob"] = d.probability.p;
  return j;
}

inline nlohmann::ordered_json to_json(const DetectionReport& r) {
  nlohmann::ordered_json j;
  j["format"] = "botwatch-report v1";
  auto& sessions = j["sessions"] = nlohmann::ordered_json::array();
  for (const auto& s : r.sessions) {
    nlohmann::ordered_json e;
    e["index"] = s.index;
    e["t_start"] = s.t_start;
    e["t_end"] = s.t_end;
    e["verdict"] = label_name(s.label);
    e["confidence"] = s.confidence;
    e["features"] = to_json(s.features);
    sessions.push_back(std::move(e));
  }
  auto& windows = j["windows"] = nlohmann::ordered_json::array();
  for (const auto& w : r.windows) {
    windows.push_back({{"first", w.first}, {"last", w.last}, {"verdict", label_name(w.label)}});
  }
  j["stage1_verdict"] = label_name(r.stage1);
  j["stage2_ran"] = r.stage2_ran;
  j["stage2_session"] = r.stage2_session ? nlohmann::ordered_json(*r.stage2_session) : nullptr;
  auto& infected = j["infected"] = nlohmann::ordered_json::array();
  for (const auto& ip : r.infected) infected.push_back(ip.to_string());
  j["stage1_false_positive"] = r.stage1_false_positive;
  j["bdcs"] = r.bdcs ? nlohmann::ordered_json(*r.bdcs) : nullptr;
  auto& devices = j["devices"] = nlohmann::ordered_json::array();
  for (const auto& d : r.devices) devices.push_back(to_json(d));
  j["warnings"] = r.warnings;
  return j;
}

inline std::string report_to_string(const DetectionReport& r) { return to_json(r).dump(2) + "\n"; }

}  // namespace botwatch
