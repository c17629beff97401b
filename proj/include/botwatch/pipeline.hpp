#pragma once

// Two-stage detection: session classification with verdict averaging, then a
// per-device periodicity sweep when the aggregate traffic looks malicious.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "botwatch/acf_detector.hpp"
#include "botwatch/confidence.hpp"
#include "botwatch/errors.hpp"
#include "botwatch/features.hpp"
#include "botwatch/model.hpp"
#include "botwatch/sessionizer.hpp"

namespace botwatch {

struct PipelineConfig {
  double session_secs = 900.0;
  std::size_t window = 5;       // sessions per averaging window
  std::size_t parallelism = 2;  // device-sweep workers
  PeriodicityParams periodicity;
  BdcsParams bdcs;

  void validate() const {
    if (!(session_secs > 0)) throw ConfigError("session duration must be positive");
    if (window < 1) throw ConfigError("averaging window must hold at least one session");
    if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
    periodicity.validate();
    bdcs.validate();
  }
};

struct SessionVerdict {
  std::size_t index = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  Label label = Label::BENIGN;
  double confidence = 0.0;
  FeatureVector features;
};

/// One verdict per session, in session order.
inline std::vector<SessionVerdict> classify_sessions(std::span<const TrafficSession> sessions, const TrainedModel& model) {
  if (model.scaler.dims() != kNumFeatures) {
    throw DataError("model expects " + std::to_string(model.scaler.dims()) + " raw features, sessions provide " +
                    std::to_string(kNumFeatures));
  }
  std::vector<SessionVerdict> out;
  out.reserve(sessions.size());
  for (const auto& s : sessions) {
    SessionVerdict v;
    v.index = s.index;
    v.t_start = s.t_start;
    v.t_end = s.t_end;
    v.features = extract_features(s);
    const auto pred = model.predict(v.features);
    v.label = pred.label;
    v.confidence = pred.confidence;
    out.push_back(v);
  }
  return out;
}

/// MALICIOUS iff strictly more than half of the verdicts are MALICIOUS.
inline Label averaged_verdict(std::span<const Label> window) {
  if (window.empty()) throw DataError("cannot average an empty verdict window");
  const auto bad = static_cast<std::size_t>(std::count(window.begin(), window.end(), Label::MALICIOUS));
  return 2 * bad > window.size() ? Label::MALICIOUS : Label::BENIGN;
}

struct DeviceFinding {
  Ipv4 ip;
  PeriodicityResult periodicity;
  DetectionProbability probability;
};

struct SweepResult {
  std::vector<DeviceFinding> devices;  // ascending by IP
  std::vector<Ipv4> infected;          // ascending by IP
};

inline DeviceFinding analyze_device(const DeviceTrace& dev, const PeriodicityParams& periodicity,
                                    const BdcsParams& bdcs_params) {
  DeviceFinding f;
  f.ip = dev.device_ip;
  f.periodicity = detect_periodicity(dev, periodicity);
  const double duration = dev.t_end - dev.t_start;
  if (duration >= periodicity.sample_T) {
    auto arrivals = filter_cnc_candidates(dev, periodicity.payload_cutoff_bytes);
    for (auto& t : arrivals) t -= dev.t_start;
    f.probability = period_detection_prob(encode(arrivals, periodicity.sample_T, duration), bdcs_params);
  } else {
    f.probability.reason = "capture shorter than one sampling interval";
  }
  return f;
}

/// Periodicity sweep over devices sorted by IP. With two workers the first
/// walks the lower half upward and the second the upper half downward; more
/// workers split the list into contiguous chunks. Output is independent of
/// the worker count.
inline SweepResult detect_iot_bots(std::span<const DeviceTrace> devices, const PipelineConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 1; i < devices.size(); ++i) {
    if (!(devices[i - 1].device_ip < devices[i].device_ip)) throw DataError("device set must be sorted by IP");
  }
  const auto n = devices.size();
  std::vector<DeviceFinding> slots(n);
  auto run = [&](std::size_t begin, std::size_t end, bool descending) {
    for (std::size_t k = 0; k < end - begin; ++k) {
      const auto i = descending ? end - 1 - k : begin + k;
      slots[i] = analyze_device(devices[i], cfg.periodicity, cfg.bdcs);
    }
  };

  const auto workers = std::min(cfg.parallelism, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    run(0, n, false);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const auto begin = n * w / workers;
      const auto end = n * (w + 1) / workers;
      pool.emplace_back(run, begin, end, w % 2 == 1);
    }
  }

  SweepResult res;
  res.devices = std::move(slots);
  for (const auto& d : res.devices) {
    if (d.periodicity.detected()) res.infected.push_back(d.ip);
  }
  return res;
}

inline SweepResult detect_iot_bots(const std::map<Ipv4, DeviceTrace>& devices, const PipelineConfig& cfg) {
  std::vector<DeviceTrace> list;
  list.reserve(devices.size());
  for (const auto& [ip, dev] : devices) list.push_back(dev);
  return detect_iot_bots(std::span<const DeviceTrace>(list), cfg);
}

struct WindowVerdict {
  std::size_t first = 0;  // session index range [first, last]
  std::size_t last = 0;
  Label label = Label::BENIGN;
};

struct DetectionReport {
  std::vector<SessionVerdict> sessions;
  std::vector<WindowVerdict> windows;
  Label stage1 = Label::BENIGN;
  bool stage2_ran = false;
  std::optional<std::size_t> stage2_session;
  std::vector<DeviceFinding> devices;
  std::vector<Ipv4> infected;
  std::optional<double> bdcs;
  bool stage1_false_positive = false;
  std::vector<std::string> warnings;
};

/// Sliding windows of cfg.window sessions (one shorter window when fewer
/// sessions exist). Stage 2 runs on the first MALICIOUS session inside the
/// first window whose averaged verdict is MALICIOUS. BDCS is the product of
/// the detection probabilities of the devices found infected.
inline DetectionReport run_pipeline(const Trace& trace, const TrainedModel& model, const PipelineConfig& cfg) {
  cfg.validate();
  DetectionReport report;
  if (std::abs(model.session_secs - cfg.session_secs) > 1e-9) {
    report.warnings.push_back("model trained on " + detail::format_double(model.session_secs) +
                              " s sessions, detecting on " + detail::format_double(cfg.session_secs) + " s sessions");
  }
  const auto sessions = sessionize(trace, cfg.session_secs);
  if (sessions.empty()) {
    report.warnings.push_back("trace shorter than one session; nothing classified");
    return report;
  }
  report.sessions = classify_sessions(sessions, model);

  std::vector<Label> labels;
  for (const auto& s : report.sessions) labels.push_back(s.label);
  const auto n = labels.size();
  const auto w = std::min(cfg.window, n);
  std::optional<std::size_t> trigger_window;
  for (std::size_t start = 0; start + w <= n; ++start) {
    const auto label = averaged_verdict(std::span<const Label>(labels).subspan(start, w));
    report.windows.push_back({start, start + w - 1, label});
    if (label == Label::MALICIOUS && !trigger_window) trigger_window = report.windows.size() - 1;
  }
  if (!trigger_window) return report;

  report.stage1 = Label::MALICIOUS;
  const auto& win = report.windows[*trigger_window];
  std::size_t trigger = win.first;
  while (labels[trigger] != Label::MALICIOUS) ++trigger;
  report.stage2_session = trigger;
  report.stage2_ran = true;

  const auto devices = split_by_device(sessions[trigger], trace.internal_subnet);
  auto sweep = detect_iot_bots(devices, cfg);
  report.devices = std::move(sweep.devices);
  report.infected = std::move(sweep.infected);
  std::vector<double> probs;
  for (const auto& d : report.devices) {
    if (d.periodicity.detected()) probs.push_back(d.probability.p);
  }
  report.bdcs = bdcs(probs);
  report.stage1_false_positive = report.infected.empty();
  return report;
}

}  // namespace botwatch
