// botwatch command line.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 internal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "botwatch/botwatch.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace botwatch;

namespace {

enum Exit { OK = 0, USAGE = 1, DATA = 2, INTERNAL = 3 };

/// Bad flag values discovered after CLI parsing.
struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

Trace load_trace(const std::string& path) {
  auto in = open_in(path);
  try {
    return parse_trace(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<FeatureVector> load_features(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_feature_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    open_out(out_path) << text;
  }
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Shared flag groups ----------------------------------------------------------

struct DetectFlags {
  PipelineConfig pipe;

  void add(CLI::App* app) {
    app->add_option("--session-secs", pipe.session_secs, "Session duration in seconds")->check(CLI::PositiveNumber);
    app->add_option("--window", pipe.window, "Sessions per averaging window")->check(CLI::PositiveNumber);
    app->add_option("--threads", pipe.parallelism, "Device-sweep workers")->check(CLI::PositiveNumber);
    app->add_option("--sample-t", pipe.periodicity.sample_T, "Encoding interval T in seconds")
        ->check(CLI::PositiveNumber);
    app->add_option("--peak-frac", pipe.periodicity.peak_height_frac, "Peak height fraction of the tallest peak")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--gap-var", pipe.periodicity.gap_variance_thresh, "Inter-peak gap variance threshold")
        ->check(CLI::PositiveNumber);
    app->add_option("--payload-cutoff", pipe.periodicity.payload_cutoff_bytes, "Max CnC candidate payload (bytes)")
        ->check(CLI::PositiveNumber);
    app->add_option("--alpha", pipe.bdcs.alpha, "Ljung-Box significance level")->check(CLI::Range(0.0, 1.0));
    app->add_option("--lags", pipe.bdcs.h, "Ljung-Box lag count h")->check(CLI::PositiveNumber);
  }
};

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    if (!detail::parse_number(std::string_view(item), v)) throw UsageFailure("bad device index '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// simulate -------------------------------------------------------------------

struct SimulateCmd {
  std::string out_dir;
  std::string trace_out;
  std::size_t n_benign = 1000;
  std::size_t n_malicious = 1000;
  std::uint64_t seed = 1;
  double session_secs = 900;
  double duration = 0;
  std::size_t n_iot = 10;
  std::size_t n_pc = 5;
  std::string infected = "0";
  double period = 60;
  double jitter = 0;
  double scan_rate = 1.0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("simulate", "Generate a labeled session corpus or one live trace");
    auto* dir = app->add_option("--out", out_dir, "Corpus directory (traces/, manifest.csv, features.csv)");
    auto* single = app->add_option("--trace", trace_out, "Write a single trace with infected devices instead");
    dir->excludes(single);
    app->add_option("--benign", n_benign, "Benign sessions in the corpus");
    app->add_option("--malicious", n_malicious, "Malicious sessions in the corpus");
    app->add_option("--seed", seed, "Generator seed");
    app->add_option("--session-secs", session_secs, "Corpus session duration")->check(CLI::PositiveNumber);
    app->add_option("--duration", duration, "Single-trace duration (default 5 sessions)")->check(CLI::PositiveNumber);
    app->add_option("--iot", n_iot, "IoT devices");
    app->add_option("--pc", n_pc, "PC devices");
    app->add_option("--infected", infected, "Comma-separated infected IoT indices for --trace");
    app->add_option("--beacon-period", period, "Beacon period for --trace")->check(CLI::PositiveNumber);
    app->add_option("--jitter", jitter, "Beacon jitter for --trace");
    app->add_option("--scan-rate", scan_rate, "Scan packets per second");
    app->callback([this] { run(); });
  }

  SynthConfig base() const {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_iot_devices = n_iot;
    cfg.n_pc_devices = n_pc;
    cfg.scan.rate_pps = scan_rate;
    return cfg;
  }

  void run() const {
    if (out_dir.empty() && trace_out.empty()) throw UsageFailure("simulate needs --out DIR or --trace FILE");
    if (!trace_out.empty()) return run_single();
    SynthConfig cfg = base();
    cfg.duration_s = session_secs;
    cfg.validate();

    const fs::path root(out_dir);
    fs::create_directories(root / "traces");
    auto manifest = open_out(root / "manifest.csv");
    manifest << "id,label,kind,seed,infected,file\n";
    std::vector<FeatureVector> rows;
    for (const auto& plan : plan_corpus(n_benign, n_malicious, seed)) {
      const auto lt = gen_session(cfg, plan);
      char name[32];
      std::snprintf(name, sizeof name, "session_%05zu.trace", plan.id);
      open_out(root / "traces" / name) << write_trace(lt.trace);
      std::string bots;
      for (const auto& ip : lt.infected) bots += (bots.empty() ? "" : ";") + ip.to_string();
      manifest << plan.id << ',' << label_name(plan.label()) << ',' << session_kind_name(plan.kind) << ',' << plan.seed
               << ',' << bots << ",traces/" << name << '\n';
      for (const auto& s : sessionize(lt.trace, session_secs)) {
        auto fv = extract_features(s);
        fv.label = plan.label();
        rows.push_back(fv);
      }
    }
    auto features = open_out(root / "features.csv");
    write_feature_csv(features, rows);
    std::cout << "wrote " << n_benign + n_malicious << " sessions to " << root.string() << "\n";
  }

  void run_single() const {
    SynthConfig cfg = base();
    cfg.duration_s = duration > 0 ? duration : 5 * session_secs;
    cfg.infected = infected.empty() ? std::vector<std::size_t>{} : parse_index_list(infected);
    cfg.beacon.period_s = period;
    cfg.beacon.jitter_s = jitter;
    cfg.validate();
    const auto lt = gen_infected_trace(cfg, seed);
    open_out(trace_out) << write_trace(lt.trace);
    std::cout << "wrote " << lt.trace.packets.size() << " packets to " << trace_out << "; infected:";
    for (const auto& ip : lt.infected) std::cout << ' ' << ip.to_string();
    std::cout << "\n";
  }
};

// featurize ------------------------------------------------------------------

struct FeaturizeCmd {
  std::vector<std::string> traces;
  std::string label;
  std::string out;
  double session_secs = 900;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("featurize", "Extract per-session feature vectors from traces");
    app->add_option("traces", traces, "Trace files")->required()->check(CLI::ExistingFile);
    app->add_option("--label", label, "Attach a label to every row")->check(CLI::IsMember({"benign", "malicious"}));
    app->add_option("--out", out, "Output CSV (default stdout)");
    app->add_option("--session-secs", session_secs, "Session duration")->check(CLI::PositiveNumber);
    app->callback([this] { run(); });
  }

  void run() const {
    std::vector<FeatureVector> rows;
    for (const auto& path : traces) {
      for (const auto& s : sessionize(load_trace(path), session_secs)) {
        auto fv = extract_features(s);
        if (!label.empty()) fv.label = label == "malicious" ? Label::MALICIOUS : Label::BENIGN;
        rows.push_back(fv);
      }
    }
    std::ostringstream csv;
    write_feature_csv(csv, rows);
    emit(out, csv.str());
  }
};

// train ----------------------------------------------------------------------

struct TrainCmd {
  std::string features;
  std::string out;
  std::string model = "forest";
  std::uint64_t seed = 0;
  std::size_t k_best = 6;
  std::size_t folds = 10;
  double session_secs = 900;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("train", "Fit scaler, chi2 selection and a classifier; report k-fold CV");
    app->add_option("--features", features, "Labeled feature CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "Model file")->required();
    app->add_option("--model", model, "Classifier")->check(CLI::IsMember({"gnb", "forest"}));
    app->add_option("--seed", seed, "Forest / CV seed");
    app->add_option("--k-best", k_best, "Features kept by chi2 selection")->check(CLI::PositiveNumber);
    app->add_option("--folds", folds, "Cross-validation folds (0 to skip)");
    app->add_option("--session-secs", session_secs, "Session duration the features were built with")
        ->check(CLI::PositiveNumber);
    app->callback([this] { run(); });
  }

  void run() const {
    const auto rows = load_features(features);
    if (k_best > kNumFeatures) throw UsageFailure("--k-best " + std::to_string(k_best) + " exceeds 8 features");
    for (const auto& r : rows) {
      if (!r.label) throw DataError("training needs labeled rows");
    }
    TrainConfig cfg;
    cfg.kind = parse_model_kind(model);
    cfg.seed = seed;
    cfg.k_best = k_best;
    cfg.session_secs = session_secs;
    const auto ds = Dataset::from_features(rows);
    const auto m = train_model(ds, cfg);
    save_model(out, m);
    std::cout << "model " << model << " trained on " << ds.size() << " rows; selected:";
    for (auto j : m.selected) std::cout << ' ' << kFeatureNames[j];
    std::cout << "\n";
    if (folds > 0) {
      const auto cv = cross_validate(prepare_dataset(ds, k_best).data, folds, cfg);
      std::cout << folds << "-fold CV accuracy " << fixed(cv.mean) << " (+/- " << fixed(cv.stddev) << ")\n";
    }
  }
};

// evaluate -------------------------------------------------------------------

struct ManifestRow {
  std::string id;
  Label label = Label::BENIGN;
  std::vector<Ipv4> infected;
  std::string file;
};

std::vector<ManifestRow> load_manifest(const fs::path& path) {
  auto in = open_in(path.string());
  std::string line;
  if (!std::getline(in, line) || line != "id,label,kind,seed,infected,file") {
    throw ParseError(path.string() + ": unexpected manifest header");
  }
  std::vector<ManifestRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 6) throw ParseError(path.string() + " line " + std::to_string(line_no) + ": expected 6 columns");
    ManifestRow r;
    r.id = f[0];
    r.label = f[1] == "MALICIOUS" ? Label::MALICIOUS : Label::BENIGN;
    std::stringstream ips(f[4]);
    while (std::getline(ips, cell, ';')) {
      const auto ip = Ipv4::parse(cell);
      if (!ip) throw ParseError(path.string() + " line " + std::to_string(line_no) + ": bad IP '" + cell + "'");
      r.infected.push_back(*ip);
    }
    r.file = f[5];
    rows.push_back(std::move(r));
  }
  return rows;
}

struct EvaluateCmd {
  std::string features;
  std::string model_file;
  std::string corpus;
  DetectFlags flags;
  double gamma = 0.1;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("evaluate", "Stage-1 AC/PR/RC/F1 and stage-2 DR/MDR (with WLST baseline)");
    app->add_option("--features", features, "Labeled feature CSV")->check(CLI::ExistingFile);
    app->add_option("--model-file", model_file, "Model file for stage-1 metrics")->check(CLI::ExistingFile);
    app->add_option("--corpus", corpus, "Corpus directory for stage-2 DR/MDR")->check(CLI::ExistingDirectory);
    app->add_option("--gamma", gamma, "WLST false-positive probability")->check(CLI::Range(0.0, 1.0));
    flags.add(app);
    app->callback([this] { run(); });
  }

  void run() const {
    if (corpus.empty() && (features.empty() || model_file.empty())) {
      throw UsageFailure("evaluate needs --features with --model-file, or --corpus");
    }
    if (!features.empty() || !model_file.empty()) {
      if (features.empty() || model_file.empty()) throw UsageFailure("--features and --model-file go together");
      const auto rows = load_features(features);
      const auto model = load_model(model_file);
      std::vector<Label> truth;
      std::vector<Label> pred;
      for (const auto& r : rows) {
        if (!r.label) throw DataError("evaluation needs labeled rows");
        truth.push_back(*r.label);
        pred.push_back(model.predict(r).label);
      }
      const auto c = confusion(truth, pred);
      std::cout << "stage1 n=" << c.total() << " AC=" << fixed(c.accuracy()) << " PR=" << fixed(c.precision())
                << " RC=" << fixed(c.recall()) << " F1=" << fixed(c.f1()) << " (TP=" << c.tp << " FP=" << c.fp
                << " TN=" << c.tn << " FN=" << c.fn << ")\n";
    }
    if (!corpus.empty()) stage2();
  }

  void stage2() const {
    const fs::path root(corpus);
    const auto& p = flags.pipe;
    p.validate();
    WalkerParams{gamma}.validate();
    DetectionRate acf_counts;
    DetectionRate wlst;
    for (const auto& row : load_manifest(root / "manifest.csv")) {
      if (row.label != Label::MALICIOUS || row.infected.empty()) continue;
      const auto trace = load_trace((root / row.file).string());
      const auto devices = split_by_device(trace);
      const auto sweep = detect_iot_bots(devices, p);
      bool all_acf = true;
      bool all_wlst = true;
      for (const auto& bot : row.infected) {
        all_acf = all_acf && std::find(sweep.infected.begin(), sweep.infected.end(), bot) != sweep.infected.end();
        const auto it = devices.find(bot);
        if (it == devices.end()) {
          all_wlst = false;
          continue;
        }
        const auto& dev = it->second;
        auto arrivals = filter_cnc_candidates(dev, p.periodicity.payload_cutoff_bytes);
        for (auto& t : arrivals) t -= dev.t_start;
        const auto seq = encode(arrivals, p.periodicity.sample_T, dev.t_end - dev.t_start);
        all_wlst = all_wlst && walker_test(seq.e, gamma).verdict == WalkerVerdict::DETECTED;
      }
      ++acf_counts.total;
      ++wlst.total;
      acf_counts.detected += all_acf;
      wlst.detected += all_wlst;
    }
    if (acf_counts.total == 0) throw DataError("corpus has no malicious traces");
    std::cout << "stage2 traces=" << acf_counts.total << " acf DR=" << fixed(acf_counts.dr()) << " MDR=" << fixed(acf_counts.mdr())
              << " | WLST(gamma=" << gamma << ") DR=" << fixed(wlst.dr()) << " MDR=" << fixed(wlst.mdr()) << "\n";
  }
};

// detect ---------------------------------------------------------------------

struct DetectCmd {
  std::string trace;
  std::string model_file;
  std::string out;
  DetectFlags flags;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("detect", "Run the two-stage pipeline on a trace; write a JSON report");
    app->add_option("--trace", trace, "Trace file")->required()->check(CLI::ExistingFile);
    app->add_option("--model-file", model_file, "Model file")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "Report path (default stdout)");
    flags.add(app);
    app->callback([this] { run(); });
  }

  void run() const {
    const auto report = run_pipeline(load_trace(trace), load_model(model_file), flags.pipe);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    emit(out, report_to_string(report));
  }
};

// bdcs / baseline --------------------------------------------------------------

std::map<Ipv4, DeviceTrace> select_devices(const Trace& t, const std::string& device) {
  auto all = split_by_device(t);
  if (device.empty()) return all;
  const auto ip = Ipv4::parse(device);
  if (!ip) throw UsageFailure("bad --device '" + device + "'");
  auto it = all.find(*ip);
  if (it == all.end()) throw DataError("device " + device + " not present in the trace");
  return {{it->first, it->second}};
}

struct BdcsCmd {
  std::string trace;
  std::string device;
  DetectFlags flags;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("bdcs", "Per-device detection probabilities and the confidence score");
    app->add_option("--trace", trace, "Trace file")->required()->check(CLI::ExistingFile);
    app->add_option("--device", device, "Restrict to one internal IP");
    flags.add(app);
    app->callback([this] { run(); });
  }

  void run() const {
    const auto sweep = detect_iot_bots(select_devices(load_trace(trace), device), flags.pipe);
    nlohmann::ordered_json j;
    auto& devs = j["devices"] = nlohmann::ordered_json::array();
    std::vector<double> probs;
    for (const auto& d : sweep.devices) {
      devs.push_back(to_json(d));
      if (d.periodicity.detected()) probs.push_back(d.probability.p);
    }
    auto& inf = j["infected"] = nlohmann::ordered_json::array();
    for (const auto& ip : sweep.infected) inf.push_back(ip.to_string());
    j["bdcs"] = bdcs(probs);
    std::cout << j.dump(2) << "\n";
  }
};

struct BaselineCmd {
  std::string trace;
  std::string device;
  double gamma = 0.1;
  DetectFlags flags;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("baseline", "Walker's largest sample test next to the ACF detector, per device");
    app->add_option("--trace", trace, "Trace file")->required()->check(CLI::ExistingFile);
    app->add_option("--device", device, "Restrict to one internal IP");
    app->add_option("--gamma", gamma, "WLST false-positive probability")->check(CLI::Range(0.0, 1.0));
    flags.add(app);
    app->callback([this] { run(); });
  }

  void run() const {
    WalkerParams{gamma}.validate();
    const auto& pp = flags.pipe.periodicity;
    pp.validate();
    std::cout << "device,acf_verdict,wlst_verdict,wlst_statistic,wlst_threshold,note\n";
    for (const auto& [ip, dev] : select_devices(load_trace(trace), device)) {
      const auto acf_res = detect_periodicity(dev, pp);
      std::string w_verdict = "NOT_DETECTED";
      std::string stat = "";
      std::string thr = "";
      std::string note;
      const double span = dev.t_end - dev.t_start;
      if (span >= pp.sample_T * 8) {
        auto arrivals = filter_cnc_candidates(dev, pp.payload_cutoff_bytes);
        for (auto& t : arrivals) t -= dev.t_start;
        const auto w = walker_test(encode(arrivals, pp.sample_T, span).e, gamma);
        w_verdict = w.verdict == WalkerVerdict::DETECTED ? "DETECTED" : "NOT_DETECTED";
        stat = fixed(w.statistic);
        thr = fixed(w.threshold);
        note = w.reason;
      } else {
        note = "capture shorter than 8 sampling intervals";
      }
      std::cout << ip.to_string() << ',' << verdict_name(acf_res.verdict) << ',' << w_verdict << ',' << stat << ','
                << thr << ',' << note << "\n";
    }
  }
};

// policy ---------------------------------------------------------------------

struct PolicyCmd {
  std::string store = "policies.txt";
  std::string apply_report;
  std::string names;
  bool list = false;
  CLI::App* app = nullptr;

  void add(CLI::App& root) {
    app = root.add_subcommand("policy", "Policy engine: --create-policy, --add-action, --delete-action, --delete-policy");
    app->add_option("--store", store, "Policy store file");
    app->add_option("--apply", apply_report, "Detection report to map onto actions")->check(CLI::ExistingFile);
    app->add_option("--names", names, "Device name map ('<name> <ip>' per line)")->check(CLI::ExistingFile);
    app->add_flag("--list", list, "Print the store");
    app->allow_extras();
    app->callback([this] { run(); });
  }

  void run() const {
    const auto extras = app->remaining();
    if (!extras.empty()) {
      std::string line;
      for (const auto& e : extras) line += (line.empty() ? "" : " ") + e;
      PolicyCommand cmd;
      try {
        cmd = parse_policy_command(line);
      } catch (const ParseError& e) {
        throw UsageFailure(e.what());
      }
      auto s = load_policy_store(store);
      s.execute(cmd);
      save_policy_store(store, s);
    }
    if (list) save_policy_store(std::cout, load_policy_store(store));
    if (!apply_report.empty()) apply();
    if (extras.empty() && !list && apply_report.empty()) throw UsageFailure("policy: nothing to do");
  }

  void apply() const {
    auto in = open_in(apply_report);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(apply_report + ": " + e.what());
    }
    if (!j.contains("infected") || !j["infected"].is_array()) throw ParseError(apply_report + ": no infected list");
    std::vector<Ipv4> infected;
    for (const auto& v : j["infected"]) {
      const auto ip = v.is_string() ? Ipv4::parse(v.get<std::string>()) : std::nullopt;
      if (!ip) throw ParseError(apply_report + ": bad infected entry");
      infected.push_back(*ip);
    }
    std::map<Ipv4, std::string> name_map;
    if (!names.empty()) {
      auto nin = open_in(names);
      name_map = parse_device_names(nin);
    }
    std::cout << "device,name,policy,action\n";
    for (const auto& e : apply_policies(load_policy_store(store), infected, name_map)) {
      std::cout << e.device.to_string() << ',' << e.device_name << ',' << (e.policy.empty() ? "(default)" : e.policy)
                << ',' << e.action.to_string() << "\n";
    }
  }
};

// run-pipeline -----------------------------------------------------------------

struct RunPipelineCmd {
  std::string out_dir;
  std::uint64_t seed = 1;
  std::string model = "forest";
  std::size_t n_benign = 1000;
  std::size_t n_malicious = 1000;
  std::string infected = "0";
  DetectFlags flags;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("run-pipeline", "simulate, train and detect in one go");
    app->add_option("--out", out_dir, "Output directory")->required();
    app->add_option("--seed", seed, "Seed for every stage");
    app->add_option("--model", model, "Classifier")->check(CLI::IsMember({"gnb", "forest"}));
    app->add_option("--benign", n_benign, "Benign training sessions");
    app->add_option("--malicious", n_malicious, "Malicious training sessions");
    app->add_option("--infected", infected, "Infected IoT indices in the live trace");
    flags.add(app);
    app->callback([this] { run(); });
  }

  void run() const {
    const fs::path root(out_dir);
    SimulateCmd sim;
    sim.out_dir = (root / "corpus").string();
    sim.n_benign = n_benign;
    sim.n_malicious = n_malicious;
    sim.seed = seed;
    sim.session_secs = flags.pipe.session_secs;
    sim.run();

    TrainCmd train;
    train.features = (root / "corpus" / "features.csv").string();
    train.out = (root / "model.txt").string();
    train.model = model;
    train.seed = seed;
    train.folds = 0;
    train.session_secs = flags.pipe.session_secs;
    train.run();

    SimulateCmd live;
    live.trace_out = (root / "live.trace").string();
    live.seed = mix_seed(seed, 1);
    live.session_secs = flags.pipe.session_secs;
    live.infected = infected;
    live.run();

    DetectCmd detect;
    detect.trace = live.trace_out;
    detect.model_file = train.out;
    detect.out = (root / "report.json").string();
    detect.flags = flags;
    detect.run();
    std::cout << "report: " << detect.out << "\n";
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"botwatch: two-stage IoT botnet detection"};
  app.require_subcommand(1);
  SimulateCmd simulate;
  FeaturizeCmd featurize;
  TrainCmd train;
  EvaluateCmd evaluate;
  DetectCmd detect;
  BdcsCmd bdcs_cmd;
  BaselineCmd baseline;
  PolicyCmd policy;
  RunPipelineCmd run_pipeline_cmd;
  simulate.add(app);
  featurize.add(app);
  train.add(app);
  evaluate.add(app);
  detect.add(app);
  bdcs_cmd.add(app);
  baseline.add(app);
  policy.add(app);
  run_pipeline_cmd.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? OK : USAGE;
  } catch (const UsageFailure& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return USAGE;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return USAGE;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return USAGE;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return DATA;
  } catch (const botwatch::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return DATA;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return DATA;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return INTERNAL;
  }
  return OK;
}
