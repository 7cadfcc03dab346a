/* Copyright 2026 The ARGAN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "pipeline/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <numeric>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "core_data/image_io.hpp"
#include "core_data/toy_data.hpp"
#include "metrics/metrics.hpp"
#include "pipeline/charts.hpp"

namespace argan {
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kInstanceTags = {"X", "X_plus_XC", "X_plus_XS"};

std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    auto t = Trim(cur);
    if (!t.empty()) out.push_back(t);
    cur.clear();
  };
  for (char ch : text) {
    if (ch == ';' || ch == ',') {
      flush();
    } else {
      cur += ch;
    }
  }
  flush();
  return out;
}

std::string JoinList(const auto& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ";") + s;
  return out;
}

std::string_view ToString(ToySource t) {
  switch (t) {
    case ToySource::kNone: return "none";
    case ToySource::kDomains: return "domains";
    case ToySource::kClasses: return "classes";
  }
  return "none";
}

ToySource ParseToySource(std::string_view s) {
  if (s == "none") return ToySource::kNone;
  if (s == "domains") return ToySource::kDomains;
  if (s == "classes") return ToySource::kClasses;
  Fail(ErrorCode::kInvalidArgument, "data.toy must be none, domains or classes, got '" + std::string(s) + "'");
}

// Appends to <work>/argan.log and forwards to the sink.
class Logger {
 public:
  Logger(const ExperimentConfig& c, const LogSink& sink, std::string command)
      : path_(c.WorkDir() / "argan.log"), sink_(sink), command_(std::move(command)) {}

  void operator()(const std::string& line) const {
    if (sink_) sink_(line);
    std::error_code ec;
    fs::create_directories(path_.parent_path(), ec);
    std::ofstream out(path_, std::ios::app);
    if (!out) return;  // the log is best effort
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
    out << stamp << ' ' << command_ << ": " << line << '\n';
  }

 private:
  fs::path path_;
  const LogSink& sink_;
  std::string command_;
};

void MakeDirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) Fail(ErrorCode::kIo, "cannot create directory " + dir.string());
}

void ResetDir(const fs::path& dir) {
  std::error_code ec;
  fs::remove_all(dir, ec);
  MakeDirs(dir);
}

DatasetManifest LoadInstance(const ExperimentConfig& c, std::string_view tag) {
  const auto path = InstancePath(c, tag);
  if (!fs::exists(path)) {
    Fail(ErrorCode::kState, "missing dataset instance " + std::string(tag) + " (" + path.string() + ")" +
                                (tag == "X" ? "; run prepare first" : "; run augment first"));
  }
  return LoadManifest(path);
}

void RequireInstanceTag(const std::string& tag) {
  Require(kInstanceTags.count(tag) > 0, "unknown dataset instance '" + tag + "' (expected X, X_plus_XC or X_plus_XS)");
}

void SaveTrainDistribution(const DatasetManifest& m, const fs::path& path) {
  RecordFilter f;
  f.split = Split::kTrain;
  SaveDistributionCsv(ComputeClassDistribution(FilterManifest(m, f)), path);
}

DatasetManifest Select(const DatasetManifest& m, const std::string& label, std::optional<Split> split) {
  RecordFilter f;
  f.class_label = label;
  f.split = split;
  return FilterManifest(m, f);
}

bool IsImageFile(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> SortedEntries(const fs::path& dir, bool want_dirs) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (want_dirs ? e.is_directory() : (e.is_regular_file() && IsImageFile(e.path()))) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string Fixed(double v, int digits) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, r.ptr);
}

std::string Significant(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, r.ptr);
}

std::string OptionalCell(const std::optional<double>& v) { return v ? FormatReal(*v) : ""; }

double OptionalValue(const std::optional<double>& v) { return v ? *v : std::nan(""); }

std::unique_ptr<TrainState> LoadLatest(const ExperimentConfig& c, const std::string& label) {
  const auto dir = GanDir(c, label);
  auto ckpt = LatestCheckpoint(dir);
  if (!ckpt) Fail(ErrorCode::kState, "missing GAN checkpoint for class '" + label + "' in " + dir.string() + "; run train-gan first");
  return LoadCheckpoint(*ckpt);
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig::ExperimentConfig() { aug.output_side = data.side; }

void ExperimentConfig::Set(const std::string& key, const std::string& raw) {
  const auto dot = key.find('.');
  Require(dot != std::string::npos, "configuration key needs a section prefix: '" + key + "'");
  const std::string section = key.substr(0, dot), name = key.substr(dot + 1);
  const std::string value = Trim(raw);
  bool known = true;
  try {
    if (section == "paths") {
      if (name == "data_root") data_root = value;
      else if (name == "work_dir") work_dir = value;
      else known = false;
    } else if (section == "data") {
      if (name == "toy") data.toy = ParseToySource(value);
      else if (name == "seed") data.seed = static_cast<std::uint64_t>(ParseInt(value));
      else if (name == "side") data.side = static_cast<int>(ParseInt(value));
      else if (name == "per_domain") data.per_domain = static_cast<int>(ParseInt(value));
      else if (name == "majority_train") data.majority_train = static_cast<int>(ParseInt(value));
      else if (name == "minority_train") data.minority_train = static_cast<int>(ParseInt(value));
      else if (name == "test_per_class") data.test_per_class = static_cast<int>(ParseInt(value));
      else if (name == "test_fraction") data.test_fraction = ParseReal(value);
      else if (name == "healthy_label") data.healthy_label = value;
      else if (name == "frozen") { auto l = SplitList(value); data.frozen = {l.begin(), l.end()}; }
      else if (name == "target_per_class") data.target_per_class = ParseInt(value);
      else known = false;
    } else if (section == "gan") {
      if (name == "labels") gan_labels = SplitList(value);
      else if (name == "translate_batch") translate_batch = static_cast<int>(ParseInt(value));
      else known = gan.Set(name, value);
    } else if (section == "aug") {
      known = aug.Set(name, value);
    } else if (section == "classifier") {
      known = classifier.Set(name, value);
    } else if (section == "metrics") {
      if (name == "fid") metrics.fid = ParseBool(value);
      else if (name == "fid_tap") metrics.fid_tap = static_cast<int>(ParseInt(value));
      else if (name == "nima_command") metrics.nima_command = value;
      else known = false;
    } else if (section == "report") {
      if (name == "instances") report.instances = SplitList(value);
      else if (name == "charts") report.charts = ParseBool(value);
      else known = false;
    } else {
      known = false;
    }
  } catch (const Error& e) {
    Fail(ErrorCode::kInvalidArgument, "bad value for " + key + ": " + e.what());
  } catch (const std::exception& e) {
    Fail(ErrorCode::kInvalidArgument, "bad value for " + key + ": " + e.what());
  }
  Require(known, "unknown configuration key '" + key + "'");
}

KeyValues ExperimentConfig::ToKeyValues() const {
  KeyValues kv;
  kv["paths.data_root"] = data_root;
  kv["paths.work_dir"] = work_dir;
  kv["data.toy"] = std::string(ToString(data.toy));
  kv["data.seed"] = FormatInt(static_cast<std::int64_t>(data.seed));
  kv["data.side"] = FormatInt(data.side);
  kv["data.per_domain"] = FormatInt(data.per_domain);
  kv["data.majority_train"] = FormatInt(data.majority_train);
  kv["data.minority_train"] = FormatInt(data.minority_train);
  kv["data.test_per_class"] = FormatInt(data.test_per_class);
  kv["data.test_fraction"] = FormatReal(data.test_fraction);
  kv["data.healthy_label"] = data.healthy_label;
  kv["data.frozen"] = JoinList(data.frozen);
  kv["data.target_per_class"] = FormatInt(data.target_per_class);
  kv["gan.labels"] = JoinList(gan_labels);
  kv["gan.translate_batch"] = FormatInt(translate_batch);
  for (const auto& [k, v] : gan.ToKeyValues()) kv["gan." + k] = v;
  for (const auto& [k, v] : aug.ToKeyValues()) kv["aug." + k] = v;
  for (const auto& [k, v] : classifier.ToKeyValues()) kv["classifier." + k] = v;
  kv["metrics.fid"] = metrics.fid ? "true" : "false";
  kv["metrics.fid_tap"] = FormatInt(metrics.fid_tap);
  kv["metrics.nima_command"] = metrics.nima_command;
  kv["report.instances"] = JoinList(report.instances);
  kv["report.charts"] = report.charts ? "true" : "false";
  return kv;
}

std::string ExperimentConfig::Get(const std::string& key) const {
  const auto kv = ToKeyValues();
  auto it = kv.find(key);
  Require(it != kv.end(), "unknown configuration key '" + key + "'");
  return it->second;
}

std::string ExperimentConfig::ToText() const { return FormatKeyValues(ToKeyValues()); }

void ExperimentConfig::Validate() const {
  Require(!work_dir.empty(), "paths.work_dir must be set");
  Require(data.toy != ToySource::kNone || !data_root.empty(), "paths.data_root must be set when data.toy = none");
  if (data.toy != ToySource::kNone) {
    Require(data.side >= 16 && data.side % 4 == 0, "data.side must be a multiple of 4 and at least 16");
    Require(data.per_domain >= 1 && data.majority_train >= 1 && data.minority_train >= 1,
            "toy image counts must be positive");
    Require(data.test_per_class >= 0, "data.test_per_class must be non-negative");
  }
  Require(data.test_fraction >= 0.0 && data.test_fraction < 1.0, "data.test_fraction must lie in [0, 1)");
  Require(!data.healthy_label.empty(), "data.healthy_label must be set");
  Require(data.target_per_class >= 0, "data.target_per_class must be non-negative");
  Require(translate_batch >= 1, "gan.translate_batch must be positive");
  for (const auto& l : gan_labels) {
    Require(l != data.healthy_label, "gan.labels must not contain the healthy class");
  }
  for (const auto& t : report.instances) RequireInstanceTag(t);
  Require(!report.instances.empty(), "report.instances must not be empty");
  gan.Validate();
  aug.Validate();
  classifier.Validate();
}

fs::path ExperimentConfig::DataRoot() const {
  fs::path p(data_root);
  return p.is_absolute() ? p : base_dir / p;
}

fs::path ExperimentConfig::WorkDir() const {
  fs::path p(work_dir);
  return p.is_absolute() ? p : base_dir / p;
}

ExperimentConfig ExperimentConfig::FromText(std::string_view text, const fs::path& base_dir) {
  ExperimentConfig c;
  c.base_dir = base_dir;
  KeyValues kv;
  try {
    kv = ParseKeyValues(text);
  } catch (const Error& e) {
    Fail(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  for (const auto& [k, v] : kv) c.Set(k, v);
  return c;
}

ExperimentConfig ExperimentConfig::Load(const fs::path& path) {
  Require(fs::is_regular_file(path), "config file not found: " + path.string());
  const auto base = fs::absolute(path).parent_path();
  return FromText(ReadTextFile(path), base);
}

AugmentMode ParseAugmentMode(std::string_view text) {
  if (text == "classic") return AugmentMode::kClassic;
  if (text == "synthetic") return AugmentMode::kSynthetic;
  Fail(ErrorCode::kInvalidArgument, "augment mode must be classic or synthetic, got '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

fs::path InstancePath(const ExperimentConfig& c, std::string_view tag) {
  return c.WorkDir() / "instances" / (std::string(tag) + ".csv");
}
fs::path DistributionPath(const ExperimentConfig& c, std::string_view tag) {
  return c.WorkDir() / "instances" / ("class_distribution_" + std::string(tag) + ".csv");
}
fs::path GanDir(const ExperimentConfig& c, std::string_view label) { return c.WorkDir() / "gan" / std::string(label); }
fs::path ClassifierDir(const ExperimentConfig& c, std::string_view tag) {
  return c.WorkDir() / "classifier" / std::string(tag);
}
fs::path EvalDir(const ExperimentConfig& c, std::string_view tag) { return c.WorkDir() / "eval" / std::string(tag); }
fs::path GanMetricsPath(const ExperimentConfig& c) { return c.WorkDir() / "eval" / "gan_metrics.csv"; }
fs::path ReportDir(const ExperimentConfig& c) { return c.WorkDir() / "report"; }

std::optional<fs::path> LatestCheckpoint(const fs::path& dir) {
  if (!fs::is_directory(dir)) return std::nullopt;
  std::optional<fs::path> best;
  int best_epoch = -1;
  constexpr std::string_view kPrefix = "checkpoint_epoch";
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind(kPrefix, 0) != 0 || e.path().extension() != ".argan") continue;
    const auto digits = name.substr(kPrefix.size(), name.size() - kPrefix.size() - 6);
    int epoch = -1;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), epoch);
    if (ec != std::errc() || p != digits.data() + digits.size()) continue;
    if (epoch > best_epoch) best_epoch = epoch, best = e.path();
  }
  return best;
}

DatasetManifest ScanDataRoot(const fs::path& root, const DataOptions& options) {
  Require(fs::is_directory(root), "data root does not exist or is not a directory: " + root.string());
  DatasetManifest m;
  std::set<std::string> labels;
  auto add_class_dir = [&](const fs::path& dir, std::optional<Split> split) {
    const auto label = dir.filename().string();
    auto files = SortedEntries(dir, false);
    if (files.empty()) return;
    labels.insert(label);
    std::vector<bool> is_test(files.size(), false);
    if (!split && options.test_fraction > 0.0) {
      std::vector<size_t> order(files.size());
      std::iota(order.begin(), order.end(), 0);
      std::uint64_t h = 1469598103934665603ull;  // FNV-1a of the label: stable across label sets
      for (unsigned char ch : label) h = (h ^ ch) * 1099511628211ull;
      Rng rng = DeriveRng({options.seed, 0x5E17, h});
      std::shuffle(order.begin(), order.end(), rng);
      const auto n_test = static_cast<size_t>(std::floor(options.test_fraction * files.size()));
      for (size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;
    }
    for (size_t i = 0; i < files.size(); ++i) {
      ImageRecord r;
      r.path = fs::absolute(files[i]).string();
      r.class_label = label;
      r.domain = label == options.healthy_label ? Domain::kA : Domain::kB;
      r.split = split ? *split : (is_test[i] ? Split::kTest : Split::kTrain);
      m.records.push_back(r);
    }
  };
  try {
    if (fs::is_directory(root / "train") && fs::is_directory(root / "test")) {
      for (auto s : {Split::kTrain, Split::kTest}) {
        for (const auto& d : SortedEntries(root / std::string(ToString(s)), true)) add_class_dir(d, s);
      }
    } else {
      for (const auto& d : SortedEntries(root, true)) add_class_dir(d, std::nullopt);
    }
  } catch (const fs::filesystem_error& e) {
    Fail(ErrorCode::kIo, "cannot read data root " + root.string() + ": " + e.what());
  }
  Require(!m.records.empty(), "data root holds no class folders with PNG/JPEG images: " + root.string());
  m.label_set.assign(labels.begin(), labels.end());
  m.instance_tag = InstanceTag::kX;
  return m;
}

BalancePlan PlanFor(const ExperimentConfig& c, const DatasetManifest& x) {
  RecordFilter f;
  f.split = Split::kTrain;
  const auto dist = ComputeClassDistribution(FilterManifest(x, f));
  std::int64_t target = c.data.target_per_class;
  if (target == 0) {
    for (size_t i = 0; i < dist.labels().size(); ++i) {
      if (!c.data.frozen.count(dist.labels()[i])) target = std::max(target, dist.counts()[i]);
    }
  }
  return MakeBalancePlan(dist, std::max<std::int64_t>(target, 1), c.data.frozen);
}

std::vector<std::string> GanTargets(const ExperimentConfig& c, const DatasetManifest& x) {
  std::vector<std::string> targets;
  if (!c.gan_labels.empty()) {
    for (const auto& l : c.gan_labels) {
      Require(x.HasLabel(l), "gan.labels names a class absent from the data: '" + l + "'");
      targets.push_back(l);
    }
  } else {
    const auto plan = PlanFor(c, x);
    for (const auto& label : x.label_set) {
      if (plan.at(label) > 0 && label != c.data.healthy_label) targets.push_back(label);
    }
  }
  Require(!targets.empty(), "no GAN target classes: the balance plan adds nothing; set gan.labels explicitly");
  return targets;
}

// ---------------------------------------------------------------------------

void CmdPrepare(const ExperimentConfig& c, const LogSink& sink) {
  c.Validate();
  const Logger log(c, sink, "prepare");
  DatasetManifest x;
  const auto toy_dir = c.WorkDir() / "toy";
  switch (c.data.toy) {
    case ToySource::kClasses:
      x = MakeToyClasses(c.data.seed, DefaultToyClasses(c.data.majority_train, c.data.minority_train, c.data.test_per_class),
                         c.data.side, toy_dir);
      break;
    case ToySource::kDomains: {
      auto [a, b] = MakeToyDomains(c.data.seed, c.data.per_domain + c.data.test_per_class, c.data.side, toy_dir);
      for (auto* d : {&a, &b}) {
        for (size_t i = static_cast<size_t>(c.data.per_domain); i < d->records.size(); ++i) d->records[i].split = Split::kTest;
        x.records.insert(x.records.end(), d->records.begin(), d->records.end());
      }
      x.label_set = {"diseased", "healthy"};
      break;
    }
    case ToySource::kNone:
      x = ScanDataRoot(c.DataRoot(), c.data);
      break;
  }
  for (const auto& f : c.data.frozen) Require(x.HasLabel(f), "data.frozen names an unknown class: '" + f + "'");
  x.instance_tag = InstanceTag::kX;
  x.Validate();
  MakeDirs(InstancePath(c, "X").parent_path());
  SaveManifest(x, InstancePath(c, "X"));
  SaveTrainDistribution(x, DistributionPath(c, "X"));

  const auto plan = PlanFor(c, x);
  RecordFilter f;
  f.split = Split::kTrain;
  const auto dist = ComputeClassDistribution(FilterManifest(x, f));
  CsvWriter w({"label", "train_count", "augment", "frozen"});
  for (size_t i = 0; i < dist.labels().size(); ++i) {
    const auto& l = dist.labels()[i];
    w.Add({l, FormatInt(dist.counts()[i]), FormatInt(plan.at(l)), c.data.frozen.count(l) ? "true" : "false"});
  }
  w.Save(c.WorkDir() / "instances" / "balance_plan.csv");
  WriteTextFile(c.WorkDir() / "experiment_config.txt", c.ToText());
  log("X instance: " + FormatInt(static_cast<std::int64_t>(x.records.size())) + " records, " +
      FormatInt(static_cast<std::int64_t>(x.label_set.size())) + " classes -> " + InstancePath(c, "X").string());
}

void CmdTrainGan(const ExperimentConfig& c, bool resume, const LogSink& sink) {
  c.Validate();
  const Logger log(c, sink, "train-gan");
  const auto x = LoadInstance(c, "X");
  const auto source = Select(x, c.data.healthy_label, Split::kTrain);
  Require(!source.records.empty(), "no training images for the healthy class '" + c.data.healthy_label + "'");
  for (const auto& label : GanTargets(c, x)) {
    const auto target = Select(x, label, Split::kTrain);
    Require(!target.records.empty(), "no training images for class '" + label + "'");
    const auto dir = GanDir(c, label);
    TrainOptions opts;
    opts.out_dir = dir;
    opts.on_epoch_end = [&](const TrainState& s) {
      const auto& h = s.history.back().losses;
      log(label + " epoch " + FormatInt(s.epoch) + "/" + FormatInt(s.config.epochs) + " total " + FormatReal(h.total) +
          " cycle " + FormatReal(h.cycle));
    };
    auto latest = resume ? LatestCheckpoint(dir) : std::nullopt;
    if (latest) {
      auto state = LoadCheckpoint(*latest);
      Require(state->config.ToText() == c.gan.ToText(),
              "cannot resume " + latest->string() + ": its training configuration differs from the current one");
      log(label + ": resuming from epoch " + FormatInt(state->epoch));
      ContinueTraining(*state, source, target, opts);
    } else {
      ResetDir(dir);
      log(label + ": training " + c.data.healthy_label + " -> " + label);
      Train(source, target, c.gan, opts);
    }
  }
}

void CmdTranslate(const ExperimentConfig& c, const TranslateRequest& request, const LogSink& sink) {
  c.Validate();
  const Logger log(c, sink, "translate");
  Require(!request.label.empty(), "translate needs a target class label");
  auto state = request.checkpoint.empty() ? LoadLatest(c, request.label) : LoadCheckpoint(request.checkpoint);
  DatasetManifest input;
  if (request.input.empty()) {
    input = Select(LoadInstance(c, "X"), c.data.healthy_label, Split::kTrain);
  } else {
    input = LoadManifest(request.input);
  }
  Require(!input.records.empty(), "nothing to translate: the input holds no records");
  const auto out = request.out_dir.empty() ? c.WorkDir() / "translated" / request.label : request.out_dir;
  MakeDirs(out);
  TranslateOptions opts{request.label, Domain::kB, state->config.image_side, c.translate_batch};
  DatasetManifest result;
  result.records = Translate(state->g_ab, input, out, opts);
  result.label_set = {request.label};
  SaveManifest(result, out / "translated.csv");
  log(FormatInt(static_cast<std::int64_t>(result.records.size())) + " images -> " + out.string());
}

void CmdAugment(const ExperimentConfig& c, AugmentMode mode, const LogSink& sink) {
  c.Validate();
  const Logger log(c, sink, "augment");
  const auto x = LoadInstance(c, "X");
  const auto plan = PlanFor(c, x);
  std::vector<ImageRecord> additions;
  const bool classic = mode == AugmentMode::kClassic;
  const auto healthy = Select(x, c.data.healthy_label, Split::kTrain);

  for (size_t li = 0; li < x.label_set.size(); ++li) {
    const auto& label = x.label_set[li];
    const auto want = static_cast<size_t>(plan.at(label));
    if (want == 0) continue;
    std::vector<ImageRecord> made;
    if (classic) {
      const auto src = Select(x, label, Split::kTrain).records;
      Require(!src.empty(), "class '" + label + "' has no training images to augment");
      const auto root = c.WorkDir() / "classic" / label;
      ResetDir(root);
      // Repeat whole rounds with fresh seeds until the plan is met, then keep
      // the first `want` outputs.
      // Realized per-image counts go to counts.csv for auditing.
      CsvWriter audit({"round", "source", "rotations", "distortions", "flips", "elastic_variants", "outputs"});
      for (std::uint64_t round = 0; made.size() < want; ++round) {
        AugConfig a = c.aug;
        a.seed = DeriveRng({c.aug.seed, 0xA06, li, round})();
        const auto round_name = "round" + FormatInt(static_cast<std::int64_t>(round));
        auto res = ClassicAugment(src, a, root / round_name);
        for (size_t i = 0; i < src.size(); ++i) {
          const auto& n = res.counts[i];
          audit.Add({round_name, fs::path(src[i].path).filename().string(), FormatInt(n.rotations),
                     FormatInt(n.distortions), FormatInt(n.flips), FormatInt(n.elastic_variants),
                     FormatInt(n.Expected())});
        }
        made.insert(made.end(), res.records.begin(), res.records.end());
      }
      audit.Save(root / "counts.csv");
    } else {
      auto state = LoadLatest(c, label);
      Require(!healthy.records.empty(), "no healthy training images to translate");
      DatasetManifest src = healthy;
      if (src.records.size() > want) src.records.resize(want);
      if (src.records.size() < want) {
        log(label + ": plan asks for " + FormatInt(static_cast<std::int64_t>(want)) + " images but only " +
            FormatInt(static_cast<std::int64_t>(src.records.size())) + " healthy sources exist; capping");
      }
      const auto out = c.WorkDir() / "synthetic" / label;
      ResetDir(out);
      TranslateOptions opts{label, Domain::kB, state->config.image_side, c.translate_batch};
      made = Translate(state->g_ab, src, out, opts);
    }
    if (made.size() > want) made.resize(want);
    log(label + ": +" + FormatInt(static_cast<std::int64_t>(made.size())) + (classic ? " classic" : " synthetic"));
    additions.insert(additions.end(), made.begin(), made.end());
  }
  const auto tag = classic ? InstanceTag::kXPlusXC : InstanceTag::kXPlusXS;
  const auto instance = BuildInstance(x, additions, tag);
  const std::string name(ToString(tag));
  SaveManifest(instance, InstancePath(c, name));
  SaveTrainDistribution(instance, DistributionPath(c, name));
  log(name + ": " + FormatInt(static_cast<std::int64_t>(instance.records.size())) + " records");
}

void CmdTrainClassifier(const ExperimentConfig& c, const std::string& tag, const LogSink& sink) {
  c.Validate();
  RequireInstanceTag(tag);
  const Logger log(c, sink, "train-classifier");
  const auto m = LoadInstance(c, tag);
  RecordFilter f;
  f.split = Split::kTest;
  const auto heldout = FilterManifest(m, f).records;
  log(tag + ": " + c.classifier.arch + ", " + FormatInt(c.classifier.epochs) + " epochs");
  auto run = TrainClassifier(m, c.classifier, heldout);
  const auto dir = ClassifierDir(c, tag);
  MakeDirs(dir);
  run.model->Save(dir / "model.argan", c.classifier.input_side);
  SaveClassifierHistory(run.history, dir / "history.csv");
  if (!run.history.empty()) {
    log(tag + ": final train accuracy " + FormatReal(run.history.back().train_accuracy));
  }
}

namespace {

void EvaluateGan(const ExperimentConfig& c, const Logger& log) {
  const auto x = LoadInstance(c, "X");
  auto healthy = Select(x, c.data.healthy_label, Split::kTest);
  Require(healthy.records.size() >= 2, "GAN evaluation needs at least two healthy test images");
  std::vector<MetricRow> rows;
  const auto scorer = c.metrics.nima_command.empty() ? ImageScorer{} : CommandScorer(c.metrics.nima_command);
  for (const auto& label : GanTargets(c, x)) {
    auto state = LoadLatest(c, label);
    const int side = state->config.image_side;
    const auto out = c.WorkDir() / "eval" / "gan" / label;
    ResetDir(out);
    const auto fakes = Translate(state->g_ab, healthy, out, {label, Domain::kB, side, c.translate_batch});
    if (c.metrics.fid) {
      const auto real = Select(x, label, Split::kTest).records;
      Require(real.size() >= 2, "GAN evaluation needs at least two test images of class '" + label + "'");
      torch::NoGradGuard no_grad;
      const auto& f = state->feature;
      const auto fx = ExtractFeatures(f, c.metrics.fid_tap, LoadBatch(fakes, side), "translated");
      const auto fy = ExtractFeatures(f, c.metrics.fid_tap, LoadBatch(real, side), "real");
      const auto fa = ExtractFeatures(f, c.metrics.fid_tap, LoadBatch(healthy.records, side), "source");
      rows.push_back({"fid_translated:" + label, Fid(fx, fy), static_cast<std::int64_t>(fakes.size()),
                      "G_AB(" + c.data.healthy_label + " test) vs " + label + " test"});
      rows.push_back({"fid_source:" + label, Fid(fa, fy), static_cast<std::int64_t>(healthy.records.size()),
                      c.data.healthy_label + " test vs " + label + " test"});
    }
    if (scorer) {
      std::vector<std::string> paths;
      for (const auto& r : fakes) paths.push_back(r.path);
      const auto nima = NimaScore(scorer, paths);
      rows.push_back({"nima:" + label, nima.mean, nima.n, "std=" + FormatReal(nima.std)});
    }
    log(label + ": evaluated " + FormatInt(static_cast<std::int64_t>(fakes.size())) + " translations");
  }
  SaveMetricsCsv(rows, GanMetricsPath(c));
}

}  // namespace

void CmdEvaluate(const ExperimentConfig& c, const std::string& instance, const LogSink& sink) {
  c.Validate();
  const Logger log(c, sink, "evaluate");
  if (instance == "gan") {
    EvaluateGan(c, log);
    return;
  }
  RequireInstanceTag(instance);
  const auto model_path = ClassifierDir(c, instance) / "model.argan";
  if (!fs::exists(model_path)) {
    Fail(ErrorCode::kState, "missing classifier for " + instance + " (" + model_path.string() + "); run train-classifier first");
  }
  int side = 0;
  auto model = Classifier::Load(model_path, &side);
  RecordFilter f;
  f.split = Split::kTest;
  const auto test = FilterManifest(LoadInstance(c, "X"), f).records;
  Require(!test.empty(), "the X instance has no test records");
  const auto report = Evaluate(model, test, side);
  const auto dir = EvalDir(c, instance);
  MakeDirs(dir);
  SaveEvalReport(report, dir / "report.csv", dir / "confusion.csv");
  log(instance + ": accuracy " + FormatReal(report.accuracy) + " on " + FormatInt(report.total) + " test images");
}

// ---------------------------------------------------------------------------

const std::vector<ReferenceValue>& ReferenceValues() {
  static const std::vector<ReferenceValue> kValues = {
      {"tomato disease recognition accuracy (%)", "X -> X_plus_XC", "80.9 → 81.7 (+0.8)"},
      {"tomato disease recognition accuracy (%)", "X -> X_plus_XS", "80.9 → 86.1 (+5.2)"},
      {"Cityscapes labels->photos FCN-score (ppa/pca/IoU)", "CoGAN", "0.40/0.10/0.06"},
      {"Cityscapes labels->photos FCN-score (ppa/pca/IoU)", "BiGAN", "0.19/0.06/0.02"},
      {"Cityscapes labels->photos FCN-score (ppa/pca/IoU)", "SimGAN", "0.20/0.10/0.04"},
      {"Cityscapes labels->photos FCN-score (ppa/pca/IoU)", "CycleGAN", "0.52/0.17/0.11"},
      {"Cityscapes labels->photos FCN-score (ppa/pca/IoU)", "ARL-GAN", "0.68/0.20/0.15"},
      {"Cityscapes labels->photos FCN-score (ppa/pca/IoU)", "pix2pix", "0.71/0.25/0.18"},
      {"Cityscapes labels->photos FCN-score (ppa/pca/IoU)", "Cityscapes test set", "0.80/0.26/0.21"},
      {"healthy->powdery mildew 256x256 (FID / NIMA)", "CycleGAN (res6)", "75.81 / 4.842 ± 1.841"},
      {"healthy->powdery mildew 256x256 (FID / NIMA)", "CycleGAN (res9)", "92.26 / 4.584 ± 1.860"},
      {"healthy->powdery mildew 256x256 (FID / NIMA)", "CycleGAN (res12)", "88.86 / 4.804 ± 1.831"},
      {"healthy->powdery mildew 256x256 (FID / NIMA)", "CycleGAN (U-net)", "86.16 / 4.612 ± 1.859"},
      {"healthy->powdery mildew 256x256 (FID / NIMA)", "AR-GAN (res9, ARL forward)", "55.18 / 4.894 ± 1.806"},
      {"healthy->powdery mildew 256x256 (FID / NIMA)", "AR-GAN (U-net, ARL forward)", "47.15 / 4.909 ± 1.803"},
      {"healthy->powdery mildew 256x256 (FID / NIMA)", "AR-GAN (res9, ARL both)", "54.65 / 4.911 ± 1.809"},
      {"Cityscapes labels->photos 256x256 (FID / NIMA)", "CycleGAN (res6)", "66.95 / 4.639 ± 1.697"},
      {"Cityscapes labels->photos 256x256 (FID / NIMA)", "CycleGAN (res9)", "74.25 / 4.588 ± 1.672"},
      {"Cityscapes labels->photos 256x256 (FID / NIMA)", "CycleGAN (res12)", "66.68 / 4.623 ± 1.681"},
      {"Cityscapes labels->photos 256x256 (FID / NIMA)", "AR-GAN (res9, ARL forward)", "56.23 / 4.643 ± 1.652"},
  };
  return kValues;
}

std::string FormatAccuracyChange(double base_percent, double new_percent) {
  const double a = std::round(base_percent * 10) / 10, b = std::round(new_percent * 10) / 10;
  double d = b - a;
  if (std::abs(d) < 0.05) d = 0.0;
  return Fixed(a, 1) + " → " + Fixed(b, 1) + " (" + (d >= 0 ? "+" : "") + Fixed(d, 1) + ")";
}

void CmdReport(const ExperimentConfig& c, const LogSink& sink) {
  c.Validate();
  const Logger log(c, sink, "report");
  std::map<std::string, EvalReport> reports;
  for (const auto& tag : c.report.instances) {
    const auto path = EvalDir(c, tag) / "confusion.csv";
    if (!fs::exists(path)) {
      Fail(ErrorCode::kState, "missing evaluation for " + tag + " (" + path.string() + "); run evaluate first");
    }
    reports.emplace(tag, LoadConfusionCsv(path));
  }
  const auto& labels = reports.at(c.report.instances.front()).labels;
  for (const auto& [tag, r] : reports) {
    Require(r.labels == labels, "evaluations disagree on the class list: " + tag);
  }
  const auto dir = ReportDir(c);
  MakeDirs(dir);
  const auto has = [&](const char* t) { return reports.count(t) > 0; };

  // Per-class precision and accuracy per instance.
  CsvRow header{std::string(kPrecisionTableHeader)};
  for (const auto& t : c.report.instances) header.push_back(t);
  CsvWriter precision(header);
  std::vector<BarSeries> precision_series;
  for (const auto& t : c.report.instances) precision_series.push_back({t, {}});
  for (size_t k = 0; k < labels.size(); ++k) {
    CsvRow row{labels[k]};
    for (size_t i = 0; i < c.report.instances.size(); ++i) {
      const auto& r = reports.at(c.report.instances[i]);
      row.push_back(r.precision_undefined[k] ? "" : FormatReal(r.precision[k]));
      precision_series[i].values.push_back(r.precision_undefined[k] ? std::nan("") : r.precision[k]);
    }
    precision.Add(row);
  }
  CsvRow acc_row{std::string(kAccuracyRowLabel)};
  for (size_t i = 0; i < c.report.instances.size(); ++i) {
    const double acc = reports.at(c.report.instances[i]).accuracy;
    acc_row.push_back(FormatReal(acc));
    precision_series[i].values.push_back(acc);
  }
  precision.Add(acc_row);
  precision.Save(dir / "precision_table.csv");

  std::string summary = "Recognition accuracy on the shared test set (local run)\n";
  for (const auto& t : c.report.instances) {
    summary += "  " + t + ": " + Fixed(100 * reports.at(t).accuracy, 1) + "%\n";
  }
  for (const char* t : {"X_plus_XC", "X_plus_XS"}) {
    if (has("X") && has(t)) {
      summary += "  X -> " + std::string(t) + ": " +
                 FormatAccuracyChange(100 * reports.at("X").accuracy, 100 * reports.at(t).accuracy) + "\n";
    }
  }

  // True-positive relative change against X.
  std::vector<BarSeries> tp_series;
  if (has("X") && (has("X_plus_XC") || has("X_plus_XS"))) {
    const auto& base = reports.at("X");
    std::vector<std::optional<double>> none(labels.size());
    const auto tc = has("X_plus_XC") ? TpChange(base, reports.at("X_plus_XC")) : none;
    const auto ts = has("X_plus_XS") ? TpChange(base, reports.at("X_plus_XS")) : none;
    CsvWriter w(SplitCsvRow(kTpChangeHeader));
    tp_series = {{"X_plus_XC vs X", {}}, {"X_plus_XS vs X", {}}};
    for (size_t k = 0; k < labels.size(); ++k) {
      w.Add({labels[k], OptionalCell(tc[k]), OptionalCell(ts[k])});
      tp_series[0].values.push_back(OptionalValue(tc[k]));
      tp_series[1].values.push_back(OptionalValue(ts[k]));
    }
    w.Save(dir / "tp_change.csv");
  }
  // False-positive relative-change triple.
  std::vector<BarSeries> fp_series;
  if (has("X") && has("X_plus_XC") && has("X_plus_XS")) {
    const auto rows = FpChange(reports.at("X"), reports.at("X_plus_XC"), reports.at("X_plus_XS"));
    CsvWriter w(SplitCsvRow(kFpChangeHeader));
    fp_series = {{"X_plus_XC vs X", {}}, {"X_plus_XS vs X", {}}, {"X_plus_XS vs X_plus_XC", {}}};
    for (size_t k = 0; k < labels.size(); ++k) {
      const auto& r = rows[k];
      w.Add({labels[k], OptionalCell(r.classic_vs_base), OptionalCell(r.synthetic_vs_base),
             OptionalCell(r.synthetic_vs_classic)});
      fp_series[0].values.push_back(OptionalValue(r.classic_vs_base));
      fp_series[1].values.push_back(OptionalValue(r.synthetic_vs_base));
      fp_series[2].values.push_back(OptionalValue(r.synthetic_vs_classic));
    }
    w.Save(dir / "fp_change.csv");
  }

  // Translator quality, when evaluated.
  if (fs::exists(GanMetricsPath(c))) {
    struct Row {
      std::string fid, source_fid, nima;
    };
    std::map<std::string, Row> by_label;
    std::vector<std::string> order;
    for (const auto& m : LoadMetricsCsv(GanMetricsPath(c))) {
      const auto colon = m.metric.find(':');
      if (colon == std::string::npos) continue;
      const auto kind = m.metric.substr(0, colon), label = m.metric.substr(colon + 1);
      if (!by_label.count(label)) order.push_back(label), by_label[label] = {};
      if (kind == "fid_translated") by_label[label].fid = Significant(m.value);
      if (kind == "fid_source") by_label[label].source_fid = Significant(m.value);
      if (kind == "nima") {
        const auto std_text = m.notes.rfind("std=", 0) == 0 ? m.notes.substr(4) : "";
        by_label[label].nima = Fixed(m.value, 3) + " ± " + (std_text.empty() ? "?" : Fixed(ParseReal(std_text), 3));
      }
    }
    CsvWriter w(SplitCsvRow(kGanTableHeader));
    auto or_na = [](const std::string& s) { return s.empty() ? std::string("n/a") : s; };
    for (const auto& l : order) {
      const auto& r = by_label[l];
      w.Add({"AR-GAN " + c.data.healthy_label + "->" + l, or_na(r.fid), or_na(r.nima)});
      // Untranslated sources against the same targets: the distance to beat.
      if (!r.source_fid.empty()) w.Add({"untranslated " + c.data.healthy_label + " vs " + l, r.source_fid, "n/a"});
    }
    w.Save(dir / "gan_table.csv");
  }

  CsvWriter ref(SplitCsvRow(kReferenceHeader));
  summary += "\nPublished reference values (not reproduced here; different data and scale)\n";
  for (const auto& r : ReferenceValues()) {
    ref.Add({r.source, r.item, r.value, std::string(kReferenceStatus)});
    summary += "  [reference] " + r.source + " | " + r.item + ": " + r.value + "\n";
  }
  ref.Save(dir / "reference_values.csv");
  WriteTextFile(dir / "summary.txt", summary);

  if (c.report.charts) {
    auto cats = labels;
    cats.push_back("accuracy");
    SaveBarChart(dir / "precision_chart.png", "Class precision and total accuracy", cats, precision_series);
    if (!tp_series.empty()) SaveBarChart(dir / "tp_change_chart.png", "Relative change of true positives", labels, tp_series);
    if (!fp_series.empty()) SaveBarChart(dir / "fp_change_chart.png", "Relative change of false positives", labels, fp_series);
  }
  log("report written to " + dir.string());
}

}  // namespace argan
