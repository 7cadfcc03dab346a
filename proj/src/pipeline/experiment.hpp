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
#ifndef ARGAN_PIPELINE_EXPERIMENT_HPP_
#define ARGAN_PIPELINE_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "classic_aug/classic_aug.hpp"
#include "common/config.hpp"
#include "core_data/manifest.hpp"
#include "recognition/classifier.hpp"
#include "training/trainer.hpp"

namespace argan {

// Where the X instance comes from: a directory of class folders, or one of
// the procedural toy datasets.
enum class ToySource { kNone, kDomains, kClasses };

struct DataOptions {
  ToySource toy = ToySource::kNone;
  std::uint64_t seed = 1;
  int side = 64;
  int per_domain = 200;  // toy domains, train images per domain
  int majority_train = 40;
  int minority_train = 8;
  int test_per_class = 20;
  // Share of each class held out when the data root has no train/ test/
  // split folders.
  double test_fraction = 0.2;
  std::string healthy_label = "healthy";
  std::set<std::string> frozen;
  // 0: balance up to the largest non-frozen class.
  std::int64_t target_per_class = 0;
};

struct MetricOptions {
  bool fid = true;
  int fid_tap = -1;
  std::string nima_command;  // empty: NIMA skipped
};

struct ReportOptions {
  std::vector<std::string> instances = {"X", "X_plus_XC", "X_plus_XS"};
  bool charts = true;
};

// Every setting of one experiment. Keys are "<section>.<name>"; sections
// are paths, data, gan, aug, classifier, metrics and report. Relative
// paths resolve against base_dir (the config file's directory).
struct ExperimentConfig {
  std::filesystem::path base_dir;
  std::string data_root;
  std::string work_dir = "work";
  DataOptions data;
  TrainConfig gan;
  std::vector<std::string> gan_labels;  // empty: every class the plan grows
  int translate_batch = 4;
  AugConfig aug;
  ClassifierConfig classifier;
  MetricOptions metrics;
  ReportOptions report;

  ExperimentConfig();

  // Throws kInvalidArgument naming the key when it is unknown or its value
  // does not parse.
  void Set(const std::string& key, const std::string& value);
  std::string Get(const std::string& key) const;
  KeyValues ToKeyValues() const;
  std::string ToText() const;
  void Validate() const;

  std::filesystem::path DataRoot() const;
  std::filesystem::path WorkDir() const;

  static ExperimentConfig FromText(std::string_view text, const std::filesystem::path& base_dir);
  static ExperimentConfig Load(const std::filesystem::path& path);
};

// Progress lines go to the sink (if any) and, time-stamped, to
// <work_dir>/argan.log; nothing else a command writes carries a timestamp.
using LogSink = std::function<void(const std::string&)>;

enum class AugmentMode { kClassic, kSynthetic };
AugmentMode ParseAugmentMode(std::string_view text);

// Work directory layout.
std::filesystem::path InstancePath(const ExperimentConfig& c, std::string_view tag);
std::filesystem::path DistributionPath(const ExperimentConfig& c, std::string_view tag);
std::filesystem::path GanDir(const ExperimentConfig& c, std::string_view label);
std::filesystem::path ClassifierDir(const ExperimentConfig& c, std::string_view tag);
std::filesystem::path EvalDir(const ExperimentConfig& c, std::string_view tag);
std::filesystem::path GanMetricsPath(const ExperimentConfig& c);
std::filesystem::path ReportDir(const ExperimentConfig& c);

// Highest-epoch checkpoint in dir, if any.
std::optional<std::filesystem::path> LatestCheckpoint(const std::filesystem::path& dir);

// Scans a data root laid out as <root>/<label>/* or
// <root>/{train,test}/<label>/*. Files are taken in sorted order.
DatasetManifest ScanDataRoot(const std::filesystem::path& root, const DataOptions& options);

// Classes the GAN stage trains a translator for.
std::vector<std::string> GanTargets(const ExperimentConfig& c, const DatasetManifest& x);
BalancePlan PlanFor(const ExperimentConfig& c, const DatasetManifest& x);

void CmdPrepare(const ExperimentConfig& c, const LogSink& log = {});
void CmdTrainGan(const ExperimentConfig& c, bool resume, const LogSink& log = {});
struct TranslateRequest {
  std::string label;               // selects the GAN directory
  std::filesystem::path checkpoint;  // empty: latest for label
  std::filesystem::path input;       // manifest; empty: healthy train records of X
  std::filesystem::path out_dir;     // empty: <work>/translated/<label>
};
void CmdTranslate(const ExperimentConfig& c, const TranslateRequest& request, const LogSink& log = {});
void CmdAugment(const ExperimentConfig& c, AugmentMode mode, const LogSink& log = {});
void CmdTrainClassifier(const ExperimentConfig& c, const std::string& instance, const LogSink& log = {});
// instance "gan" evaluates the translators (FID, optional NIMA) instead.
void CmdEvaluate(const ExperimentConfig& c, const std::string& instance, const LogSink& log = {});
void CmdReport(const ExperimentConfig& c, const LogSink& log = {});

// Report pieces, exposed for tests.
inline constexpr std::string_view kPrecisionTableHeader = "label";  // + one column per instance
inline constexpr std::string_view kAccuracyRowLabel = "(accuracy)";
inline constexpr std::string_view kTpChangeHeader = "label,classic_vs_base,synthetic_vs_base";
inline constexpr std::string_view kFpChangeHeader = "label,classic_vs_base,synthetic_vs_base,synthetic_vs_classic";
inline constexpr std::string_view kGanTableHeader = "model,fid,nima";
inline constexpr std::string_view kReferenceHeader = "source,item,value,status";
inline constexpr std::string_view kReferenceStatus = "reference value, not reproduced";

struct ReferenceValue {
  std::string source;
  std::string item;
  std::string value;
};
const std::vector<ReferenceValue>& ReferenceValues();

// "a → b (+d)" with one decimal, in percent.
std::string FormatAccuracyChange(double base_percent, double new_percent);

}  // namespace argan

#endif  // ARGAN_PIPELINE_EXPERIMENT_HPP_
