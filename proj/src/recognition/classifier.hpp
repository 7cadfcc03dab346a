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
#ifndef ARGAN_RECOGNITION_CLASSIFIER_HPP_
#define ARGAN_RECOGNITION_CLASSIFIER_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <torch/types.h>

#include "common/config.hpp"
#include "core_data/manifest.hpp"
#include "networks/parameter_store.hpp"

namespace argan {

struct ClassifierConfig {
  // "resnet50": bottleneck stages [3,4,6,3], widths 64..512, expansion 4.
  // "resnet-mini": one bottleneck per stage at a quarter of the width.
  std::string arch = "resnet50";
  int batch_size = 32;
  double lr = 1e-3;
  int epochs = 300;
  double momentum = 0.9;
  bool nesterov = true;
  int input_side = 256;
  std::uint64_t seed = 0;
  std::string pretrained;  // optional classifier archive; the head is re-initialized

  void Validate() const;
  bool Set(const std::string& key, const std::string& value);
  KeyValues ToKeyValues() const;
};

// Bottleneck residual classifier: 7×7/2 stem, 3×3/2 max-pool, four stages
// of 1×1–3×3–1×1 blocks with batch normalization (stride on the 3×3 conv),
// global average pooling and a linear head.
class Classifier {
 public:
  Classifier(std::string arch, std::vector<std::string> labels, std::uint64_t seed);

  const std::string& arch() const { return arch_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int n_classes() const { return static_cast<int>(labels_.size()); }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  std::int64_t ParamCount() const { return params_.ElementCount(); }

  // Batch statistics (and running-average updates) when training.
  torch::Tensor Forward(const torch::Tensor& x, bool training);

  void Save(const std::filesystem::path& path, int input_side) const;
  static Classifier Load(const std::filesystem::path& path, int* input_side = nullptr);
  // Copies every same-named, same-shaped entry except the head.
  void ImportBackbone(const Classifier& other);

 private:
  struct ConvBn {
    size_t conv = 0;
    size_t gamma = 0, beta = 0, mean = 0, var = 0;
    int64_t stride = 1;
    int64_t padding = 0;
  };
  struct Bottleneck {
    ConvBn a, b, c;
    std::optional<ConvBn> down;
  };

  ConvBn MakeConvBn(const std::string& name, int in, int out, int kernel, int stride);
  torch::Tensor Apply(const ConvBn& cb, const torch::Tensor& x, bool training, bool relu);

  std::string arch_;
  std::vector<std::string> labels_;
  ParameterStore params_;
  ConvBn stem_;
  std::vector<Bottleneck> blocks_;
  size_t fc_w_ = 0, fc_b_ = 0;
};

struct ClassifierEpoch {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double heldout_accuracy = 0.0;  // NaN without held-out records
};

struct ClassifierRun {
  std::unique_ptr<Classifier> model;
  std::vector<ClassifierEpoch> history;
};

// Cross-entropy training with Nesterov SGD on the train-split records.
ClassifierRun TrainClassifier(const DatasetManifest& instance, const ClassifierConfig& config,
                              const std::vector<ImageRecord>& heldout = {});

void SaveClassifierHistory(const std::vector<ClassifierEpoch>& history, const std::filesystem::path& path);

// Truth in rows, prediction in columns.
struct EvalReport {
  std::vector<std::string> labels;
  std::vector<std::vector<std::int64_t>> confusion;
  std::vector<std::int64_t> tp;
  std::vector<std::int64_t> fp;
  std::vector<double> precision;
  std::vector<bool> precision_undefined;  // nothing predicted as the class
  double accuracy = 0.0;
  std::int64_t total = 0;

  static EvalReport FromConfusion(std::vector<std::string> labels, std::vector<std::vector<std::int64_t>> confusion);
  static EvalReport FromPredictions(std::vector<std::string> labels, const std::vector<int>& truth,
                                    const std::vector<int>& predicted);
};

std::vector<int> Predict(Classifier& model, const std::vector<ImageRecord>& records, int input_side);
EvalReport Evaluate(Classifier& model, const std::vector<ImageRecord>& records, int input_side);

inline constexpr std::string_view kEvalHeader = "label,tp,fp,precision";
inline constexpr std::string_view kEvalSummaryLabel = "(total)";
void SaveEvalReport(const EvalReport& report, const std::filesystem::path& report_csv,
                    const std::filesystem::path& confusion_csv);
EvalReport LoadConfusionCsv(const std::filesystem::path& confusion_csv);

// (aug.tp − base.tp)/base.tp per class; empty optional when base.tp is 0.
std::vector<std::optional<double>> TpChange(const EvalReport& base, const EvalReport& aug);

struct FpChangeRow {
  std::optional<double> classic_vs_base;    // (fp(X+X_C) − fp(X)) / fp(X)
  std::optional<double> synthetic_vs_base;  // (fp(X+X_S) − fp(X)) / fp(X)
  std::optional<double> synthetic_vs_classic;
};
std::vector<FpChangeRow> FpChange(const EvalReport& base, const EvalReport& aug_c, const EvalReport& aug_s);

}  // namespace argan

#endif  // ARGAN_RECOGNITION_CLASSIFIER_HPP_
