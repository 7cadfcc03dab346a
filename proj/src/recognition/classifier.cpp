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
#include "recognition/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <ATen/ATen.h>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "core_data/image_io.hpp"
#include "networks/archive.hpp"
#include "training/optim.hpp"

namespace argan {

namespace fs = std::filesystem;

namespace {

constexpr double kBnMomentum = 0.1;
constexpr double kBnEps = 1e-5;

struct ArchShape {
  int width;
  std::vector<int> blocks;
};

ArchShape ShapeOf(const std::string& arch) {
  if (arch == "resnet50") return {64, {3, 4, 6, 3}};
  if (arch == "resnet-mini") return {16, {1, 1, 1, 1}};
  Fail(ErrorCode::kInvalidArgument, "unknown classifier arch '" + arch + "'");
}

std::string JoinLabels(const std::vector<std::string>& labels) {
  std::string out;
  for (const auto& l : labels) out += l + "\n";
  return out;
}

std::vector<std::string> SplitLabels(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    out.push_back(text.substr(pos, end - pos));
    pos = end == std::string::npos ? text.size() : end + 1;
  }
  return out;
}

int LabelIndex(const std::vector<std::string>& labels, const std::string& label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  Require(it != labels.end(), "unknown label '" + label + "'");
  return static_cast<int>(it - labels.begin());
}

std::vector<cv::Mat> LoadImages(const std::vector<ImageRecord>& records, int side) {
  std::vector<cv::Mat> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(ResizeBicubic(ReadRgb(r.path), side));
  return out;
}

torch::Tensor Stack(const std::vector<cv::Mat>& images, const std::vector<size_t>& idx) {
  std::vector<torch::Tensor> t;
  t.reserve(idx.size());
  for (size_t i : idx) t.push_back(ImageToTensor(images[i]));
  return torch::stack(t);
}

std::optional<double> Relative(std::int64_t from, std::int64_t to) {
  if (from == 0) return std::nullopt;
  return static_cast<double>(to - from) / static_cast<double>(from);
}

void RequireSameLabels(const EvalReport& a, const EvalReport& b) {
  Require(a.labels == b.labels, "evaluation reports have different label sets");
  Require(a.total == b.total, "evaluation reports cover different test-set sizes");
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void ClassifierConfig::Validate() const {
  ShapeOf(arch);
  Require(batch_size >= 1, "classifier batch_size must be at least 1");
  Require(std::isfinite(lr) && lr > 0, "classifier lr must be positive");
  Require(epochs >= 0, "classifier epochs must be non-negative");
  Require(momentum >= 0 && momentum < 1, "momentum must lie in [0,1)");
  Require(!nesterov || momentum > 0, "Nesterov momentum needs momentum > 0");
  Require(input_side >= 32, "input_side must be at least 32");
}

bool ClassifierConfig::Set(const std::string& key, const std::string& v) {
  if (key == "arch") arch = v;
  else if (key == "batch_size") batch_size = static_cast<int>(ParseInt(v));
  else if (key == "lr") lr = ParseReal(v);
  else if (key == "epochs") epochs = static_cast<int>(ParseInt(v));
  else if (key == "momentum") momentum = ParseReal(v);
  else if (key == "nesterov") nesterov = ParseBool(v);
  else if (key == "input_side") input_side = static_cast<int>(ParseInt(v));
  else if (key == "seed") seed = static_cast<std::uint64_t>(ParseInt(v));
  else if (key == "pretrained") pretrained = v;
  else return false;
  return true;
}

KeyValues ClassifierConfig::ToKeyValues() const {
  return {{"arch", arch},
          {"batch_size", FormatInt(batch_size)},
          {"lr", FormatReal(lr)},
          {"epochs", FormatInt(epochs)},
          {"momentum", FormatReal(momentum)},
          {"nesterov", nesterov ? "true" : "false"},
          {"input_side", FormatInt(input_side)},
          {"seed", FormatInt(static_cast<std::int64_t>(seed))},
          {"pretrained", pretrained}};
}

// ---------------------------------------------------------------------------
// Network

Classifier::ConvBn Classifier::MakeConvBn(const std::string& name, int in, int out, int kernel, int stride) {
  ConvBn cb;
  cb.conv = params_.Add(name + ".weight", torch::zeros({out, in, kernel, kernel}));
  cb.gamma = params_.Add(name + ".bn.weight", torch::ones({out}));
  cb.beta = params_.Add(name + ".bn.bias", torch::zeros({out}));
  cb.mean = params_.Add(name + ".bn.running_mean", torch::zeros({out}), false);
  cb.var = params_.Add(name + ".bn.running_var", torch::ones({out}), false);
  cb.stride = stride;
  cb.padding = kernel / 2;
  return cb;
}

Classifier::Classifier(std::string arch, std::vector<std::string> labels, std::uint64_t seed)
    : arch_(std::move(arch)), labels_(std::move(labels)) {
  Require(labels_.size() >= 2, "a classifier needs at least two classes");
  const ArchShape shape = ShapeOf(arch_);
  stem_ = MakeConvBn("stem", 3, shape.width, 7, 2);
  int in = shape.width;
  for (size_t s = 0; s < shape.blocks.size(); ++s) {
    const int width = shape.width << s;
    const int out = width * 4;
    for (int k = 0; k < shape.blocks[s]; ++k) {
      const std::string name = "s" + FormatInt(static_cast<std::int64_t>(s)) + ".b" + FormatInt(k);
      const int stride = (k == 0 && s > 0) ? 2 : 1;
      Bottleneck b;
      b.a = MakeConvBn(name + ".conv1", in, width, 1, 1);
      b.b = MakeConvBn(name + ".conv2", width, width, 3, stride);
      b.c = MakeConvBn(name + ".conv3", width, out, 1, 1);
      if (stride != 1 || in != out) b.down = MakeConvBn(name + ".down", in, out, 1, stride);
      blocks_.push_back(b);
      in = out;
    }
  }
  fc_w_ = params_.Add("fc.weight", torch::zeros({n_classes(), in}));
  fc_b_ = params_.Add("fc.bias", torch::zeros({n_classes()}));

  // He-normal (fan-out) convolutions, uniform ±1/√fan_in head.
  Rng rng = DeriveRng({seed, 0xC1A5});
  torch::NoGradGuard no_grad;
  for (auto& e : params_.entries()) {
    const bool conv = e.value.dim() == 4;
    const bool fc = e.name.rfind("fc.", 0) == 0;
    if (!conv && !fc) continue;
    auto values = std::vector<float>(static_cast<size_t>(e.value.numel()));
    if (conv) {
      const double fan_out = static_cast<double>(e.value.size(0) * e.value.size(2) * e.value.size(3));
      std::normal_distribution<double> nd(0.0, std::sqrt(2.0 / fan_out));
      for (auto& v : values) v = static_cast<float>(nd(rng));
    } else {
      const double bound = 1.0 / std::sqrt(static_cast<double>(in));
      for (auto& v : values) v = static_cast<float>(UniformReal(rng, -bound, bound));
    }
    e.value.copy_(torch::from_blob(values.data(), e.value.sizes(), torch::kFloat32));
  }
}

torch::Tensor Classifier::Apply(const ConvBn& cb, const torch::Tensor& x, bool training, bool relu) {
  auto y = torch::conv2d(x, params_.at(cb.conv), {}, torch::IntArrayRef{cb.stride, cb.stride},
                         torch::IntArrayRef{cb.padding, cb.padding});
  y = at::batch_norm(y, params_.at(cb.gamma), params_.at(cb.beta), params_.at(cb.mean), params_.at(cb.var), training,
                     kBnMomentum, kBnEps, false);
  return relu ? torch::relu(y) : y;
}

torch::Tensor Classifier::Forward(const torch::Tensor& x, bool training) {
  Require(x.dim() == 4 && x.size(1) == 3, "classifier input must be (N,3,H,W)");
  auto h = Apply(stem_, x, training, true);
  h = torch::max_pool2d(h, {3, 3}, {2, 2}, {1, 1});
  for (const auto& b : blocks_) {
    auto y = Apply(b.a, h, training, true);
    y = Apply(b.b, y, training, true);
    y = Apply(b.c, y, training, false);
    const auto skip = b.down ? Apply(*b.down, h, training, false) : h;
    h = torch::relu(y + skip);
  }
  h = h.mean({2, 3});
  return torch::addmm(params_.at(fc_b_), h, params_.at(fc_w_).t());
}

void Classifier::Save(const fs::path& path, int input_side) const {
  Archive a;
  a.PutText("format", "argan-classifier");
  a.PutText("arch", arch_);
  a.PutText("labels", JoinLabels(labels_));
  a.PutText("input_side", FormatInt(input_side));
  PutParameters(a, "", params_);
  a.Save(path);
}

Classifier Classifier::Load(const fs::path& path, int* input_side) {
  const Archive a = Archive::Load(path);
  Require(a.HasText("format") && a.Text("format") == "argan-classifier", path.string() + " is not a classifier archive",
          ErrorCode::kParse);
  Classifier c(a.Text("arch"), SplitLabels(a.Text("labels")), 0);
  GetParameters(a, "", c.params_);
  if (input_side) *input_side = static_cast<int>(ParseInt(a.Text("input_side")));
  return c;
}

void Classifier::ImportBackbone(const Classifier& other) {
  torch::NoGradGuard no_grad;
  for (auto& e : params_.entries()) {
    if (e.name.rfind("fc.", 0) == 0) continue;
    const auto* src = other.params().Find(e.name);
    if (src && src->value.sizes() == e.value.sizes()) e.value.copy_(src->value);
  }
}

// ---------------------------------------------------------------------------
// Training and evaluation

ClassifierRun TrainClassifier(const DatasetManifest& instance, const ClassifierConfig& config,
                              const std::vector<ImageRecord>& heldout) {
  config.Validate();
  std::vector<ImageRecord> train;
  for (const auto& r : instance.records) {
    if (r.split == Split::kTrain) train.push_back(r);
  }
  const auto& labels = instance.label_set;
  std::vector<std::int64_t> per_class(labels.size(), 0);
  std::vector<std::int64_t> targets;
  for (const auto& r : train) {
    const int k = LabelIndex(labels, r.class_label);
    ++per_class[static_cast<size_t>(k)];
    targets.push_back(k);
  }
  for (size_t k = 0; k < labels.size(); ++k) {
    Require(per_class[k] > 0, "class '" + labels[k] + "' has no training records");
  }

  ClassifierRun run;
  run.model = std::make_unique<Classifier>(config.arch, labels, config.seed);
  if (!config.pretrained.empty()) run.model->ImportBackbone(Classifier::Load(config.pretrained));
  Classifier& model = *run.model;
  if (config.epochs == 0) return run;

  const auto images = LoadImages(train, config.input_side);
  const auto target_tensor = torch::tensor(targets, torch::kInt64);
  ParamRefs refs;
  AppendTrainable(refs, "", model.params());
  model.params().SetRequiresGrad(true);
  Sgd opt(refs, {config.momentum, config.nesterov, 0.0});
  Rng rng = DeriveRng({config.seed, 0x5A3D});

  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), size_t{0});
  const size_t bs = static_cast<size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    // Batch statistics need two samples: a trailing singleton joins the
    // previous batch.
    std::vector<std::pair<size_t, size_t>> batches;
    for (size_t s = 0; s < order.size(); s += bs) batches.emplace_back(s, std::min(order.size(), s + bs));
    if (batches.size() > 1 && batches.back().second - batches.back().first == 1) {
      batches.pop_back();
      batches.back().second = order.size();
    }
    double loss_sum = 0;
    std::int64_t correct = 0;
    for (const auto& [s, e] : batches) {
      const std::vector<size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(s),
                                    order.begin() + static_cast<std::ptrdiff_t>(e));
      auto x = Stack(images, idx);
      auto y = target_tensor.index_select(0, torch::tensor(std::vector<int64_t>(idx.begin(), idx.end())));
      opt.ZeroGrad();
      auto logits = model.Forward(x, true);
      auto loss = torch::cross_entropy_loss(logits, y);
      const double lv = loss.item<double>();
      Require(std::isfinite(lv), "non-finite classifier loss at epoch " + FormatInt(epoch), ErrorCode::kNumeric);
      loss.backward();
      opt.Step(config.lr);
      loss_sum += lv * static_cast<double>(idx.size());
      correct += logits.argmax(1).eq(y).sum().item<std::int64_t>();
    }
    ClassifierEpoch h;
    h.epoch = epoch;
    h.train_loss = loss_sum / static_cast<double>(train.size());
    h.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
    h.heldout_accuracy = heldout.empty() ? std::nan("") : Evaluate(model, heldout, config.input_side).accuracy;
    run.history.push_back(h);
  }
  model.params().SetRequiresGrad(false);
  return run;
}

void SaveClassifierHistory(const std::vector<ClassifierEpoch>& history, const fs::path& path) {
  CsvWriter w({"epoch", "train_loss", "train_accuracy", "heldout_accuracy"});
  for (const auto& h : history) {
    w.Add({FormatInt(h.epoch), FormatReal(h.train_loss), FormatReal(h.train_accuracy), FormatReal(h.heldout_accuracy)});
  }
  w.Save(path);
}

std::vector<int> Predict(Classifier& model, const std::vector<ImageRecord>& records, int input_side) {
  torch::NoGradGuard no_grad;
  const auto images = LoadImages(records, input_side);
  std::vector<int> out;
  constexpr size_t kBatch = 16;
  for (size_t s = 0; s < images.size(); s += kBatch) {
    std::vector<size_t> idx(std::min(kBatch, images.size() - s));
    std::iota(idx.begin(), idx.end(), s);
    auto pred = model.Forward(Stack(images, idx), false).argmax(1);
    for (int64_t i = 0; i < pred.size(0); ++i) out.push_back(static_cast<int>(pred[i].item<int64_t>()));
  }
  return out;
}

EvalReport Evaluate(Classifier& model, const std::vector<ImageRecord>& records, int input_side) {
  std::vector<int> truth;
  for (const auto& r : records) truth.push_back(LabelIndex(model.labels(), r.class_label));
  return EvalReport::FromPredictions(model.labels(), truth, Predict(model, records, input_side));
}

EvalReport EvalReport::FromConfusion(std::vector<std::string> labels, std::vector<std::vector<std::int64_t>> confusion) {
  const size_t n = labels.size();
  Require(confusion.size() == n, "confusion matrix size does not match the label count");
  EvalReport r;
  r.labels = std::move(labels);
  r.confusion = std::move(confusion);
  r.tp.assign(n, 0);
  r.fp.assign(n, 0);
  r.precision.assign(n, 0.0);
  r.precision_undefined.assign(n, false);
  std::int64_t trace = 0;
  for (size_t t = 0; t < n; ++t) {
    Require(r.confusion[t].size() == n, "confusion matrix must be square");
    for (size_t p = 0; p < n; ++p) {
      Require(r.confusion[t][p] >= 0, "confusion counts must be non-negative");
      r.total += r.confusion[t][p];
      if (t == p) trace += r.confusion[t][p];
      else r.fp[p] += r.confusion[t][p];
    }
    r.tp[t] = r.confusion[t][t];
  }
  for (size_t c = 0; c < n; ++c) {
    const auto predicted = r.tp[c] + r.fp[c];
    r.precision_undefined[c] = predicted == 0;
    r.precision[c] = predicted == 0 ? 0.0 : static_cast<double>(r.tp[c]) / static_cast<double>(predicted);
  }
  r.accuracy = r.total == 0 ? 0.0 : static_cast<double>(trace) / static_cast<double>(r.total);
  return r;
}

EvalReport EvalReport::FromPredictions(std::vector<std::string> labels, const std::vector<int>& truth,
                                       const std::vector<int>& predicted) {
  Require(truth.size() == predicted.size(), "truth and prediction counts differ");
  const size_t n = labels.size();
  std::vector<std::vector<std::int64_t>> m(n, std::vector<std::int64_t>(n, 0));
  for (size_t i = 0; i < truth.size(); ++i) {
    Require(truth[i] >= 0 && static_cast<size_t>(truth[i]) < n && predicted[i] >= 0 &&
                static_cast<size_t>(predicted[i]) < n,
            "class index out of range");
    ++m[static_cast<size_t>(truth[i])][static_cast<size_t>(predicted[i])];
  }
  return FromConfusion(std::move(labels), std::move(m));
}

void SaveEvalReport(const EvalReport& r, const fs::path& report_csv, const fs::path& confusion_csv) {
  CsvWriter w(SplitCsvRow(kEvalHeader));
  std::int64_t tp = 0, fp = 0;
  for (size_t c = 0; c < r.labels.size(); ++c) {
    w.Add({r.labels[c], FormatInt(r.tp[c]), FormatInt(r.fp[c]), FormatReal(r.precision[c])});
    tp += r.tp[c];
    fp += r.fp[c];
  }
  w.Add({std::string(kEvalSummaryLabel), FormatInt(tp), FormatInt(fp), FormatReal(r.accuracy)});
  w.Save(report_csv);

  CsvRow header = {"truth\\predicted"};
  header.insert(header.end(), r.labels.begin(), r.labels.end());
  CsvWriter cm(header);
  for (size_t t = 0; t < r.labels.size(); ++t) {
    CsvRow row = {r.labels[t]};
    for (auto v : r.confusion[t]) row.push_back(FormatInt(v));
    cm.Add(row);
  }
  cm.Save(confusion_csv);
}

EvalReport LoadConfusionCsv(const fs::path& path) {
  const auto t = ReadCsv(path);
  Require(t.header.size() >= 3, "confusion CSV needs at least two classes: " + path.string(), ErrorCode::kParse);
  std::vector<std::string> labels(t.header.begin() + 1, t.header.end());
  Require(t.rows.size() == labels.size(), "confusion CSV is not square: " + path.string(), ErrorCode::kParse);
  std::vector<std::vector<std::int64_t>> m;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    Require(row.size() == labels.size() + 1 && row[0] == labels[i], "malformed confusion row in " + path.string(),
            ErrorCode::kParse);
    std::vector<std::int64_t> counts;
    for (size_t j = 1; j < row.size(); ++j) counts.push_back(ParseInt(row[j]));
    m.push_back(counts);
  }
  return EvalReport::FromConfusion(labels, m);
}

std::vector<std::optional<double>> TpChange(const EvalReport& base, const EvalReport& aug) {
  RequireSameLabels(base, aug);
  std::vector<std::optional<double>> out;
  for (size_t c = 0; c < base.labels.size(); ++c) out.push_back(Relative(base.tp[c], aug.tp[c]));
  return out;
}

std::vector<FpChangeRow> FpChange(const EvalReport& base, const EvalReport& aug_c, const EvalReport& aug_s) {
  RequireSameLabels(base, aug_c);
  RequireSameLabels(base, aug_s);
  std::vector<FpChangeRow> out;
  for (size_t c = 0; c < base.labels.size(); ++c) {
    out.push_back({Relative(base.fp[c], aug_c.fp[c]), Relative(base.fp[c], aug_s.fp[c]),
                   Relative(aug_c.fp[c], aug_s.fp[c])});
  }
  return out;
}

}  // namespace argan
