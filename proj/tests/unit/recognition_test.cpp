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
#include <cmath>

#include <gtest/gtest.h>
#include <torch/torch.h>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "core_data/toy_data.hpp"
#include "recognition/classifier.hpp"
#include "test_support.hpp"

namespace argan {
namespace {

using testing::TempDir;

const std::vector<std::string> kAb = {"a", "b"};

// Hand count for the bottleneck topology: convs carry no bias, every BN has
// a scale and a shift.
std::int64_t BottleneckParamsByHand(int width, const std::vector<int>& blocks, int n_classes) {
  auto conv_bn = [](std::int64_t in, std::int64_t out, std::int64_t k) { return in * out * k * k + 2 * out; };
  std::int64_t total = conv_bn(3, width, 7);
  std::int64_t in = width;
  for (size_t s = 0; s < blocks.size(); ++s) {
    const std::int64_t w = static_cast<std::int64_t>(width) << s, out = 4 * w;
    for (int k = 0; k < blocks[s]; ++k) {
      total += conv_bn(in, w, 1) + conv_bn(w, w, 3) + conv_bn(w, out, 1);
      if (k == 0) total += conv_bn(in, out, 1);
      in = out;
    }
  }
  return total + in * n_classes + n_classes;
}

std::vector<std::string> NineLabels() {
  std::vector<std::string> l;
  for (int i = 0; i < 9; ++i) l.push_back("c" + FormatInt(i));
  return l;
}

TEST(ClassifierTest, Resnet50ShapeAndParameterCount) {
  Classifier c("resnet50", NineLabels(), 1);
  EXPECT_EQ(c.ParamCount(), BottleneckParamsByHand(64, {3, 4, 6, 3}, 9));
  EXPECT_EQ(c.ParamCount(), 23526473);
  EXPECT_NEAR(static_cast<double>(c.ParamCount()), 23e6, 0.15 * 23e6);
  torch::NoGradGuard no_grad;
  auto logits = c.Forward(torch::rand({2, 3, 256, 256}) * 2 - 1, false);
  EXPECT_EQ(logits.sizes(), (std::vector<int64_t>{2, 9}));
  auto sums = torch::softmax(logits, 1).sum(1);
  EXPECT_LT((sums - 1).abs().max().item<float>(), 1e-6f);
}

TEST(ClassifierTest, MiniCountAndErrors) {
  Classifier c("resnet-mini", kAb, 1);
  EXPECT_EQ(c.ParamCount(), BottleneckParamsByHand(16, {1, 1, 1, 1}, 2));
  EXPECT_THROW(Classifier("resnet7", kAb, 1), Error);
  EXPECT_THROW(Classifier("resnet-mini", {"a"}, 1), Error);
}

TEST(ClassifierTest, SaveLoadRoundTrip) {
  TempDir d("clf");
  Classifier c("resnet-mini", {"x", "y", "z"}, 5);
  c.Save(d / "c.argan", 64);
  int side = 0;
  auto back = Classifier::Load(d / "c.argan", &side);
  EXPECT_EQ(side, 64);
  EXPECT_EQ(back.labels(), c.labels());
  EXPECT_EQ(back.params().Fingerprint(), c.params().Fingerprint());
}

TEST(EvalReportTest, HandCountedExamples) {
  auto r = EvalReport::FromPredictions(kAb, {0, 1, 1}, {0, 0, 1});
  EXPECT_DOUBLE_EQ(r.accuracy, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.precision[0], 0.5);
  EXPECT_DOUBLE_EQ(r.precision[1], 1.0);
  EXPECT_EQ(r.tp, (std::vector<std::int64_t>{1, 1}));
  EXPECT_EQ(r.fp, (std::vector<std::int64_t>{1, 0}));

  auto constant = EvalReport::FromPredictions(kAb, {0, 0, 1, 1}, {0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(constant.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(constant.precision[0], 0.5);
  EXPECT_DOUBLE_EQ(constant.precision[1], 0.0);
  EXPECT_TRUE(constant.precision_undefined[1]);
  EXPECT_FALSE(constant.precision_undefined[0]);

  auto perfect = EvalReport::FromPredictions(kAb, {0, 1, 1}, {0, 1, 1});
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.precision, (std::vector<double>{1.0, 1.0}));
}

TEST(EvalReportTest, IdentitiesOnRandomPredictions) {
  Rng rng(3);
  const std::vector<std::string> labels = {"p", "q", "r", "s"};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> t, p;
    std::vector<std::int64_t> per_class(4, 0);
    for (int i = 0; i < 40; ++i) {
      t.push_back(static_cast<int>(std::uniform_int_distribution<int>(0, 3)(rng)));
      p.push_back(static_cast<int>(std::uniform_int_distribution<int>(0, 3)(rng)));
      ++per_class[static_cast<size_t>(t.back())];
    }
    auto r = EvalReport::FromPredictions(labels, t, p);
    std::int64_t trace = 0;
    for (size_t c = 0; c < 4; ++c) {
      trace += r.confusion[c][c];
      std::int64_t row = 0;
      for (auto v : r.confusion[c]) row += v;
      EXPECT_EQ(row, per_class[c]);
      const auto predicted = r.tp[c] + r.fp[c];
      EXPECT_DOUBLE_EQ(r.precision[c], predicted ? static_cast<double>(r.tp[c]) / predicted : 0.0);
    }
    EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(trace) / 40.0);
  }
}

TEST(EvalReportTest, CsvRoundTripThroughConfusion) {
  TempDir d("eval");
  auto r = EvalReport::FromPredictions({"a", "b,c"}, {0, 1, 1, 0}, {0, 0, 1, 1});
  SaveEvalReport(r, d / "report.csv", d / "confusion.csv");
  const auto text = ReadTextFile(d / "report.csv");
  EXPECT_EQ(text, "label,tp,fp,precision\na,1,1,0.5\n\"b,c\",1,1,0.5\n(total),2,2,0.5\n");
  auto back = LoadConfusionCsv(d / "confusion.csv");
  EXPECT_EQ(back.labels, r.labels);
  EXPECT_EQ(back.confusion, r.confusion);
}

TEST(ChangeTest, TruePositiveChange) {
  // Both reports must cover the same test set, hence the padding in row a.
  auto base = EvalReport::FromConfusion(kAb, {{100, 10}, {0, 0}});
  auto aug = EvalReport::FromConfusion(kAb, {{110, 0}, {0, 0}});
  auto ch = TpChange(base, aug);
  EXPECT_NEAR(*ch[0], 0.10, 1e-12);
  EXPECT_FALSE(ch[1].has_value());
  for (const auto& v : TpChange(base, base)) {
    if (v) EXPECT_EQ(*v, 0.0);
  }
  auto zero = EvalReport::FromConfusion(kAb, {{0, 5}, {0, 5}});
  auto five = EvalReport::FromConfusion(kAb, {{5, 0}, {0, 5}});
  EXPECT_FALSE(TpChange(zero, five)[0].has_value());
  EXPECT_THROW(TpChange(base, EvalReport::FromConfusion({"a", "z"}, {{110, 0}, {0, 0}})), Error);
  EXPECT_THROW(TpChange(base, EvalReport::FromConfusion(kAb, {{1, 0}, {0, 0}})), Error);
}

TEST(ChangeTest, FalsePositiveChangeTriple) {
  // fp of class a is the off-diagonal column sum.
  auto x = EvalReport::FromConfusion(kAb, {{0, 0}, {20, 10}});
  auto xc = EvalReport::FromConfusion(kAb, {{0, 0}, {10, 20}});
  auto xs = EvalReport::FromConfusion(kAb, {{0, 0}, {5, 25}});
  auto rows = FpChange(x, xc, xs);
  EXPECT_DOUBLE_EQ(*rows[0].classic_vs_base, -0.5);
  EXPECT_DOUBLE_EQ(*rows[0].synthetic_vs_base, -0.75);
  EXPECT_DOUBLE_EQ(*rows[0].synthetic_vs_classic, -0.5);
  EXPECT_FALSE(rows[1].classic_vs_base.has_value());  // fp(b) = 0 in X
  for (const auto& r : FpChange(x, x, x)) {
    if (r.classic_vs_base) EXPECT_EQ(*r.classic_vs_base, 0.0);
    if (r.synthetic_vs_classic) EXPECT_EQ(*r.synthetic_vs_classic, 0.0);
  }
}

class TrainClassifierTest : public ::testing::Test {
 protected:
  void SetUp() override {
    auto specs = DefaultToyClasses(6, 6, 2);
    data_ = MakeToyClasses(7, specs, 64, dir_.path());
    for (const auto& r : data_.records) {
      if (r.split == Split::kTest) test_.push_back(r);
    }
  }
  ClassifierConfig Config(int epochs, std::uint64_t seed) const {
    ClassifierConfig c;
    c.arch = "resnet-mini";
    c.input_side = 64;
    c.batch_size = 8;
    c.lr = 0.01;
    c.epochs = epochs;
    c.seed = seed;
    return c;
  }
  TempDir dir_{"clf_train"};
  DatasetManifest data_;
  std::vector<ImageRecord> test_;
};

TEST_F(TrainClassifierTest, LearnsAboveChance) {
  auto run = TrainClassifier(data_, Config(20, 1), test_);
  ASSERT_EQ(run.history.size(), 20u);
  EXPECT_GT(run.history.back().train_accuracy, 0.25);
  EXPECT_GT(run.history.back().train_accuracy, run.history.front().train_accuracy);
  EXPECT_LT(run.history.back().train_loss, run.history.front().train_loss);
  EXPECT_FALSE(std::isnan(run.history.back().heldout_accuracy));
  auto r1 = Evaluate(*run.model, test_, 64), r2 = Evaluate(*run.model, test_, 64);
  EXPECT_EQ(r1.confusion, r2.confusion);
}

TEST_F(TrainClassifierTest, ZeroEpochsAndSeedSensitivity) {
  auto zero = TrainClassifier(data_, Config(0, 4), {});
  Classifier fresh("resnet-mini", data_.label_set, 4);
  EXPECT_EQ(zero.model->params().Fingerprint(), fresh.params().Fingerprint());
  EXPECT_TRUE(zero.history.empty());

  auto a = TrainClassifier(data_, Config(2, 1), {});
  auto b = TrainClassifier(data_, Config(2, 2), {});
  auto a2 = TrainClassifier(data_, Config(2, 1), {});
  EXPECT_NE(a.history.back().train_loss, b.history.back().train_loss);
  EXPECT_EQ(a.history.back().train_loss, a2.history.back().train_loss);
  EXPECT_EQ(a.model->params().Fingerprint(), a2.model->params().Fingerprint());
}

TEST_F(TrainClassifierTest, EmptyClassAndUnknownTestLabel) {
  auto missing = data_;
  std::erase_if(missing.records, [](const ImageRecord& r) { return r.class_label == "blight"; });
  EXPECT_THROW(TrainClassifier(missing, Config(1, 1), {}), Error);
  Classifier c("resnet-mini", data_.label_set, 1);
  auto odd = test_;
  odd[0].class_label = "unheard_of";
  EXPECT_THROW(Evaluate(c, odd, 64), Error);
}

}  // namespace
}  // namespace argan
