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
#include "core_data/image_io.hpp"
#include "core_data/toy_data.hpp"
#include "networks/archive.hpp"
#include "test_support.hpp"
#include "training/image_pool.hpp"
#include "training/optim.hpp"
#include "training/trainer.hpp"

namespace argan {
namespace {

using testing::TempDir;

TrainConfig TinyConfig() {
  TrainConfig c;
  c.generator = "C7-1-8, D3-2-16, R3-16, U3-8, C7-1-3";
  c.discriminator = "P4-2-8:nonorm, P4-1-16";
  c.feature_extractor = "C7-2-8, R3-8, R3-16";
  c.arl_layers = {0, 1};
  c.image_side = 32;
  c.epochs = 2;
  c.decay_start_epoch = 1;
  c.pool_size = 3;
  c.seed = 42;
  return c;
}

std::uint64_t Hash(const Network& n) { return n.params().Fingerprint(); }

TEST(LrScheduleTest, Examples) {
  TrainConfig c;
  EXPECT_DOUBLE_EQ(LrAt(0, c), 2e-4);
  EXPECT_DOUBLE_EQ(LrAt(150, c), 1e-4);
  EXPECT_DOUBLE_EQ(LrAt(200, c), 0.0);
  EXPECT_DOUBLE_EQ(LrAt(100, c), 2e-4);  // continuous at the decay start
  EXPECT_THROW(LrAt(-1, c), Error);
  EXPECT_THROW(LrAt(201, c), Error);
}

TEST(LrScheduleTest, NonIncreasingProperty) {
  for (int epochs : {1, 7, 50}) {
    for (int start = 0; start <= epochs; ++start) {
      TrainConfig c;
      c.epochs = epochs;
      c.decay_start_epoch = start;
      for (int e = 1; e <= epochs; ++e) EXPECT_LE(LrAt(e, c), LrAt(e - 1, c));
      EXPECT_EQ(LrAt(epochs, c), 0.0);
      EXPECT_EQ(LrAt(start, c), start < epochs ? c.base_lr : 0.0);
    }
  }
}

TEST(ImagePoolTest, DisabledAndFillingPhase) {
  Rng rng(1);
  ImagePool off(0);
  for (int i = 0; i < 5; ++i) {
    auto x = torch::full({3, 2, 2}, static_cast<float>(i));
    EXPECT_TRUE(torch::equal(off.PushSample(x, rng), x));
  }
  ImagePool pool(4);
  for (int i = 0; i < 4; ++i) {
    auto x = torch::full({3, 2, 2}, static_cast<float>(i));
    bool swapped = true;
    EXPECT_TRUE(torch::equal(pool.PushSample(x, rng, &swapped), x));
    EXPECT_FALSE(swapped);
  }
  EXPECT_EQ(pool.size(), 4);
}

TEST(ImagePoolTest, SwapFractionIsOneHalf) {
  Rng rng(2);
  ImagePool pool(50);
  int swaps = 0;
  const int n = 10000;
  for (int i = 0; i < 50; ++i) pool.PushSample(torch::zeros({1}), rng);
  for (int i = 0; i < n; ++i) {
    bool swapped = false;
    auto x = torch::full({1}, static_cast<float>(i + 1));
    auto y = pool.PushSample(x, rng, &swapped);
    swaps += swapped;
    // A returned stored image is never the one just pushed.
    if (swapped) EXPECT_NE(y.item<float>(), x.item<float>());
  }
  EXPECT_NEAR(static_cast<double>(swaps) / n, 0.5, 0.02);
}

TEST(ImagePoolTest, CheckpointRoundTrip) {
  Rng rng(3);
  ImagePool pool(3);
  for (int i = 0; i < 2; ++i) pool.PushSample(torch::rand({3, 4, 4}), rng);
  Archive a;
  pool.Put(a, "p/");
  ImagePool back(3);
  back.Get(a, "p/");
  EXPECT_EQ(back.size(), 2);
  ImagePool small(1);
  EXPECT_THROW(small.Get(a, "p/"), Error);
}

TEST(AdamTest, MatchesScalarRecurrence) {
  auto p = torch::tensor({0.5, -1.0, 2.0}, torch::kFloat64).requires_grad_(true);
  Adam opt({{"p", p}}, {0.5, 0.999, 1e-8});
  std::vector<double> ref = {0.5, -1.0, 2.0}, m(3, 0.0), v(3, 0.0);
  const double lr = 0.1;
  for (int t = 1; t <= 5; ++t) {
    opt.ZeroGrad();
    (p.pow(3).sum()).backward();  // g = 3p²
    opt.Step(lr);
    for (size_t i = 0; i < 3; ++i) {
      const double g = 3 * ref[i] * ref[i];
      m[i] = 0.5 * m[i] + 0.5 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1 - std::pow(0.5, t)), vh = v[i] / (1 - std::pow(0.999, t));
      ref[i] -= lr * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  for (int64_t i = 0; i < 3; ++i) EXPECT_NEAR(p[i].item<double>(), ref[static_cast<size_t>(i)], 1e-12);
  EXPECT_EQ(opt.steps(), 5);
}

TEST(AdamTest, ZeroGradientLeavesParametersUnchanged) {
  auto p = torch::tensor({0.5, -1.0}, torch::kFloat64).requires_grad_(true);
  Adam opt({{"p", p}}, {});
  (p * 0.0).sum().backward();
  opt.Step(1.0);
  EXPECT_EQ(p[0].item<double>(), 0.5);
  EXPECT_EQ(p[1].item<double>(), -1.0);
}

TEST(SgdTest, NesterovMatchesScalarRecurrence) {
  auto p = torch::tensor({1.0, -2.0}, torch::kFloat64).requires_grad_(true);
  Sgd opt({{"p", p}}, {0.9, true, 0.0});
  std::vector<double> ref = {1.0, -2.0}, buf(2, 0.0);
  for (int t = 0; t < 4; ++t) {
    opt.ZeroGrad();
    p.square().sum().backward();
    opt.Step(0.05);
    for (size_t i = 0; i < 2; ++i) {
      const double g = 2 * ref[i];
      buf[i] = 0.9 * buf[i] + g;
      ref[i] -= 0.05 * (g + 0.9 * buf[i]);
    }
  }
  for (int64_t i = 0; i < 2; ++i) EXPECT_NEAR(p[i].item<double>(), ref[static_cast<size_t>(i)], 1e-12);
}

TEST(TrainConfigTest, TextRoundTripAndValidation) {
  auto c = TinyConfig();
  c.arl_direction = ArlDirection::kBoth;
  c.base_lr = 1.234e-4;
  auto back = TrainConfig::FromText(c.ToText());
  EXPECT_EQ(back.ToText(), c.ToText());
  EXPECT_THROW(TrainConfig::FromText("bogus = 1\n"), Error);
  auto bad = c;
  bad.decay_start_epoch = 3;
  EXPECT_THROW(bad.Validate(), Error);
  bad = c;
  bad.batch_size = 0;
  EXPECT_THROW(bad.Validate(), Error);
  bad = c;
  bad.image_side = 30;
  EXPECT_THROW(bad.Validate(), Error);
}

TEST(TrainStepTest, FixedPointWhenDiscriminatorsSayReal) {
  auto c = TinyConfig();
  c.lam = 0;
  c.alpha = 0;
  TrainState s(c);
  // Zero weights and a unit head bias: every logit is exactly 1.
  for (Network* d : {&s.d_a, &s.d_b}) {
    torch::NoGradGuard no_grad;
    for (auto& e : d->params().entries()) e.value.zero_();
    for (auto& e : d->params().entries()) {
      if (e.name == "head.bias") e.value.fill_(1.0);
    }
  }
  const auto before_ab = Hash(s.g_ab), before_ba = Hash(s.g_ba);
  auto a = torch::rand({1, 3, 32, 32}) * 2 - 1, b = torch::rand({1, 3, 32, 32}) * 2 - 1;
  LossReport r;
  GeneratorUpdate(s, a, b, 1e-3, r);
  EXPECT_EQ(r.g_adv_ab, 0.0);
  EXPECT_EQ(r.g_adv_ba, 0.0);
  EXPECT_EQ(Hash(s.g_ab), before_ab);
  EXPECT_EQ(Hash(s.g_ba), before_ba);
}

TEST(TrainStepTest, SubStepsTouchOnlyTheirOwnNetworks) {
  TrainState s(TinyConfig());
  auto a = torch::rand({2, 3, 32, 32}) * 2 - 1, b = torch::rand({2, 3, 32, 32}) * 2 - 1;
  const auto h_da = Hash(s.d_a), h_db = Hash(s.d_b), h_f = Hash(s.feature);
  const auto h_gab = Hash(s.g_ab), h_gba = Hash(s.g_ba);
  LossReport r;
  auto [fake_a, fake_b] = GeneratorUpdate(s, a, b, 2e-4, r);
  EXPECT_NE(Hash(s.g_ab), h_gab);
  EXPECT_NE(Hash(s.g_ba), h_gba);
  EXPECT_EQ(Hash(s.d_a), h_da);
  EXPECT_EQ(Hash(s.d_b), h_db);
  const auto g_ab = Hash(s.g_ab), g_ba = Hash(s.g_ba);
  DiscriminatorUpdate(s, Domain::kA, a, fake_a, 2e-4);
  EXPECT_NE(Hash(s.d_a), h_da);
  EXPECT_EQ(Hash(s.d_b), h_db);
  DiscriminatorUpdate(s, Domain::kB, b, fake_b, 2e-4);
  EXPECT_NE(Hash(s.d_b), h_db);
  EXPECT_EQ(Hash(s.g_ab), g_ab);
  EXPECT_EQ(Hash(s.g_ba), g_ba);
  EXPECT_EQ(Hash(s.feature), h_f);
}

TEST(TrainStepTest, ReportTotalFollowsCompositionLaw) {
  for (double lam : {0.0, 1.0, 2.5}) {
    auto c = TinyConfig();
    c.lam = lam;
    c.arl_direction = ArlDirection::kBoth;
    TrainState s(c);
    auto a = torch::rand({1, 3, 32, 32}) * 2 - 1, b = torch::rand({1, 3, 32, 32}) * 2 - 1;
    auto r = TrainStep(s, a, b);
    EXPECT_EQ(r.total, r.g_adv_ab + r.g_adv_ba + c.alpha * r.cycle + lam * r.arl);
    if (lam == 0.0) {
      EXPECT_EQ(r.arl, 0.0);
    } else {
      EXPECT_GT(r.arl, 0.0);
    }
    EXPECT_GT(r.d_a, 0.0);
    EXPECT_GT(r.d_b, 0.0);
    ASSERT_EQ(s.history.size(), 1u);
    EXPECT_EQ(s.step, 1);
  }
}

TEST(TrainStepTest, NonFiniteLossNamesTheTerm) {
  TrainState s(TinyConfig());
  {
    torch::NoGradGuard no_grad;
    s.d_b.params().entries().back().value.fill_(std::nan(""));
  }
  auto a = torch::rand({1, 3, 32, 32}), b = torch::rand({1, 3, 32, 32});
  try {
    TrainStep(s, a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumeric);
    EXPECT_NE(std::string(e.what()).find("g_adv_AB"), std::string::npos) << e.what();
  }
}

TEST(TrainTest, EpochsZeroKeepsInitialization) {
  TempDir d("train");
  auto [a, b] = MakeToyDomains(3, 2, 32, d / "data");
  auto c = TinyConfig();
  c.epochs = 0;
  c.decay_start_epoch = 0;
  auto s = Train(a, b, c, {d / "run"});
  TrainState fresh(c);
  EXPECT_EQ(s->step, 0);
  EXPECT_TRUE(s->history.empty());
  EXPECT_EQ(Hash(s->g_ab), Hash(fresh.g_ab));
  EXPECT_EQ(Hash(s->d_b), Hash(fresh.d_b));
  EXPECT_TRUE(std::filesystem::exists(d / "run" / CheckpointName(0)));
}

TEST(TrainTest, LargerDomainDefinesTheEpoch) {
  TempDir d("train");
  auto [a, b] = MakeToyDomains(4, 5, 32, d / "data");
  a.records.resize(3);
  auto c = TinyConfig();
  c.batch_size = 2;
  auto s = Train(a, b, c, {});
  EXPECT_EQ(s->step, 2 * 3);  // ⌈5/2⌉ steps per epoch
  EXPECT_EQ(s->history[2].epoch, 0);
  EXPECT_EQ(s->history[3].epoch, 1);
  DatasetManifest empty;
  EXPECT_THROW(Train(empty, b, c, {}), Error);
}

TEST(TrainTest, BitReproducibleAndResumable) {
  TempDir d("train");
  auto [a, b] = MakeToyDomains(5, 3, 32, d / "data");
  auto c = TinyConfig();
  Train(a, b, c, {d / "run1"});
  Train(a, b, c, {d / "run2"});
  const auto final_name = CheckpointName(2);
  EXPECT_EQ(testing::HashFile(d / "run1" / final_name), testing::HashFile(d / "run2" / final_name));
  EXPECT_EQ(ReadTextFile(d / "run1" / "loss_history.csv"), ReadTextFile(d / "run2" / "loss_history.csv"));

  TrainOptions stop{d / "run3"};
  stop.stop_after_epoch = 1;
  auto partial = Train(a, b, c, stop);
  EXPECT_EQ(partial->epoch, 1);
  EXPECT_FALSE(std::filesystem::exists(d / "run3" / final_name));
  auto resumed = LoadCheckpoint(d / "run3" / CheckpointName(1));
  ContinueTraining(*resumed, a, b, {d / "run3"});
  EXPECT_EQ(resumed->epoch, 2);
  EXPECT_EQ(testing::HashFile(d / "run1" / final_name), testing::HashFile(d / "run3" / final_name));

  auto other = c;
  other.seed = 43;
  auto s = Train(a, b, other, {});
  EXPECT_NE(Hash(s->g_ab), Hash(LoadCheckpoint(d / "run1" / final_name)->g_ab));
}

TEST(TrainTest, HistoryCsvRoundTrip) {
  std::vector<StepRecord> h = {{0, 0, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 7.7}}, {1, 0, {1e-9, 2, 3, 4, 5, 6, 1.0 / 3}}};
  auto text = LossHistoryCsv(h);
  EXPECT_EQ(text.substr(0, kLossHistoryHeader.size()), kLossHistoryHeader);
  auto back = ParseLossHistoryCsv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].losses.total, 1.0 / 3);
  EXPECT_EQ(back[0].losses.arl, 0.6);
}

TEST(TranslateTest, IdentityGeneratorReproducesPixels) {
  TempDir d("translate");
  auto [a, b] = MakeToyDomains(6, 3, 32, d / "data");
  auto g = testing::MakeIdentityGenerator();
  TranslateOptions opt;
  opt.target_label = "diseased";
  opt.resize_to = 32;
  opt.batch_size = 2;
  auto out = Translate(g, a, d / "out", opt);
  ASSERT_EQ(out.size(), a.records.size());
  for (size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].origin, Origin::kSynthetic);
    EXPECT_EQ(out[i].class_label, "diseased");
    EXPECT_EQ(out[i].domain, Domain::kB);
    cv::Mat src = ReadRgb(a.records[i].path), dst = ReadRgb(out[i].path);
    cv::Mat diff;
    cv::absdiff(src, dst, diff);
    double max_diff = 0;
    cv::minMaxLoc(diff.reshape(1), nullptr, &max_diff);
    EXPECT_LE(max_diff, 1.0);
  }
  TempDir blocker("translate");
  WriteTextFile(blocker / "f", "x");
  try {
    Translate(g, a, blocker / "f" / "sub", opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace argan
