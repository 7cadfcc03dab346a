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
#include <algorithm>
#include <filesystem>
#include <map>

#include <gtest/gtest.h>
#include <opencv2/core.hpp>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "core_data/image_io.hpp"
#include "metrics/metrics.hpp"
#include "pipeline/experiment.hpp"
#include "test_support.hpp"

namespace argan {
namespace {

namespace fs = std::filesystem;
using testing::HashFile;
using testing::TempDir;

// Tiny networks at side 32 keep a full pipeline run to seconds.
constexpr const char* kTinyConfig = R"(
[paths]
work_dir = work
[data]
toy = classes
side = 32
majority_train = 8
minority_train = 3
test_per_class = 3
[gan]
generator = C7-1-8, D3-2-16, R3-16, U3-8, C7-1-3
discriminator = P4-2-8:nonorm, P4-1-16
feature_extractor = C7-2-8, R3-8, R3-16
arl_layers = 0;1
image_side = 32
epochs = 2
decay_start_epoch = 1
checkpoint_every = 1
[aug]
rot_per_image = 1
flip_attempts_per_image = 1
output_side = 32
[classifier]
arch = resnet-mini
input_side = 32
batch_size = 8
epochs = 1
)";

std::map<std::string, std::uint64_t> HashTree(const fs::path& root) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().filename() != "argan.log") {
      out[fs::relative(e.path(), root).string()] = HashFile(e.path());
    }
  }
  return out;
}

template <typename F>
std::string ErrorText(F&& f, ErrorCode* code = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (code) *code = e.code();
    return e.what();
  }
  return "";
}

std::vector<std::string> Column(const fs::path& csv, const std::string& name) {
  const auto t = ReadCsv(csv);
  const int col = t.Column(name);
  std::vector<std::string> out;
  for (const auto& r : t.rows) out.push_back(r.at(static_cast<size_t>(col)));
  return out;
}

TEST(ExperimentConfigTest, SectionsRoundTripAndRelativePaths) {
  auto c = ExperimentConfig::FromText(kTinyConfig, "/base");
  EXPECT_EQ(c.WorkDir(), fs::path("/base/work"));
  EXPECT_EQ(c.gan.image_side, 32);
  EXPECT_EQ(c.Get("classifier.arch"), "resnet-mini");
  EXPECT_EQ(c.data.toy, ToySource::kClasses);
  c.Validate();
  auto back = ExperimentConfig::FromText(c.ToText(), "/base");
  EXPECT_EQ(back.ToText(), c.ToText());
  c.Set("paths.work_dir", "/abs/w");
  EXPECT_EQ(c.WorkDir(), fs::path("/abs/w"));
  c.Set("data.frozen", "b; a");
  EXPECT_EQ(c.Get("data.frozen"), "a;b");
}

TEST(ExperimentConfigTest, RejectsUnknownKeysAndBadValues) {
  ExperimentConfig c;
  ErrorCode code{};
  EXPECT_NE(ErrorText([&] { c.Set("gan.lamda", "1"); }, &code).find("gan.lamda"), std::string::npos);
  EXPECT_EQ(code, ErrorCode::kInvalidArgument);
  EXPECT_THROW(c.Set("nosection", "1"), Error);
  EXPECT_THROW(c.Set("bogus.key", "1"), Error);
  EXPECT_NE(ErrorText([&] { c.Set("gan.epochs", "many"); }).find("gan.epochs"), std::string::npos);
  EXPECT_THROW(c.Set("data.toy", "cats"), Error);
  EXPECT_THROW(c.Get("gan.nope"), Error);
  EXPECT_THROW(ExperimentConfig::FromText("[gan]\nlam = 1\nlam = 2\n", "/"), Error);
  EXPECT_THROW(ExperimentConfig::FromText("[gan]\ntypo = 1\n", "/"), Error);
  c.Set("report.instances", "X;Y");
  EXPECT_THROW(c.Validate(), Error);
}

void WriteImage(const fs::path& p, int value) {
  fs::create_directories(p.parent_path());
  WritePng(cv::Mat(8, 8, CV_8UC3, cv::Scalar(value, value, value)), p);
}

TEST(ScanDataRootTest, FlatLayoutHoldsOutAFractionPerClass) {
  TempDir d("scan");
  for (int i = 0; i < 10; ++i) WriteImage(d / ("leaf_mold/img" + FormatInt(i) + ".png"), i);
  for (int i = 0; i < 4; ++i) WriteImage(d / ("healthy/h" + FormatInt(i) + ".png"), i);
  WriteTextFile(d / "healthy/notes.txt", "not an image");
  DataOptions o;
  o.test_fraction = 0.5;
  auto m = ScanDataRoot(d.path(), o);
  EXPECT_EQ(m.label_set, (std::vector<std::string>{"healthy", "leaf_mold"}));
  EXPECT_EQ(m.records.size(), 14u);
  std::map<std::string, int> tests;
  for (const auto& r : m.records) {
    if (r.split == Split::kTest) ++tests[r.class_label];
    EXPECT_EQ(r.domain, r.class_label == "healthy" ? Domain::kA : Domain::kB);
  }
  EXPECT_EQ(tests["leaf_mold"], 5);
  EXPECT_EQ(tests["healthy"], 2);
  EXPECT_EQ(ScanDataRoot(d.path(), o).records, m.records);
}

TEST(ScanDataRootTest, SplitFoldersAndMissingRoot) {
  TempDir d("scan_split");
  WriteImage(d / "train/a/1.png", 1);
  WriteImage(d / "train/b/1.jpg", 1);
  WriteImage(d / "test/a/2.png", 2);
  auto m = ScanDataRoot(d.path(), {});
  ASSERT_EQ(m.records.size(), 3u);
  EXPECT_EQ(m.records[2].split, Split::kTest);
  EXPECT_EQ(m.records[1].split, Split::kTrain);
  const auto missing = (d / "nowhere").string();
  EXPECT_NE(ErrorText([&] { ScanDataRoot(missing, {}); }).find(missing), std::string::npos);
}

TEST(ReportTest, AccuracyChangeFormatting) {
  EXPECT_EQ(FormatAccuracyChange(80.9, 86.1), "80.9 → 86.1 (+5.2)");
  EXPECT_EQ(FormatAccuracyChange(80.9, 81.7), "80.9 → 81.7 (+0.8)");
  EXPECT_EQ(FormatAccuracyChange(50.0, 37.5), "50.0 → 37.5 (-12.5)");
  EXPECT_EQ(FormatAccuracyChange(40.0, 40.0), "40.0 → 40.0 (+0.0)");
  bool found = false;
  for (const auto& r : ReferenceValues()) found |= r.value == "80.9 → 86.1 (+5.2)";
  EXPECT_TRUE(found);
}

class ReportFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = ExperimentConfig::FromText(kTinyConfig, dir_.path());
    config_.report.charts = false;
  }
  void WriteEval(const std::string& tag, const EvalReport& r) {
    fs::create_directories(EvalDir(config_, tag));
    SaveEvalReport(r, EvalDir(config_, tag) / "report.csv", EvalDir(config_, tag) / "confusion.csv");
  }
  TempDir dir_{"report"};
  ExperimentConfig config_;
};

TEST_F(ReportFixture, IdenticalEvaluationsGiveZeroChanges) {
  const auto r = EvalReport::FromConfusion({"a", "b", "c"}, {{5, 1, 0}, {2, 4, 0}, {0, 0, 6}});
  for (const char* t : {"X", "X_plus_XC", "X_plus_XS"}) WriteEval(t, r);
  CmdReport(config_);
  const auto dir = ReportDir(config_);
  for (const auto& col : {"classic_vs_base", "synthetic_vs_base"}) {
    for (const auto& v : Column(dir / "tp_change.csv", col)) EXPECT_EQ(v, "0");
  }
  for (const auto& col : {"classic_vs_base", "synthetic_vs_base", "synthetic_vs_classic"}) {
    for (const auto& v : Column(dir / "fp_change.csv", col)) EXPECT_TRUE(v == "0" || v.empty());
  }
  // fp(c) = 0 in X, so its ratios are undefined and left blank.
  EXPECT_EQ(Column(dir / "fp_change.csv", "classic_vs_base")[2], "");
  EXPECT_EQ(ReadTextFile(dir / "precision_table.csv"),
            "label,X,X_plus_XC,X_plus_XS\n"
            "a,0.7142857142857143,0.7142857142857143,0.7142857142857143\n"
            "b,0.8,0.8,0.8\n"
            "c,1,1,1\n"
            "(accuracy),0.8333333333333334,0.8333333333333334,0.8333333333333334\n");
  const auto tp = ReadTextFile(dir / "tp_change.csv");
  EXPECT_EQ(tp.substr(0, tp.find('\n')), kTpChangeHeader);
  const auto fp = ReadTextFile(dir / "fp_change.csv");
  EXPECT_EQ(fp.substr(0, fp.find('\n')), kFpChangeHeader);
  const auto ref = ReadTextFile(dir / "reference_values.csv");
  EXPECT_EQ(ref.substr(0, ref.find('\n')), kReferenceHeader);
  EXPECT_NE(ref.find("80.9 → 86.1 (+5.2),\"reference value, not reproduced\""), std::string::npos);
  const auto summary = ReadTextFile(dir / "summary.txt");
  EXPECT_NE(summary.find("X -> X_plus_XS: 83.3 → 83.3 (+0.0)"), std::string::npos);
  EXPECT_NE(summary.find("[reference] tomato disease recognition accuracy (%) | X -> X_plus_XS: 80.9 → 86.1 (+5.2)"),
            std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "precision_chart.png"));
}

TEST_F(ReportFixture, MissingEvaluationAndCharts) {
  const auto r = EvalReport::FromConfusion({"a", "b"}, {{3, 1}, {1, 3}});
  WriteEval("X", r);
  ErrorCode code{};
  EXPECT_NE(ErrorText([&] { CmdReport(config_); }, &code).find("X_plus_XC"), std::string::npos);
  EXPECT_EQ(code, ErrorCode::kState);
  WriteEval("X_plus_XS", EvalReport::FromConfusion({"a", "b"}, {{4, 0}, {1, 3}}));
  config_.report.instances = {"X", "X_plus_XS"};
  config_.report.charts = true;
  CmdReport(config_);
  const auto dir = ReportDir(config_);
  EXPECT_TRUE(fs::exists(dir / "precision_chart.png"));
  EXPECT_TRUE(fs::exists(dir / "tp_change_chart.png"));
  EXPECT_FALSE(fs::exists(dir / "fp_change.csv"));  // needs all three instances
  EXPECT_EQ(Column(dir / "tp_change.csv", "classic_vs_base"), (std::vector<std::string>{"", ""}));
  EXPECT_EQ(Column(dir / "tp_change.csv", "synthetic_vs_base")[0], FormatReal(1.0 / 3.0));
  WriteEval("X_plus_XC", EvalReport::FromConfusion({"a", "c"}, {{3, 1}, {1, 3}}));
  config_.report.instances = {"X", "X_plus_XC"};
  EXPECT_THROW(CmdReport(config_), Error);
}

// Whole pipeline on the tiny toy setup.
class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("pipeline");
    config_ = new ExperimentConfig(ExperimentConfig::FromText(kTinyConfig, dir_->path()));
    CmdPrepare(*config_);
    CmdTrainGan(*config_, false);
  }
  static void TearDownTestSuite() {
    delete config_;
    delete dir_;
  }
  static TempDir* dir_;
  static ExperimentConfig* config_;
};
TempDir* PipelineTest::dir_ = nullptr;
ExperimentConfig* PipelineTest::config_ = nullptr;

TEST_F(PipelineTest, PrepareIsIdempotentAndWritesDistribution) {
  const auto before = HashTree(config_->WorkDir() / "instances");
  CmdPrepare(*config_);
  EXPECT_EQ(HashTree(config_->WorkDir() / "instances"), before);
  EXPECT_EQ(ReadTextFile(DistributionPath(*config_, "X")), "label,count\nhealthy,8\nrust,8\nmildew,3\nblight,3\n");
  EXPECT_EQ(Column(config_->WorkDir() / "instances" / "balance_plan.csv", "augment"),
            (std::vector<std::string>{"0", "0", "5", "5"}));
}

TEST_F(PipelineTest, MissingDataRootNamesThePath) {
  auto c = *config_;
  c.data.toy = ToySource::kNone;
  c.data_root = "no_such_root";
  ErrorCode code{};
  const auto msg = ErrorText([&] { CmdPrepare(c); }, &code);
  EXPECT_NE(msg.find((dir_->path() / "no_such_root").string()), std::string::npos) << msg;
  EXPECT_EQ(code, ErrorCode::kInvalidArgument);
}

TEST_F(PipelineTest, TrainGanTargetsMinorityClassesWithCheckpoints) {
  const auto x = LoadManifest(InstancePath(*config_, "X"));
  EXPECT_EQ(GanTargets(*config_, x), (std::vector<std::string>{"mildew", "blight"}));
  for (const char* l : {"mildew", "blight"}) {
    EXPECT_EQ(LatestCheckpoint(GanDir(*config_, l)), GanDir(*config_, l) / CheckpointName(2));
    EXPECT_TRUE(fs::exists(GanDir(*config_, l) / "loss_history.csv"));
  }
  EXPECT_FALSE(fs::exists(GanDir(*config_, "rust")));
}

TEST_F(PipelineTest, LambdaZeroLeavesArlColumnZero) {
  auto c = *config_;
  c.work_dir = (dir_->path() / "lam0").string();
  c.gan.lam = 0.0;
  c.gan.epochs = 1;
  c.gan_labels = {"blight"};
  CmdPrepare(c);
  CmdTrainGan(c, false);
  const auto arl = Column(GanDir(c, "blight") / "loss_history.csv", "arl");
  ASSERT_FALSE(arl.empty());
  for (const auto& v : arl) EXPECT_EQ(v, "0");
}

TEST_F(PipelineTest, ResumeReproducesTheUninterruptedCheckpoint) {
  const auto dir = GanDir(*config_, "mildew");
  const auto final_hash = HashFile(dir / CheckpointName(2));
  const auto history_hash = HashFile(dir / "loss_history.csv");
  fs::remove(dir / CheckpointName(2));
  CmdTrainGan(*config_, true);
  EXPECT_EQ(HashFile(dir / CheckpointName(2)), final_hash);
  EXPECT_EQ(HashFile(dir / "loss_history.csv"), history_hash);
  auto other = *config_;
  other.gan.lam = 0.5;
  EXPECT_THROW(CmdTrainGan(other, true), Error);  // configuration changed under the checkpoint
}

TEST_F(PipelineTest, ClassicAugmentFollowsTheCountLaw) {
  CmdAugment(*config_, AugmentMode::kClassic);
  const auto base = LoadManifest(InstancePath(*config_, "X"));
  const auto inst = LoadManifest(InstancePath(*config_, "X_plus_XC"));
  EXPECT_EQ(inst.instance_tag, InstanceTag::kXPlusXC);
  EXPECT_EQ(ReadTextFile(DistributionPath(*config_, "X_plus_XC")), "label,count\nhealthy,8\nrust,8\nmildew,8\nblight,8\n");
  for (size_t i = 0; i < inst.records.size(); ++i) {
    if (i < base.records.size()) {
      EXPECT_EQ(inst.records[i], base.records[i]);
    } else {
      EXPECT_EQ(inst.records[i].origin, Origin::kClassicAug);
    }
  }
  for (const char* l : {"mildew", "blight"}) {
    const auto root = config_->WorkDir() / "classic" / l;
    const auto t = ReadCsv(root / "counts.csv");
    std::map<std::string, std::int64_t> expected_per_round;
    for (const auto& r : t.rows) {
      const auto n = [&](const char* col) { return ParseInt(r.at(static_cast<size_t>(t.Column(col)))); };
      EXPECT_EQ(n("outputs"), (n("rotations") + n("distortions") + n("flips") + 1) * n("elastic_variants"));
      EXPECT_EQ(n("rotations"), 1);
      EXPECT_LE(n("flips"), 1);
      expected_per_round[r[0]] += n("outputs");
    }
    for (const auto& [round, n] : expected_per_round) {
      const auto files = std::distance(fs::directory_iterator(root / round), fs::directory_iterator{});
      EXPECT_EQ(files, n) << round;
    }
  }
}

TEST_F(PipelineTest, SyntheticAugmentAddsOnlySyntheticRecords) {
  CmdAugment(*config_, AugmentMode::kSynthetic);
  const auto base = LoadManifest(InstancePath(*config_, "X"));
  const auto inst = LoadManifest(InstancePath(*config_, "X_plus_XS"));
  ASSERT_EQ(inst.records.size(), base.records.size() + 10);
  for (size_t i = base.records.size(); i < inst.records.size(); ++i) {
    EXPECT_EQ(inst.records[i].origin, Origin::kSynthetic);
    EXPECT_EQ(inst.records[i].split, Split::kTrain);
    EXPECT_TRUE(fs::exists(inst.records[i].path));
  }
  const auto hashes = HashTree(config_->WorkDir() / "synthetic");
  CmdAugment(*config_, AugmentMode::kSynthetic);
  EXPECT_EQ(HashTree(config_->WorkDir() / "synthetic"), hashes);
}

TEST_F(PipelineTest, FrozenClassIsIdenticalAcrossInstances) {
  auto c = *config_;
  c.data.frozen = {"blight"};
  CmdAugment(c, AugmentMode::kClassic);
  CmdAugment(c, AugmentMode::kSynthetic);
  const auto pick = [&](const char* tag) {
    std::vector<ImageRecord> out;
    for (const auto& r : LoadManifest(InstancePath(c, tag)).records) {
      if (r.class_label == "blight") out.push_back(r);
    }
    return out;
  };
  EXPECT_EQ(pick("X_plus_XC"), pick("X"));
  EXPECT_EQ(pick("X_plus_XS"), pick("X"));
  EXPECT_EQ(pick("X").size(), 6u);  // 3 train + 3 test
  // Restore the unfrozen instances for the other tests.
  CmdAugment(*config_, AugmentMode::kClassic);
  CmdAugment(*config_, AugmentMode::kSynthetic);
}

TEST_F(PipelineTest, SyntheticWithoutCheckpointIsAStateError) {
  auto c = *config_;
  c.work_dir = (dir_->path() / "no_gan").string();
  CmdPrepare(c);
  ErrorCode code{};
  const auto msg = ErrorText([&] { CmdAugment(c, AugmentMode::kSynthetic); }, &code);
  EXPECT_EQ(code, ErrorCode::kState);
  EXPECT_NE(msg.find("checkpoint"), std::string::npos);
}

TEST_F(PipelineTest, ClassifierStageWiringZeroEpochsAndSeeds) {
  auto c = *config_;
  c.classifier.epochs = 0;
  CmdTrainClassifier(c, "X");
  EXPECT_TRUE(fs::exists(ClassifierDir(c, "X") / "model.argan"));
  EXPECT_EQ(ReadCsv(ClassifierDir(c, "X") / "history.csv").rows.size(), 0u);

  c.classifier.epochs = 1;
  CmdTrainClassifier(c, "X");
  const auto first = ReadTextFile(ClassifierDir(c, "X") / "history.csv");
  CmdTrainClassifier(c, "X");
  EXPECT_EQ(ReadTextFile(ClassifierDir(c, "X") / "history.csv"), first);
  c.classifier.seed = 99;
  CmdTrainClassifier(c, "X");
  EXPECT_NE(ReadTextFile(ClassifierDir(c, "X") / "history.csv"), first);

  CmdEvaluate(c, "X");
  const auto report = ReadTextFile(EvalDir(c, "X") / "report.csv");
  EXPECT_EQ(report.substr(0, report.find('\n')), "label,tp,fp,precision");
  EXPECT_THROW(CmdTrainClassifier(c, "X_plus_XQ"), Error);
  EXPECT_THROW(CmdEvaluate(c, "Y"), Error);
}

TEST_F(PipelineTest, GanEvaluationWritesFidRows) {
  CmdEvaluate(*config_, "gan");
  const auto rows = LoadMetricsCsv(GanMetricsPath(*config_));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].metric, "fid_translated:mildew");
  EXPECT_EQ(rows[1].metric, "fid_source:mildew");
  for (const auto& r : rows) {
    EXPECT_GE(r.value, 0.0);
    EXPECT_EQ(r.n, 3);
  }
}

}  // namespace
}  // namespace argan
