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
#ifndef ARGAN_METRICS_METRICS_HPP_
#define ARGAN_METRICS_METRICS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <torch/types.h>

#include "networks/network.hpp"

namespace argan {

struct FeatureSet {
  Eigen::MatrixXd features;  // n × d
  std::string source;
};

// Global-average-pooled activations of tap `tap` (negative counts from the
// end, so −1 is the last tap), one row per image. Images run one at a time:
// batched convolutions may pick different kernels, and a row must not depend
// on its neighbours.
FeatureSet ExtractFeatures(const Network& extractor, int tap, const torch::Tensor& images, std::string source = "");

// ‖μx − μy‖² + Tr(Σx + Σy − 2(ΣxΣy)^½), covariances with the n − 1
// convention. The trace of the square root is taken through the symmetric
// form Σx^½ Σy Σx^½, clipping eigenvalues above −1e-6·max to zero.
double Fid(const FeatureSet& x, const FeatureSet& y);

struct SegPair {
  std::vector<int> predicted;  // row-major H×W
  std::vector<int> truth;
  int n_labels = 0;
};

struct SegScores {
  double ppa = 0.0;
  // Mean over labels present in the truth of correct/predicted pixels for
  // that label (a label never predicted scores 0).
  double pca = 0.0;
  // Same labels, correct/true pixels: the recall-normalized variant.
  double pca_recall = 0.0;
  double class_iou = 0.0;  // mean over labels present in either map
};

// Pixel counts are pooled over all pairs before the ratios are taken.
SegScores ComputeSegScores(const std::vector<SegPair>& pairs);

// One score per image path; throws with the offending path on failure.
using ImageScorer = std::function<double(const std::string& path)>;

// Runs `command '<path>'` through the shell and parses the first line of
// its standard output as the score.
ImageScorer CommandScorer(std::string command);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population convention (divide by n)
  std::int64_t n = 0;
};

MeanStd NimaScore(const ImageScorer& scorer, const std::vector<std::string>& paths);

struct MetricRow {
  std::string metric;
  double value = 0.0;
  std::int64_t n = 0;
  std::string notes;
};

inline constexpr std::string_view kMetricsHeader = "metric,value,n,notes";
void SaveMetricsCsv(const std::vector<MetricRow>& rows, const std::filesystem::path& path);
std::vector<MetricRow> LoadMetricsCsv(const std::filesystem::path& path);

}  // namespace argan

#endif  // ARGAN_METRICS_METRICS_HPP_
