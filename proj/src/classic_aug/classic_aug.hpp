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
#ifndef ARGAN_CLASSIC_AUG_CLASSIC_AUG_HPP_
#define ARGAN_CLASSIC_AUG_CLASSIC_AUG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "common/config.hpp"
#include "common/rng.hpp"
#include "core_data/manifest.hpp"

namespace argan {

struct AugConfig {
  int rot_per_image = 0;
  double angle_min = 0.0;  // degrees
  double angle_max = 180.0;
  int dist_per_image = 0;
  double shear_max_deg = 15.0;
  double perspective_max = 0.05;  // corner jitter, fraction of the side
  int flip_attempts_per_image = 0;
  double flip_prob = 0.5;
  int elastic_variants = 1;
  int elastic_grid = 16;
  double elastic_magnitude = 0.25;  // corner jitter radius, fraction of a cell
  int output_side = 256;
  std::uint64_t seed = 0;

  void Validate() const;
  bool Set(const std::string& key, const std::string& value);
  KeyValues ToKeyValues() const;
};

// Rotation about the image centre, bicubic, reflect-padded, same size.
cv::Mat Rotate(const cv::Mat& image, double angle_deg);

struct DistortParams {
  double shear_max_deg = 15.0;
  double perspective_max = 0.05;
};

// A random shear (angle uniform in ±shear_max along a random axis) followed
// by independent corner jitter of up to perspective_max·side, realized as
// one perspective warp.
cv::Mat Distort(const cv::Mat& image, Rng& rng, const DistortParams& params = {});

enum class FlipAxis { kUpDown, kLeftRight };
cv::Mat Flip(const cv::Mat& image, FlipAxis axis, Rng& rng, double prob, bool* applied);

// Per-pixel displacement (dx, dy), CV_32FC1 each. The image is split into
// grid×grid cells; interior cell corners move by an offset drawn uniformly
// from a disk of radius magnitude·cell, border corners stay fixed, and the
// field is bilinear inside each cell.
struct DisplacementField {
  cv::Mat dx;
  cv::Mat dy;
};
DisplacementField ElasticField(int width, int height, int grid, Rng& rng, double magnitude = 0.25);
cv::Mat ApplyDisplacement(const cv::Mat& image, const DisplacementField& field);
cv::Mat Elastic(const cv::Mat& image, int grid, Rng& rng, double magnitude = 0.25);

// Realized per-image counts.
struct AugCounts {
  int rotations = 0;
  int distortions = 0;
  int flips = 0;  // realized, not attempted
  int elastic_variants = 0;

  std::int64_t Expected() const {
    return static_cast<std::int64_t>(rotations + distortions + flips + 1) * elastic_variants;
  }
};

struct ClassicAugResult {
  std::vector<ImageRecord> records;  // origin classic_aug, labels preserved
  std::vector<AugCounts> counts;     // one per input record
};

// For every input: rot_per_image rotations, dist_per_image distortions,
// flip_attempts_per_image flip attempts (alternating up-down/left-right)
// and the original; each of these gets elastic_variants elastic passes and
// a final bicubic resize to output_side. Files are named
// <stem>__<chain>__<k>.png. Record i draws its upstream transforms from
// stream (seed, i, 0) and its elastic passes from (seed, i, 1).
ClassicAugResult ClassicAugment(const std::vector<ImageRecord>& records, const AugConfig& config,
                                const std::filesystem::path& out_dir);

}  // namespace argan

#endif  // ARGAN_CLASSIC_AUG_CLASSIC_AUG_HPP_
